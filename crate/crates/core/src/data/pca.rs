//! Principal component analysis fitted by symmetric eigendecomposition of the
//! sample covariance.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};

/// Projected sample, the classical input to amplitude encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
    norm: f64,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Self {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        Self { values, norm }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    mean: Vec<f64>,
    /// Row-major, one orthonormal component per row.
    components: Vec<Vec<f64>>,
    /// Covariance eigenvalue of each component, descending. Empty for a
    /// model assembled with [`PcaModel::from_parts`].
    explained_variance: Vec<f64>,
}

impl PcaModel {
    /// Model from explicit parts; rows of `components` must be orthonormal.
    pub fn from_parts(mean: Vec<f64>, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.is_empty() || components.len() > mean.len() {
            return Err(Error::arg(format!(
                "need between 1 and {} components, got {}",
                mean.len(),
                components.len()
            )));
        }
        for (i, a) in components.iter().enumerate() {
            if a.len() != mean.len() {
                return Err(Error::arg(format!("component {i} has wrong width")));
            }
            for (j, b) in components.iter().enumerate().skip(i) {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot - want).abs() > 1e-9 {
                    return Err(Error::arg(format!(
                        "components {i} and {j} are not orthonormal (dot {dot})"
                    )));
                }
            }
        }
        Ok(Self {
            mean,
            components,
            explained_variance: Vec::new(),
        })
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn explained_variance(&self) -> &[f64] {
        &self.explained_variance
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn feature_dim(&self) -> usize {
        self.mean.len()
    }

    /// Maps a projection back to input space.
    pub fn reconstruct(&self, projected: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (c, &w) in self.components.iter().zip(projected) {
            for (o, v) in out.iter_mut().zip(c) {
                *o += w * v;
            }
        }
        out
    }
}

pub fn fit_pca(train: &LabeledDataset, n_components: usize) -> Result<PcaModel> {
    let d = train.feature_dim();
    let n = train.len();
    if n_components == 0 || n_components > d {
        return Err(Error::arg(format!(
            "n_components must lie in 1..={d}, got {n_components}"
        )));
    }
    if n < 2 {
        return Err(Error::arg("PCA needs at least two samples"));
    }

    let mut mean = vec![0.0; d];
    for s in train.samples() {
        for (m, x) in mean.iter_mut().zip(&s.features) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let centered = DMatrix::from_fn(n, d, |r, c| train.samples()[r].features[c] - mean[c]);
    let cov = centered.tr_mul(&centered) / (n as f64 - 1.0);
    let scale = train
        .samples()
        .iter()
        .map(|s| s.features.iter().map(|x| x * x).sum::<f64>())
        .sum::<f64>()
        / (n * d) as f64;

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let top = eig.eigenvalues[order[0]];
    let tol = 1e-10 * top.max(scale);
    let rank = order.iter().filter(|&&k| eig.eigenvalues[k] > tol).count();
    if rank < n_components {
        return Err(Error::RankDeficient {
            rank,
            requested: n_components,
        });
    }

    let mut components = Vec::with_capacity(n_components);
    let mut explained_variance = Vec::with_capacity(n_components);
    for &k in &order[..n_components] {
        let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        let pivot = v.iter().copied().fold(
            0.0f64,
            |best, x| if x.abs() > best.abs() { x } else { best },
        );
        if pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        components.push(v);
        explained_variance.push(eig.eigenvalues[k]);
    }
    Ok(PcaModel {
        mean,
        components,
        explained_variance,
    })
}

pub fn apply_pca(model: &PcaModel, sample: &[f64]) -> Result<FeatureVector> {
    if sample.len() != model.feature_dim() {
        return Err(Error::arg(format!(
            "sample has {} features, model expects {}",
            sample.len(),
            model.feature_dim()
        )));
    }
    let values = model
        .components
        .iter()
        .map(|c| {
            c.iter()
                .zip(sample)
                .zip(&model.mean)
                .map(|((w, x), m)| w * (x - m))
                .sum()
        })
        .collect();
    Ok(FeatureVector::new(values))
}
