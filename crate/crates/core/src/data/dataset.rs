use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: u8,
}

/// A nonempty set of binary-labelled samples sharing one feature width.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    samples: Vec<Sample>,
    feature_dim: usize,
}

impl LabeledDataset {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::EmptyDataset("no samples".into()))?;
        let feature_dim = first.features.len();
        if feature_dim == 0 {
            return Err(Error::arg("feature vectors must be nonempty"));
        }
        for (i, s) in samples.iter().enumerate() {
            if s.features.len() != feature_dim {
                return Err(Error::arg(format!(
                    "sample {i} has {} features, expected {feature_dim}",
                    s.features.len()
                )));
            }
            if s.label > 1 {
                return Err(Error::arg(format!(
                    "sample {i} has non-binary label {}",
                    s.label
                )));
            }
        }
        Ok(Self {
            samples,
            feature_dim,
        })
    }

    pub fn from_parts(features: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::arg(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        Self::new(
            features
                .into_iter()
                .zip(labels)
                .map(|(features, label)| Sample { features, label })
                .collect(),
        )
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = u8> + '_ {
        self.samples.iter().map(|s| s.label)
    }

    /// Counts of (label 0, label 1).
    pub fn class_counts(&self) -> (usize, usize) {
        let ones = self.labels().filter(|&l| l == 1).count();
        (self.len() - ones, ones)
    }

    /// Dataset made of the samples at `indices`, in that order (repeats allowed).
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let samples = indices
            .iter()
            .map(|&i| {
                self.samples
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::arg(format!("index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples)
    }
}

/// Shuffled (train, test) index partition of `0..n`.
pub fn split_indices(n: usize, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::arg(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let n_train = (n as f64 * (1.0 - test_fraction)).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_from_seed(seed));
    let test = order.split_off(n_train.min(n));
    Ok((order, test))
}

pub fn split(
    dataset: &LabeledDataset,
    test_fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    let (train, test) = split_indices(dataset.len(), test_fraction, seed)?;
    if train.is_empty() || test.is_empty() {
        return Err(Error::EmptyDataset(format!(
            "split of {} samples at fraction {test_fraction} leaves one side empty",
            dataset.len()
        )));
    }
    Ok((dataset.select(&train)?, dataset.select(&test)?))
}

/// Indices of a draw with replacement of `round(fraction * n)` items from `0..n`.
pub fn bootstrap_indices(n: usize, fraction: f64, seed: u64) -> Result<Vec<usize>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::arg(format!(
            "bootstrap fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let k = (fraction * n as f64).round() as usize;
    if k == 0 {
        return Err(Error::EmptyDataset(format!(
            "bootstrap fraction {fraction} of {n} samples rounds to zero"
        )));
    }
    let mut rng = rng_from_seed(seed);
    Ok((0..k).map(|_| rng.gen_range(0..n)).collect())
}

/// Uniform draw with replacement of `round(fraction * |train|)` samples.
pub fn bootstrap_sample(
    train: &LabeledDataset,
    fraction: f64,
    seed: u64,
) -> Result<LabeledDataset> {
    train.select(&bootstrap_indices(train.len(), fraction, seed)?)
}

/// Indices of `k` distinct items from `0..n`; `k` larger than `n` is an error.
pub fn subsample_indices(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k == 0 || k > n {
        return Err(Error::arg(format!(
            "cannot draw {k} distinct samples from a pool of {n}"
        )));
    }
    Ok(index::sample(&mut rng_from_seed(seed), n, k).into_vec())
}

/// Uniform draw of `k` distinct samples.
pub fn subsample(pool: &LabeledDataset, k: usize, seed: u64) -> Result<LabeledDataset> {
    pool.select(&subsample_indices(pool.len(), k, seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use std::collections::HashSet;

    fn toy(n: usize) -> LabeledDataset {
        LabeledDataset::from_parts(
            (0..n).map(|i| vec![i as f64]).collect(),
            (0..n).map(|i| (i % 2) as u8).collect(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(matches!(
            LabeledDataset::new(vec![]),
            Err(Error::EmptyDataset(_))
        ));
        let ragged = LabeledDataset::from_parts(vec![vec![1.0], vec![1.0, 2.0]], vec![0, 1]);
        assert!(matches!(ragged, Err(Error::Argument(_))));
        let bad_label = LabeledDataset::from_parts(vec![vec![1.0]], vec![2]);
        assert!(matches!(bad_label, Err(Error::Argument(_))));
    }

    #[test]
    fn split_sizes_and_determinism() {
        let d = toy(100);
        let (tr, te) = split(&d, 0.2, 7).unwrap();
        assert_eq!((tr.len(), te.len()), (80, 20));
        let (tr2, te2) = split(&d, 0.2, 7).unwrap();
        assert_eq!(tr, tr2);
        assert_eq!(te, te2);
    }

    #[test]
    fn split_rejects_fraction_out_of_range() {
        let d = toy(10);
        for f in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(matches!(split(&d, f, 1), Err(Error::Argument(_))));
        }
    }

    #[test]
    fn bootstrap_size_and_determinism() {
        let d = toy(100);
        let half = bootstrap_sample(&d, 0.5, 3).unwrap();
        assert_eq!(half.len(), 50);
        let a = bootstrap_sample(&d, 1.0, 11).unwrap();
        let b = bootstrap_sample(&d, 1.0, 11).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            bootstrap_sample(&d, 0.0, 1),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            bootstrap_sample(&d, 1.01, 1),
            Err(Error::Argument(_))
        ));
    }

    /// Distinct count of a full-size bootstrap of 1000 items; the oracle is a
    /// direct Monte-Carlo estimate with an independent generator.
    #[test]
    fn bootstrap_distinct_fraction_matches_expectation() {
        use rand::SeedableRng;
        let n = 1000;
        let d = toy(n);
        let mut oracle = rand::rngs::StdRng::seed_from_u64(99);
        let mc: f64 = (0..200)
            .map(|_| {
                (0..n)
                    .map(|_| oracle.gen_range(0..n))
                    .collect::<HashSet<_>>()
                    .len() as f64
            })
            .sum::<f64>()
            / 200.0;
        let expected = n as f64 * (1.0 - (-1.0f64).exp());
        assert!((mc - expected).abs() < 5.0, "oracle {mc} vs {expected}");
        for seed in 0..20 {
            let b = bootstrap_sample(&d, 1.0, seed).unwrap();
            let distinct = b
                .samples()
                .iter()
                .map(|s| s.features[0] as usize)
                .collect::<HashSet<_>>()
                .len() as f64;
            assert!((distinct - mc).abs() <= 40.0, "seed {seed}: {distinct}");
        }
    }

    #[test]
    fn subsample_draws_distinct() {
        let d = toy(50);
        let s = subsample(&d, 20, 5).unwrap();
        let ids: HashSet<_> = s.samples().iter().map(|x| x.features[0] as usize).collect();
        assert_eq!(ids.len(), 20);
        assert!(subsample(&d, 51, 5).is_err());
    }

    proptest! {
        #[test]
        fn split_is_a_partition(n in 2usize..300, f in 0.05f64..0.95, seed in any::<u64>()) {
            let (tr, te) = split_indices(n, f, seed).unwrap();
            prop_assert_eq!(tr.len(), (n as f64 * (1.0 - f)).round() as usize);
            let mut all: Vec<usize> = tr.iter().chain(te.iter()).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }

        #[test]
        fn bootstrap_labels_come_from_train(n in 1usize..200, f in 0.01f64..=1.0, seed in any::<u64>()) {
            let d = toy(n);
            if let Ok(b) = bootstrap_sample(&d, f, seed) {
                let (z, o) = d.class_counts();
                for s in b.samples() {
                    prop_assert!(d.samples().contains(s));
                }
                let (bz, bo) = b.class_counts();
                prop_assert!(bz == 0 || z > 0);
                prop_assert!(bo == 0 || o > 0);
            }
        }
    }
}
