use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::strategy::{combine, confusion_weight, Strategy, StrategyConfig, VotingRecord};
use crate::data::{bootstrap_indices, subsample_indices, LabeledDataset, PcaModel};
use crate::error::{Error, Result};
use crate::qcnn::{Qcnn, QcnnArchitecture};
use crate::seed::{derive_seed, Purpose};
use crate::trainer::{
    encode_dataset, evaluate_encoded, train_encoded, EncodedSet, TrainConfig, TrainedLearner,
};

pub const ENSEMBLE_FORMAT_VERSION: u32 = 1;

/// Fraction of positions where two prediction vectors agree.
pub fn pairwise_similarity(a: &[u8], b: &[u8]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::arg("similarity needs a nonempty probe set"));
    }
    if a.len() != b.len() {
        return Err(Error::arg(format!(
            "prediction lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count();
    Ok(agree as f64 / a.len() as f64)
}

/// Agreement rate of two learners on `probe`.
pub fn learner_similarity(
    qcnn: &Qcnn,
    a: &TrainedLearner,
    b: &TrainedLearner,
    probe: &EncodedSet,
) -> Result<f64> {
    pairwise_similarity(
        &a.predict_encoded(qcnn, probe)?,
        &b.predict_encoded(qcnn, probe)?,
    )
}

/// Symmetric agreement matrix with a unit diagonal.
pub fn similarity_matrix(predictions: &[Vec<u8>]) -> Result<Vec<Vec<f64>>> {
    let n = predictions.len();
    let mut m = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let s = pairwise_similarity(&predictions[i], &predictions[j])?;
            m[i][j] = s;
            m[j][i] = s;
        }
    }
    Ok(m)
}

/// Largest similarity between learner `index` and any later learner.
pub fn compute_s_max(index: usize, similarity: &[Vec<f64>]) -> Result<Option<f64>> {
    let row = similarity.get(index).ok_or_else(|| {
        Error::arg(format!(
            "learner {index} out of range for {} learners",
            similarity.len()
        ))
    })?;
    Ok(row[index + 1..].iter().copied().reduce(f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub n_learners: usize,
    /// Size of each bootstrap subset relative to the training set.
    pub bootstrap_fraction: f64,
    pub master_seed: u64,
    /// Shared by every learner; the seed field is replaced per learner.
    pub train: TrainConfig,
    pub strategy: StrategyConfig,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self {
            n_learners: 20,
            bootstrap_fraction: 0.2,
            master_seed: 0,
            train: TrainConfig::default(),
            strategy: StrategyConfig::default(),
        }
    }
}

/// A trained, immutable ensemble.
///
/// Each learner's `train_accuracy` and `confusion` are its scores on the
/// shared probe set, and `s_max` is taken within this ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    qcnn: Qcnn,
    pca: PcaModel,
    learners: Vec<TrainedLearner>,
    similarity: Vec<Vec<f64>>,
    config: StrategyConfig,
}

#[derive(Serialize, Deserialize)]
struct EnsembleFile {
    format: String,
    version: u32,
    arch: String,
    pca: PcaModel,
    config: StrategyConfig,
    similarity: Vec<Vec<f64>>,
    learners: Vec<TrainedLearner>,
}

impl EnsembleModel {
    pub fn new(
        qcnn: Qcnn,
        pca: PcaModel,
        mut learners: Vec<TrainedLearner>,
        similarity: Vec<Vec<f64>>,
        config: StrategyConfig,
    ) -> Result<Self> {
        config.validate()?;
        let n = learners.len();
        if n == 0 {
            return Err(Error::arg("an ensemble needs at least one learner"));
        }
        if similarity.len() != n || similarity.iter().any(|r| r.len() != n) {
            return Err(Error::arg(format!("similarity matrix must be {n}x{n}")));
        }
        for i in 0..n {
            if similarity[i][i] != 1.0 {
                return Err(Error::arg(format!("similarity diagonal at {i} is not 1")));
            }
            for j in 0..n {
                let s = similarity[i][j];
                if !(0.0..=1.0).contains(&s) || (s - similarity[j][i]).abs() > 1e-12 {
                    return Err(Error::arg(format!(
                        "similarity entry ({i}, {j}) is invalid"
                    )));
                }
            }
        }
        let arch = qcnn.arch().to_text();
        for (i, l) in learners.iter_mut().enumerate() {
            if l.arch != arch || l.params.len() != qcnn.total_params() {
                return Err(Error::arg(format!(
                    "learner {i} does not match the ensemble architecture"
                )));
            }
            l.s_max = compute_s_max(i, &similarity)?;
        }
        if pca.n_components() != 1 << qcnn.n_qubits() {
            return Err(Error::arg("PCA width does not match the circuit"));
        }
        Ok(Self {
            qcnn,
            pca,
            learners,
            similarity,
            config,
        })
    }

    pub fn qcnn(&self) -> &Qcnn {
        &self.qcnn
    }

    pub fn pca(&self) -> &PcaModel {
        &self.pca
    }

    pub fn learners(&self) -> &[TrainedLearner] {
        &self.learners
    }

    pub fn len(&self) -> usize {
        self.learners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.learners.is_empty()
    }

    pub fn similarity(&self) -> &[Vec<f64>] {
        &self.similarity
    }

    pub fn config(&self) -> &StrategyConfig {
        &self.config
    }

    /// `S_max` of learner `index` within this ensemble.
    pub fn s_max(&self, index: usize) -> Result<Option<f64>> {
        compute_s_max(index, &self.similarity)
    }

    /// The first `n` learners as an ensemble of their own. `S_max` only ranges
    /// over learners inside the prefix.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::arg(format!(
                "prefix {n} of an ensemble of {}",
                self.len()
            )));
        }
        let similarity = self.similarity[..n]
            .iter()
            .map(|r| r[..n].to_vec())
            .collect();
        Self::new(
            self.qcnn.clone(),
            self.pca.clone(),
            self.learners[..n].to_vec(),
            similarity,
            self.config.clone(),
        )
    }

    /// Weight of each learner's vote for class 0 and class 1.
    pub fn vote_table(&self, strategy: Strategy) -> Result<Vec<[f64; 2]>> {
        self.learners
            .iter()
            .map(|l| {
                let w = match strategy {
                    Strategy::Majority => [1.0, 1.0],
                    Strategy::AccuracyWeighted => [l.train_accuracy, l.train_accuracy],
                    Strategy::ConfusionMatrix => {
                        let w = |c| {
                            confusion_weight(
                                l.train_accuracy,
                                &l.confusion,
                                l.s_max,
                                c,
                                &self.config,
                            )
                        };
                        [w(0)?, w(1)?]
                    }
                };
                Ok(w)
            })
            .enumerate()
            .map(|(i, w): (usize, Result<[f64; 2]>)| {
                w.map_err(|e| Error::Learner {
                    index: i,
                    source: Box::new(e),
                })
            })
            .collect()
    }

    /// Per-learner predictions on `set`, indexed `[learner][sample]`.
    pub fn learner_votes(&self, set: &EncodedSet) -> Result<Vec<Vec<u8>>> {
        self.learners
            .par_iter()
            .map(|l| l.predict_encoded(&self.qcnn, set))
            .collect()
    }

    /// Combine precomputed votes (from [`learner_votes`](Self::learner_votes)
    /// on this ensemble or a larger one it is a prefix of).
    pub fn combine_votes(&self, votes: &[Vec<u8>], strategy: Strategy) -> Result<Vec<u8>> {
        let n = self.len();
        if votes.len() < n {
            return Err(Error::arg(format!(
                "{} vote rows for {n} learners",
                votes.len()
            )));
        }
        let table = self.vote_table(strategy)?;
        let n_samples = votes[0].len();
        if votes[..n].iter().any(|v| v.len() != n_samples) {
            return Err(Error::arg("vote rows have different lengths"));
        }
        let mut records = Vec::with_capacity(n);
        (0..n_samples)
            .map(|s| {
                records.clear();
                records.extend((0..n).map(|i| {
                    let c = votes[i][s];
                    VotingRecord {
                        learner_index: i,
                        predicted_class: c,
                        weight: table[i][usize::from(c.min(1))],
                    }
                }));
                combine(&records)
            })
            .collect()
    }

    pub fn predict_encoded(&self, set: &EncodedSet, strategy: Strategy) -> Result<Vec<u8>> {
        self.combine_votes(&self.learner_votes(set)?, strategy)
    }

    pub fn predict(&self, dataset: &LabeledDataset, strategy: Strategy) -> Result<Vec<u8>> {
        self.predict_encoded(
            &encode_dataset(dataset, &self.pca, self.qcnn.n_qubits())?,
            strategy,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&EnsembleFile {
            format: "qel-ensemble".into(),
            version: ENSEMBLE_FORMAT_VERSION,
            arch: self.qcnn.arch().to_text(),
            pca: self.pca.clone(),
            config: self.config.clone(),
            similarity: self.similarity.clone(),
            learners: self.learners.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: EnsembleFile = serde_json::from_str(text)?;
        if f.format != "qel-ensemble" || f.version != ENSEMBLE_FORMAT_VERSION {
            return Err(Error::arg(format!(
                "unsupported ensemble record {} v{}",
                f.format, f.version
            )));
        }
        let qcnn = QcnnArchitecture::from_text(&f.arch)?.compile()?;
        Self::new(qcnn, f.pca, f.learners, f.similarity, f.config)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}

/// Train `cfg.n_learners` learners on bootstrap subsets of `train` and score
/// them on a shared probe set drawn from `train`.
///
/// Learner `i` uses the bootstrap and initialization seeds derived from the
/// master seed at index `i`, so the result does not depend on scheduling.
pub fn build_ensemble(
    train: &LabeledDataset,
    pca: &PcaModel,
    arch: &QcnnArchitecture,
    cfg: &BuildConfig,
) -> Result<EnsembleModel> {
    let qcnn = arch.compile()?;
    let encoded = encode_dataset(train, pca, qcnn.n_qubits())?;
    build_ensemble_encoded(&qcnn, &encoded, pca, cfg)
}

/// [`build_ensemble`] on a training set that is already encoded with `pca`.
pub fn build_ensemble_encoded(
    qcnn: &Qcnn,
    train: &EncodedSet,
    pca: &PcaModel,
    cfg: &BuildConfig,
) -> Result<EnsembleModel> {
    if cfg.n_learners == 0 {
        return Err(Error::arg("n_learners must be at least 1"));
    }
    cfg.train.validate()?;
    cfg.strategy.validate()?;
    let probe_idx = subsample_indices(
        train.len(),
        cfg.strategy.similarity_sample_size,
        derive_seed(cfg.master_seed, Purpose::Probe, 0),
    )?;
    let probe = train.select(&probe_idx)?;

    let trained: Vec<(TrainedLearner, Vec<u8>)> = (0..cfg.n_learners)
        .into_par_iter()
        .map(|i| {
            let run = || -> Result<(TrainedLearner, Vec<u8>)> {
                let idx = bootstrap_indices(
                    train.len(),
                    cfg.bootstrap_fraction,
                    derive_seed(cfg.master_seed, Purpose::Bootstrap, i as u64),
                )?;
                let subset = train.select(&idx)?;
                let tc = TrainConfig {
                    seed: derive_seed(cfg.master_seed, Purpose::LearnerInit, i as u64),
                    ..cfg.train.clone()
                };
                let mut learner = train_encoded(qcnn, &subset, &tc)?;
                let eval = evaluate_encoded(qcnn, &learner, &probe)?;
                learner.train_accuracy = eval.accuracy;
                learner.confusion = eval.confusion;
                Ok((learner, eval.predictions))
            };
            run().map_err(|e| Error::Learner {
                index: i,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let (learners, votes): (Vec<_>, Vec<_>) = trained.into_iter().unzip();
    let similarity = similarity_matrix(&votes)?;
    EnsembleModel::new(
        qcnn.clone(),
        pca.clone(),
        learners,
        similarity,
        cfg.strategy.clone(),
    )
}
