use serde::{Deserialize, Serialize};

use super::output::{write_bytes, write_csv, Manifest, OutputFile, SeedRecord};
use super::ExperimentConfig;
use crate::data::{
    bootstrap_indices, fit_pca, load_mnist, split, subsample_indices, LabeledDataset, PcaModel,
};
use crate::ensemble::{build_ensemble_encoded, BuildConfig, EnsembleModel, Strategy};
use crate::error::{Error, Result};
use crate::qcnn::{Qcnn, QcnnArchitecture};
use crate::seed::{derive_seed, Purpose};
use crate::trainer::{
    encode_dataset, evaluate_encoded, train_encoded, EncodedSet, TrainConfig, TrainedLearner,
};

fn accuracy(predictions: &[u8], labels: &[u8]) -> f64 {
    let hits = predictions
        .iter()
        .zip(labels)
        .filter(|(p, y)| p == y)
        .count();
    hits as f64 / labels.len() as f64
}

/// Mean and population variance.
fn mean_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// Loaded, split, and encoded data for one configuration, shared by every
/// experiment that runs on it.
pub struct Workbench {
    cfg: ExperimentConfig,
    qcnn: Qcnn,
    pca: PcaModel,
    train: EncodedSet,
    test: EncodedSet,
    seeds: SeedRecord,
}

impl Workbench {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let full = load_mnist(&cfg.train_images, &cfg.train_labels, cfg.digits)?;
        let mut seeds = SeedRecord {
            master: cfg.master_seed,
            ..SeedRecord::default()
        };
        let (train, test) = match (&cfg.test_images, &cfg.test_labels) {
            (Some(images), Some(labels)) => (full, load_mnist(images, labels, cfg.digits)?),
            _ => {
                let s = derive_seed(cfg.master_seed, Purpose::Split, 0);
                seeds.split = Some(s);
                split(&full, cfg.test_fraction, s)?
            }
        };
        Self::from_datasets(cfg, &train, &test, seeds)
    }

    /// Workbench over datasets that are already in memory.
    pub fn from_datasets(
        cfg: &ExperimentConfig,
        train: &LabeledDataset,
        test: &LabeledDataset,
        seeds: SeedRecord,
    ) -> Result<Self> {
        cfg.validate()?;
        let qcnn = QcnnArchitecture::standard(cfg.n_qubits)?.compile()?;
        let pca = fit_pca(train, 1 << cfg.n_qubits)?;
        log::info!(
            "{} training and {} test samples, {} trainable parameters",
            train.len(),
            test.len(),
            qcnn.total_params()
        );
        Ok(Self {
            cfg: cfg.clone(),
            train: encode_dataset(train, &pca, cfg.n_qubits)?,
            test: encode_dataset(test, &pca, cfg.n_qubits)?,
            qcnn,
            pca,
            seeds,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    pub fn qcnn(&self) -> &Qcnn {
        &self.qcnn
    }

    pub fn pca(&self) -> &PcaModel {
        &self.pca
    }

    pub fn train_set(&self) -> &EncodedSet {
        &self.train
    }

    pub fn test_set(&self) -> &EncodedSet {
        &self.test
    }

    fn build_config(&self) -> BuildConfig {
        BuildConfig {
            n_learners: self.cfg.n_learners,
            bootstrap_fraction: self.cfg.bootstrap_fraction,
            master_seed: self.cfg.master_seed,
            train: self.cfg.train.clone(),
            strategy: self.cfg.strategy.clone(),
        }
    }

    fn ensemble_seeds(&self, seeds: &mut SeedRecord) {
        let m = self.cfg.master_seed;
        seeds.probe = Some(derive_seed(m, Purpose::Probe, 0));
        seeds.bootstrap = (0..self.cfg.n_learners as u64)
            .map(|i| derive_seed(m, Purpose::Bootstrap, i))
            .collect();
        seeds.learner_init = (0..self.cfg.n_learners as u64)
            .map(|i| derive_seed(m, Purpose::LearnerInit, i))
            .collect();
    }

    /// The full bagged ensemble of `n_learners` learners.
    pub fn train_ensemble(&self) -> Result<EnsembleModel> {
        build_ensemble_encoded(&self.qcnn, &self.train, &self.pca, &self.build_config())
    }

    /// One learner trained on the whole training set.
    pub fn train_single(&self) -> Result<TrainedLearner> {
        let cfg = TrainConfig {
            seed: derive_seed(self.cfg.master_seed, Purpose::SingleInit, 0),
            ..self.cfg.train.clone()
        };
        train_encoded(&self.qcnn, &self.train, &cfg)
    }

    /// Test accuracy of each configured strategy at each ladder size, using
    /// prefixes of `ensemble`.
    pub fn size_sweep(&self, ensemble: &EnsembleModel) -> Result<SweepReport> {
        let votes = ensemble.learner_votes(&self.test)?;
        let labels = self.test.labels();
        let mut rows = Vec::new();
        for &n in &self.cfg.ladder {
            let sub = ensemble.prefix(n)?;
            for &strategy in &self.cfg.strategies {
                let pred = sub.combine_votes(&votes, strategy)?;
                rows.push(SweepRow {
                    strategy,
                    n_learners: n,
                    accuracy: accuracy(&pred, &labels),
                });
            }
        }
        Ok(SweepReport { rows })
    }

    /// Seeds of the trial subsamples.
    pub fn trial_seeds(&self) -> Vec<u64> {
        (0..self.cfg.n_trials as u64)
            .map(|t| derive_seed(self.cfg.master_seed, Purpose::Trial, t))
            .collect()
    }

    /// Accuracy of the single learner and of each strategy on `n_trials`
    /// random test subsamples. Every method sees the same subsamples.
    pub fn repeated_eval(
        &self,
        single: &TrainedLearner,
        ensemble: &EnsembleModel,
    ) -> Result<RepeatReport> {
        let size = self.cfg.trial_sample_size;
        if size > self.test.len() {
            return Err(Error::arg(format!(
                "trial size {size} exceeds the test pool of {}",
                self.test.len()
            )));
        }
        let labels = self.test.labels();
        let mut methods = vec![(
            "single".to_string(),
            single.predict_encoded(&self.qcnn, &self.test)?,
        )];
        let votes = ensemble.learner_votes(&self.test)?;
        for &s in &self.cfg.strategies {
            methods.push((s.name().to_string(), ensemble.combine_votes(&votes, s)?));
        }
        let trials = self
            .trial_seeds()
            .into_iter()
            .map(|seed| subsample_indices(self.test.len(), size, seed))
            .collect::<Result<Vec<_>>>()?;
        let methods = methods
            .into_iter()
            .map(|(method, pred)| {
                let trial_accuracies: Vec<f64> = trials
                    .iter()
                    .map(|idx| {
                        let hits = idx.iter().filter(|&&i| pred[i] == labels[i]).count();
                        hits as f64 / idx.len() as f64
                    })
                    .collect();
                let (mean, variance) = mean_variance(&trial_accuracies);
                MethodSummary {
                    test_accuracy: accuracy(&pred, &labels),
                    method,
                    trial_accuracies,
                    mean,
                    variance,
                }
            })
            .collect();
        Ok(RepeatReport { methods })
    }

    /// Training curves of a full-data learner and of the first bootstrap learner.
    pub fn single_vs_base(&self) -> Result<SingleVsBaseReport> {
        let m = self.cfg.master_seed;
        let full = self.train_single()?;
        let idx = bootstrap_indices(
            self.train.len(),
            self.cfg.bootstrap_fraction,
            derive_seed(m, Purpose::Bootstrap, 0),
        )?;
        let cfg = TrainConfig {
            seed: derive_seed(m, Purpose::LearnerInit, 0),
            ..self.cfg.train.clone()
        };
        let base = train_encoded(&self.qcnn, &self.train.select(&idx)?, &cfg)?;
        Ok(SingleVsBaseReport {
            full_test_accuracy: evaluate_encoded(&self.qcnn, &full, &self.test)?.accuracy,
            base_test_accuracy: evaluate_encoded(&self.qcnn, &base, &self.test)?.accuracy,
            full,
            base,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub strategy: Strategy,
    pub n_learners: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn accuracy(&self, strategy: Strategy, n_learners: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.strategy == strategy && r.n_learners == n_learners)
            .map(|r| r.accuracy)
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.strategy.to_string(),
                    r.n_learners.to_string(),
                    r.accuracy.to_string(),
                ]
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    /// `single` or a strategy name.
    pub method: String,
    /// Accuracy on the whole test set.
    pub test_accuracy: f64,
    pub trial_accuracies: Vec<f64>,
    pub mean: f64,
    /// Population variance of the trial accuracies.
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatReport {
    pub methods: Vec<MethodSummary>,
}

impl RepeatReport {
    pub fn method(&self, name: &str) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == name)
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for m in &self.methods {
            for (t, a) in m.trial_accuracies.iter().enumerate() {
                rows.push(vec![
                    m.method.clone(),
                    t.to_string(),
                    a.to_string(),
                    String::new(),
                ]);
            }
            rows.push(vec![
                m.method.clone(),
                "mean".into(),
                m.mean.to_string(),
                m.variance.to_string(),
            ]);
        }
        rows
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleVsBaseReport {
    pub full: TrainedLearner,
    pub base: TrainedLearner,
    pub full_test_accuracy: f64,
    pub base_test_accuracy: f64,
}

impl SingleVsBaseReport {
    fn csv_rows(&self) -> Vec<Vec<String>> {
        (0..self.full.loss_history.len())
            .map(|i| {
                vec![
                    (i + 1).to_string(),
                    self.full.loss_history[i].to_string(),
                    self.full.batch_accuracy_history[i].to_string(),
                    self.base.loss_history[i].to_string(),
                    self.base.batch_accuracy_history[i].to_string(),
                ]
            })
            .collect()
    }
}

fn save_model(wb: &Workbench, ensemble: &EnsembleModel) -> Result<OutputFile> {
    write_bytes(
        &wb.cfg.output_dir,
        "ensemble.json",
        ensemble.to_json()?.as_bytes(),
    )
}

/// Accuracy against ensemble size for every strategy. Writes `sweep.csv`,
/// `ensemble.json` and `sweep.manifest.json`.
pub fn run_size_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let wb = Workbench::new(cfg)?;
    let ensemble = wb.train_ensemble()?;
    let report = wb.size_sweep(&ensemble)?;
    let mut seeds = wb.seeds.clone();
    wb.ensemble_seeds(&mut seeds);
    let csv = write_csv(
        &cfg.output_dir,
        "sweep.csv",
        &["strategy", "n_learners", "accuracy"],
        &report.csv_rows(),
    )?;
    let model = save_model(&wb, &ensemble)?;
    Manifest::new("sweep", cfg, seeds, vec![csv, model]).write(&cfg.output_dir)?;
    Ok(report)
}

/// Mean and variance of accuracy over repeated test subsamples. Writes
/// `repeat.csv`, `ensemble.json` and `repeat.manifest.json`.
pub fn run_repeated_eval(cfg: &ExperimentConfig) -> Result<RepeatReport> {
    let wb = Workbench::new(cfg)?;
    let single = wb.train_single()?;
    let ensemble = wb.train_ensemble()?;
    let report = wb.repeated_eval(&single, &ensemble)?;
    let mut seeds = wb.seeds.clone();
    wb.ensemble_seeds(&mut seeds);
    seeds.single_init = Some(derive_seed(cfg.master_seed, Purpose::SingleInit, 0));
    seeds.trials = wb.trial_seeds();
    let csv = write_csv(
        &cfg.output_dir,
        "repeat.csv",
        &["method", "trial", "accuracy", "variance"],
        &report.csv_rows(),
    )?;
    let model = save_model(&wb, &ensemble)?;
    Manifest::new("repeat", cfg, seeds, vec![csv, model]).write(&cfg.output_dir)?;
    Ok(report)
}

/// Per-step curves of a full-data learner and a bootstrap learner. Writes
/// `single_vs_base.csv` and `single_vs_base.manifest.json`.
pub fn run_single_vs_base(cfg: &ExperimentConfig) -> Result<SingleVsBaseReport> {
    let wb = Workbench::new(cfg)?;
    let report = wb.single_vs_base()?;
    let m = cfg.master_seed;
    let mut seeds = wb.seeds.clone();
    seeds.single_init = Some(derive_seed(m, Purpose::SingleInit, 0));
    seeds.bootstrap = vec![derive_seed(m, Purpose::Bootstrap, 0)];
    seeds.learner_init = vec![derive_seed(m, Purpose::LearnerInit, 0)];
    let csv = write_csv(
        &cfg.output_dir,
        "single_vs_base.csv",
        &[
            "step",
            "full_loss",
            "full_accuracy",
            "base_loss",
            "base_accuracy",
        ],
        &report.csv_rows(),
    )?;
    Manifest::new("single_vs_base", cfg, seeds, vec![csv]).write(&cfg.output_dir)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variance_formula() {
        let (m, v) = mean_variance(&[0.8, 1.0]);
        assert!((m - 0.9).abs() < 1e-15);
        assert!((v - 0.01).abs() < 1e-15);
        assert_eq!(mean_variance(&[0.7; 5]), (0.7, 0.0));
    }

    #[test]
    fn accuracy_counts_matches() {
        assert_eq!(accuracy(&[0, 1, 1, 0], &[0, 1, 0, 0]), 0.75);
    }
}
