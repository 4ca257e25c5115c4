use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::ensemble::{Strategy, StrategyConfig};
use crate::error::{Error, Result};
use crate::trainer::TrainConfig;

/// Everything an experiment run depends on.
///
/// Without explicit test files the test set is split off the training file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub train_images: PathBuf,
    pub train_labels: PathBuf,
    pub test_images: Option<PathBuf>,
    pub test_labels: Option<PathBuf>,
    pub digits: (u8, u8),
    pub test_fraction: f64,
    pub n_qubits: usize,
    pub n_learners: usize,
    /// Ensemble sizes reported by the sweep; each a prefix of the full ensemble.
    pub ladder: Vec<usize>,
    pub strategies: Vec<Strategy>,
    pub bootstrap_fraction: f64,
    pub train: TrainConfig,
    pub strategy: StrategyConfig,
    pub n_trials: usize,
    pub trial_sample_size: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            train_images: "data/mnist/train-images-idx3-ubyte".into(),
            train_labels: "data/mnist/train-labels-idx1-ubyte".into(),
            test_images: None,
            test_labels: None,
            digits: (0, 1),
            test_fraction: 0.2,
            n_qubits: 4,
            n_learners: 20,
            ladder: vec![5, 10, 15, 20],
            strategies: Strategy::ALL.to_vec(),
            bootstrap_fraction: 0.2,
            train: TrainConfig::default(),
            strategy: StrategyConfig::default(),
            n_trials: 10,
            trial_sample_size: 1000,
            master_seed: 0,
            output_dir: "out".into(),
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::arg(format!("`{key}`: cannot parse `{value}`")))
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| num(key, s))
        .collect()
}

impl ExperimentConfig {
    /// Keys accepted by [`set`](Self::set), in documentation order.
    pub const KEYS: &'static [&'static str] = &[
        "train-images",
        "train-labels",
        "test-images",
        "test-labels",
        "digits",
        "test-fraction",
        "qubits",
        "learners",
        "ladder",
        "strategies",
        "bootstrap-fraction",
        "steps",
        "batch-size",
        "learning-rate",
        "init-scale",
        "s-threshold",
        "accuracy-threshold",
        "log-base",
        "similarity-sample-size",
        "trials",
        "trial-size",
        "seed",
        "output",
    ];

    /// Set one field from its textual key and value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "train-images" => self.train_images = v.into(),
            "train-labels" => self.train_labels = v.into(),
            "test-images" => self.test_images = Some(v.into()),
            "test-labels" => self.test_labels = Some(v.into()),
            "digits" => {
                let d: Vec<u8> = list(key, v)?;
                match d[..] {
                    [a, b] => self.digits = (a, b),
                    _ => return Err(Error::arg(format!("`digits` needs two values, got `{v}`"))),
                }
            }
            "test-fraction" => self.test_fraction = num(key, v)?,
            "qubits" => self.n_qubits = num(key, v)?,
            "learners" => self.n_learners = num(key, v)?,
            "ladder" => self.ladder = list(key, v)?,
            "strategies" => self.strategies = list(key, v)?,
            "bootstrap-fraction" => self.bootstrap_fraction = num(key, v)?,
            "steps" => self.train.max_steps = num(key, v)?,
            "batch-size" => self.train.batch_size = num(key, v)?,
            "learning-rate" => self.train.learning_rate = num(key, v)?,
            "init-scale" => self.train.init_scale = num(key, v)?,
            "s-threshold" => self.strategy.s_threshold = num(key, v)?,
            "accuracy-threshold" => self.strategy.accuracy_threshold = num(key, v)?,
            "log-base" => self.strategy.log_base = num(key, v)?,
            "similarity-sample-size" => self.strategy.similarity_sample_size = num(key, v)?,
            "trials" => self.n_trials = num(key, v)?,
            "trial-size" => self.trial_sample_size = num(key, v)?,
            "seed" => self.master_seed = num(key, v)?,
            "output" => self.output_dir = v.into(),
            _ => return Err(Error::arg(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Apply `key = value` lines. Blank lines and `#` comments are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::arg(format!("config line {}: expected `key = value`", n + 1))
            })?;
            self.set(k.trim(), v)
                .map_err(|e| Error::arg(format!("config line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.test_images.is_some() != self.test_labels.is_some() {
            return Err(Error::arg("test images and labels must be given together"));
        }
        if self.n_learners == 0 {
            return Err(Error::arg("learners must be at least 1"));
        }
        if self.ladder.is_empty() || self.ladder.iter().any(|&n| n == 0 || n > self.n_learners) {
            return Err(Error::arg(format!(
                "ladder entries must lie in 1..={}",
                self.n_learners
            )));
        }
        if self.strategies.is_empty() {
            return Err(Error::arg("at least one strategy is required"));
        }
        if self.n_trials == 0 || self.trial_sample_size == 0 {
            return Err(Error::arg("trials and trial-size must be at least 1"));
        }
        self.train.validate()?;
        self.strategy.validate()
    }
}
