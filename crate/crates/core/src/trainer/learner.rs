use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{LabeledDataset, PcaModel};
use crate::ensemble::ConfusionMatrix;
use crate::error::{Error, Result};
use crate::qcnn::{Qcnn, QcnnArchitecture};
use crate::quantum::Statevector;
use crate::seed::rng_from_seed;

use super::adam::Adam;
use super::encode::{encode_dataset, EncodedSet};
use super::gradient::loss_and_gradient;

/// `P(class 1) >= DECISION_THRESHOLD` predicts class 1 (ties go to 1).
pub const DECISION_THRESHOLD: f64 = 0.5;

pub const LEARNER_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub max_steps: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Initial parameters are uniform in `[-init_scale, init_scale]`.
    pub init_scale: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_steps: 200,
            batch_size: 32,
            learning_rate: 0.05,
            seed: 0,
            init_scale: std::f64::consts::PI,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::arg("batch_size must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::arg("learning_rate must be positive"));
        }
        if !(self.init_scale > 0.0 && self.init_scale.is_finite()) {
            return Err(Error::arg("init_scale must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedLearner {
    /// Text description of the architecture the parameters belong to.
    pub arch: String,
    pub params: Vec<f64>,
    pub train_accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub s_max: Option<f64>,
    pub loss_history: Vec<f64>,
    /// Minibatch accuracy at each step, before the update.
    pub batch_accuracy_history: Vec<f64>,
    /// Training samples skipped because they could not be encoded.
    pub skipped_zero_norm: usize,
}

#[derive(Serialize, Deserialize)]
struct LearnerFile {
    format: String,
    version: u32,
    learner: TrainedLearner,
}

impl TrainedLearner {
    pub fn predict_state(&self, qcnn: &Qcnn, state: Option<&Statevector>) -> Result<u8> {
        match state {
            Some(s) => Ok(u8::from(
                qcnn.forward(&self.params, s)? >= DECISION_THRESHOLD,
            )),
            None => Ok(0),
        }
    }

    pub fn predict_encoded(&self, qcnn: &Qcnn, set: &EncodedSet) -> Result<Vec<u8>> {
        set.samples()
            .iter()
            .map(|s| self.predict_state(qcnn, s.state.as_ref()))
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&LearnerFile {
            format: "qel-learner".into(),
            version: LEARNER_FORMAT_VERSION,
            learner: self.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: LearnerFile = serde_json::from_str(text)?;
        if file.format != "qel-learner" || file.version != LEARNER_FORMAT_VERSION {
            return Err(Error::arg(format!(
                "unsupported learner record {} v{}",
                file.format, file.version
            )));
        }
        Ok(file.learner)
    }

    /// Rebuilds the circuit this learner was trained for.
    pub fn qcnn(&self) -> Result<Qcnn> {
        QcnnArchitecture::from_text(&self.arch)?.compile()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub predictions: Vec<u8>,
    /// Samples predicted 0 because they could not be encoded.
    pub zero_norm: usize,
}

pub fn evaluate_encoded(
    qcnn: &Qcnn,
    learner: &TrainedLearner,
    set: &EncodedSet,
) -> Result<Evaluation> {
    let predictions = learner.predict_encoded(qcnn, set)?;
    let confusion = ConfusionMatrix::from_predictions(&predictions, &set.labels())?;
    let zero_norm = set.zero_norm_count();
    if zero_norm > 0 {
        log::warn!("{zero_norm} unencodable samples predicted as class 0");
    }
    Ok(Evaluation {
        accuracy: confusion.accuracy(),
        confusion,
        predictions,
        zero_norm,
    })
}

pub fn evaluate(
    qcnn: &Qcnn,
    learner: &TrainedLearner,
    dataset: &LabeledDataset,
    pca: &PcaModel,
) -> Result<Evaluation> {
    evaluate_encoded(
        qcnn,
        learner,
        &encode_dataset(dataset, pca, qcnn.n_qubits())?,
    )
}

/// Minibatch Adam on the cross-entropy of `P(readout = 1)`.
///
/// Batches are drawn uniformly with replacement from the encodable samples.
/// Accuracy and confusion are measured on the training subset afterwards.
pub fn train_encoded(
    qcnn: &Qcnn,
    subset: &EncodedSet,
    cfg: &TrainConfig,
) -> Result<TrainedLearner> {
    cfg.validate()?;
    let usable: Vec<(&Statevector, u8)> = subset
        .samples()
        .iter()
        .filter_map(|s| s.state.as_ref().map(|st| (st, s.label)))
        .collect();
    if usable.is_empty() {
        return Err(Error::Training(
            "no sample in the subset can be encoded".into(),
        ));
    }
    let skipped = subset.len() - usable.len();
    if skipped > 0 {
        log::warn!("skipping {skipped} zero-norm training samples");
    }

    let mut rng = rng_from_seed(cfg.seed);
    let mut params: Vec<f64> = (0..qcnn.total_params())
        .map(|_| rng.gen_range(-cfg.init_scale..=cfg.init_scale))
        .collect();
    let mut opt = Adam::new(params.len(), cfg.learning_rate);
    let mut loss_history = Vec::with_capacity(cfg.max_steps);
    let mut batch_accuracy_history = Vec::with_capacity(cfg.max_steps);
    let mut batch = Vec::with_capacity(cfg.batch_size);
    for _ in 0..cfg.max_steps {
        batch.clear();
        batch.extend((0..cfg.batch_size).map(|_| usable[rng.gen_range(0..usable.len())]));
        let lg = loss_and_gradient(qcnn, &params, &batch)?;
        let correct = lg
            .probabilities
            .iter()
            .zip(&batch)
            .filter(|(&p, &(_, y))| u8::from(p >= DECISION_THRESHOLD) == y)
            .count();
        loss_history.push(lg.loss);
        batch_accuracy_history.push(correct as f64 / batch.len() as f64);
        opt.step(&mut params, &lg.gradient);
    }

    let mut learner = TrainedLearner {
        arch: qcnn.arch().to_text(),
        params,
        train_accuracy: 0.0,
        confusion: ConfusionMatrix::default(),
        s_max: None,
        loss_history,
        batch_accuracy_history,
        skipped_zero_norm: skipped,
    };
    let eval = evaluate_encoded(qcnn, &learner, subset)?;
    learner.train_accuracy = eval.accuracy;
    learner.confusion = eval.confusion;
    Ok(learner)
}

pub fn train(
    qcnn: &Qcnn,
    subset: &LabeledDataset,
    pca: &PcaModel,
    cfg: &TrainConfig,
) -> Result<TrainedLearner> {
    train_encoded(qcnn, &encode_dataset(subset, pca, qcnn.n_qubits())?, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcnn::build_qcnn;
    use crate::trainer::EncodedSample;

    /// Four basis-like inputs split by their first amplitude.
    fn separable() -> (LabeledDataset, PcaModel) {
        let rows = vec![
            vec![1.0, 0.2, 0.0, 0.0],
            vec![0.9, -0.3, 0.1, 0.0],
            vec![0.0, 0.1, 1.0, 0.2],
            vec![0.1, 0.0, 0.8, -0.3],
        ];
        let d = LabeledDataset::from_parts(rows, vec![0, 0, 1, 1]).unwrap();
        let identity: Vec<Vec<f64>> = (0..16)
            .map(|i| (0..16).map(|j| f64::from(u8::from(i == j))).collect())
            .collect();
        let pca = PcaModel::from_parts(vec![0.0; 16], identity).unwrap();
        let padded: Vec<Vec<f64>> = d
            .samples()
            .iter()
            .map(|s| {
                let mut v = s.features.clone();
                v.resize(16, 0.0);
                v
            })
            .collect();
        (
            LabeledDataset::from_parts(padded, d.labels().collect()).unwrap(),
            pca,
        )
    }

    #[test]
    fn fits_a_separable_toy_set() {
        let q = build_qcnn(4).unwrap();
        let (d, pca) = separable();
        let cfg = TrainConfig {
            seed: 3,
            batch_size: 4,
            ..TrainConfig::default()
        };
        let l = train(&q, &d, &pca, &cfg).unwrap();
        assert_eq!(l.train_accuracy, 1.0);
        assert_eq!(l.loss_history.len(), 200);
        // Convergence sanity: no upward trend over the trailing window.
        let tail = &l.loss_history[150..];
        let first = tail[..10].iter().sum::<f64>() / 10.0;
        let last = tail[tail.len() - 10..].iter().sum::<f64>() / 10.0;
        assert!(last <= first + 1e-9, "{first} -> {last}");
    }

    #[test]
    fn zero_steps_keeps_initialization() {
        let q = build_qcnn(4).unwrap();
        let (d, pca) = separable();
        let cfg = TrainConfig {
            max_steps: 0,
            seed: 9,
            ..TrainConfig::default()
        };
        let l = train(&q, &d, &pca, &cfg).unwrap();
        assert!(l.loss_history.is_empty());
        let mut rng = rng_from_seed(9);
        let init: Vec<f64> = (0..12)
            .map(|_| rng.gen_range(-cfg.init_scale..=cfg.init_scale))
            .collect();
        assert_eq!(l.params, init);
    }

    #[test]
    fn training_is_bit_reproducible() {
        let q = build_qcnn(4).unwrap();
        let (d, pca) = separable();
        let cfg = TrainConfig {
            max_steps: 30,
            seed: 4,
            ..TrainConfig::default()
        };
        let a = train(&q, &d, &pca, &cfg).unwrap();
        let b = train(&q, &d, &pca, &cfg).unwrap();
        assert_eq!(
            a.params.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            b.params.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn zero_norm_samples_are_skipped_then_predicted_zero() {
        let q = build_qcnn(4).unwrap();
        let mut samples = vec![EncodedSample {
            state: None,
            label: 1,
        }];
        let set = EncodedSet::new(samples.clone()).unwrap();
        assert!(matches!(
            train_encoded(&q, &set, &TrainConfig::default()),
            Err(Error::Training(_))
        ));

        samples.push(EncodedSample {
            state: Some(Statevector::zero(4).unwrap()),
            label: 0,
        });
        let set = EncodedSet::new(samples).unwrap();
        let cfg = TrainConfig {
            max_steps: 5,
            ..TrainConfig::default()
        };
        let l = train_encoded(&q, &set, &cfg).unwrap();
        assert_eq!(l.skipped_zero_norm, 1);
        let eval = evaluate_encoded(&q, &l, &set).unwrap();
        assert_eq!(eval.predictions[0], 0);
        assert_eq!(eval.zero_norm, 1);
        assert_eq!(eval.confusion.total(), 2);
    }

    #[test]
    fn confusion_rows_match_class_counts() {
        let q = build_qcnn(4).unwrap();
        let (d, pca) = separable();
        let cfg = TrainConfig {
            max_steps: 3,
            ..TrainConfig::default()
        };
        let l = train(&q, &d, &pca, &cfg).unwrap();
        let eval = evaluate(&q, &l, &d, &pca).unwrap();
        let (zeros, ones) = d.class_counts();
        assert_eq!(eval.confusion.tn + eval.confusion.fp, zeros as u64);
        assert_eq!(eval.confusion.fn_ + eval.confusion.tp, ones as u64);
    }

    #[test]
    fn record_round_trips() {
        let q = build_qcnn(4).unwrap();
        let (d, pca) = separable();
        let cfg = TrainConfig {
            max_steps: 4,
            ..TrainConfig::default()
        };
        let l = train(&q, &d, &pca, &cfg).unwrap();
        let back = TrainedLearner::from_json(&l.to_json().unwrap()).unwrap();
        assert_eq!(back, l);
        assert_eq!(back.qcnn().unwrap(), q);
        assert!(TrainedLearner::from_json(
            &l.to_json()
                .unwrap()
                .replace("\"version\": 1", "\"version\": 9")
        )
        .is_err());
    }

    #[test]
    fn config_validation() {
        let bad = [
            TrainConfig {
                batch_size: 0,
                ..TrainConfig::default()
            },
            TrainConfig {
                learning_rate: 0.0,
                ..TrainConfig::default()
            },
            TrainConfig {
                init_scale: -1.0,
                ..TrainConfig::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err());
        }
    }
}
