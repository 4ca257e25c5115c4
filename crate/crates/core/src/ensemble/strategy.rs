use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ConfusionMatrix;
use crate::error::{Error, Result};
use crate::trainer::TrainedLearner;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    Natural,
    Base10,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Base10 => x.log10(),
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LogBase::Natural => "natural",
            LogBase::Base10 => "base10",
        })
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" | "e" | "ln" => Ok(LogBase::Natural),
            "base10" | "10" => Ok(LogBase::Base10),
            _ => Err(Error::arg(format!("unknown log base `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    /// Similarity above which a learner is penalized.
    pub s_threshold: f64,
    /// Accuracy above which the penalty factor is `S_max` instead of `-log S_max`.
    pub accuracy_threshold: f64,
    pub log_base: LogBase,
    /// Size of the probe set used for similarity and per-learner scores.
    pub similarity_sample_size: usize,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        Self {
            s_threshold: 0.9,
            accuracy_threshold: 0.92,
            log_base: LogBase::Natural,
            similarity_sample_size: 500,
        }
    }
}

impl StrategyConfig {
    pub fn validate(&self) -> Result<()> {
        let open = |x: f64| x > 0.0 && x < 1.0;
        if !open(self.s_threshold) || !open(self.accuracy_threshold) {
            return Err(Error::arg("strategy thresholds must lie in (0, 1)"));
        }
        if self.similarity_sample_size == 0 {
            return Err(Error::arg("similarity_sample_size must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Majority,
    AccuracyWeighted,
    ConfusionMatrix,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::Majority,
        Strategy::AccuracyWeighted,
        Strategy::ConfusionMatrix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Majority => "majority",
            Strategy::AccuracyWeighted => "accuracy-weighted",
            Strategy::ConfusionMatrix => "confusion-matrix",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::arg(format!("unknown strategy `{s}`")))
    }
}

/// One learner's vote on one input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VotingRecord {
    pub learner_index: usize,
    pub predicted_class: u8,
    pub weight: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Confusion-matrix vote weight with the similarity penalty.
///
/// For a vote of 0 the base is `acc * (TN/(TN+FN) + TN/(TN+FP))`, for a vote
/// of 1 it is `acc * (TP/(TP+FP) + TP/(TP+FN))`. When `s_max` exceeds the
/// similarity threshold the base is multiplied by `-log(s_max)`, or by
/// `s_max` itself for learners above the accuracy threshold. Ratios with a
/// zero denominator count as 0.
pub fn confusion_weight(
    accuracy: f64,
    confusion: &ConfusionMatrix,
    s_max: Option<f64>,
    predicted_class: u8,
    cfg: &StrategyConfig,
) -> Result<f64> {
    if confusion.total() == 0 {
        return Err(Error::Weighting("confusion matrix is empty".into()));
    }
    let ConfusionMatrix { tn, fp, fn_, tp } = *confusion;
    let base = match predicted_class {
        0 => accuracy * (ratio(tn, tn + fn_) + ratio(tn, tn + fp)),
        1 => accuracy * (ratio(tp, tp + fp) + ratio(tp, tp + fn_)),
        c => return Err(Error::arg(format!("non-binary class {c}"))),
    };
    let factor = match s_max {
        Some(s) if s > cfg.s_threshold => {
            if accuracy <= cfg.accuracy_threshold {
                // -log(1) is -0.0; the weight is a plain zero.
                (-cfg.log_base.log(s)).max(0.0)
            } else {
                s
            }
        }
        _ => 1.0,
    };
    Ok(base * factor)
}

/// [`confusion_weight`] using the learner's recorded score and `s_max`.
pub fn vote_weight(
    learner: &TrainedLearner,
    predicted_class: u8,
    cfg: &StrategyConfig,
) -> Result<f64> {
    confusion_weight(
        learner.train_accuracy,
        &learner.confusion,
        learner.s_max,
        predicted_class,
        cfg,
    )
}

/// Class with the larger total weight; an exact tie goes to class 0.
pub fn combine(records: &[VotingRecord]) -> Result<u8> {
    if records.is_empty() {
        return Err(Error::arg("no votes to combine"));
    }
    let mut totals = [0.0_f64; 2];
    for r in records {
        if r.predicted_class > 1 {
            return Err(Error::arg(format!(
                "non-binary class {}",
                r.predicted_class
            )));
        }
        if r.weight.is_nan() || r.weight < 0.0 {
            return Err(Error::Weighting(format!(
                "learner {} has weight {}",
                r.learner_index, r.weight
            )));
        }
        totals[usize::from(r.predicted_class)] += r.weight;
    }
    Ok(u8::from(totals[1] > totals[0]))
}
