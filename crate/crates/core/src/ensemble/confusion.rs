use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary confusion counts. Rows are the true class, columns the prediction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tp: u64,
}

impl ConfusionMatrix {
    pub fn new(tn: u64, fp: u64, fn_: u64, tp: u64) -> Self {
        Self { tn, fp, fn_, tp }
    }

    pub fn from_predictions(predictions: &[u8], truths: &[u8]) -> Result<Self> {
        if predictions.len() != truths.len() {
            return Err(Error::arg(format!(
                "{} predictions for {} labels",
                predictions.len(),
                truths.len()
            )));
        }
        let mut cm = Self::default();
        for (&p, &t) in predictions.iter().zip(truths) {
            match (p, t) {
                (0, 0) => cm.tn += 1,
                (1, 0) => cm.fp += 1,
                (0, 1) => cm.fn_ += 1,
                (1, 1) => cm.tp += 1,
                _ => return Err(Error::arg(format!("non-binary pair ({p}, {t})"))),
            }
        }
        Ok(cm)
    }

    pub fn total(&self) -> u64 {
        self.tn + self.fp + self.fn_ + self.tp
    }

    /// `(TN + TP) / total`, or 0 for an empty matrix.
    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            t => (self.tn + self.tp) as f64 / t as f64,
        }
    }
}
