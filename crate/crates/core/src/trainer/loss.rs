use crate::error::{Error, Result};

/// Probabilities are clamped to `[PROB_EPS, 1 - PROB_EPS]` before the log.
pub const PROB_EPS: f64 = 1e-10;

fn clamp(p: f64) -> f64 {
    p.clamp(PROB_EPS, 1.0 - PROB_EPS)
}

/// Mean binary cross-entropy.
pub fn loss(probabilities: &[f64], labels: &[u8]) -> Result<f64> {
    if probabilities.is_empty() {
        return Err(Error::arg("loss of an empty batch"));
    }
    if probabilities.len() != labels.len() {
        return Err(Error::arg(format!(
            "{} probabilities for {} labels",
            probabilities.len(),
            labels.len()
        )));
    }
    let total: f64 = probabilities
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = clamp(p);
            if y == 1 {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum();
    Ok(total / probabilities.len() as f64)
}

/// `d/dp` of one sample's cross-entropy, zero where the clamp is active.
pub fn bce_derivative(p: f64, label: u8) -> f64 {
    if !(PROB_EPS..=1.0 - PROB_EPS).contains(&p) {
        return 0.0;
    }
    if label == 1 {
        -1.0 / p
    } else {
        1.0 / (1.0 - p)
    }
}
