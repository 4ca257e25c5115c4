use crate::error::{Error, Result};

/// Probability that a majority of `n` independent voters, each correct with
/// probability `p`, is wrong: `sum_{k=0}^{n/2} C(n,k) p^k (1-p)^(n-k)`.
///
/// Only odd `n` is accepted so that no vote can tie.
pub fn ensemble_error_rate(p: f64, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::arg(format!("accuracy {p} outside [0, 1]")));
    }
    if n.is_multiple_of(2) {
        return Err(Error::arg(format!("voter count must be odd, got {n}")));
    }
    let mut binom = 1.0_f64;
    let mut sum = 0.0;
    for k in 0..=n / 2 {
        if k > 0 {
            binom = binom * (n - k + 1) as f64 / k as f64;
        }
        sum += binom * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
    }
    Ok(sum)
}

/// Range of agreement rates attainable by two classifiers with accuracies
/// `acc1 <= acc2`, clamped to `[0, 1]`.
pub fn similarity_interval(acc1: f64, acc2: f64) -> Result<(f64, f64)> {
    if !(0.5 <= acc1 && acc1 <= acc2 && acc2 <= 1.0) {
        return Err(Error::arg(format!(
            "need 0.5 <= acc1 <= acc2 <= 1, got ({acc1}, {acc2})"
        )));
    }
    let slack = 1.0 - acc2;
    Ok((
        (acc1 - slack).clamp(0.0, 1.0),
        (acc1 + slack).clamp(0.0, 1.0),
    ))
}
