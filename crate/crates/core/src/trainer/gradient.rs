//! Exact loss gradients by the parameter-shift rule.
//!
//! A slot that drives several gates gets the sum of the per-gate shift
//! derivatives (product rule), each gate shifted on its own. Every shifted
//! evaluation restarts from the cached state just before the shifted gate.

use crate::error::{Error, Result};
use crate::qcnn::Qcnn;
use crate::quantum::Statevector;

use super::loss::{bce_derivative, loss};

#[derive(Debug, Clone, PartialEq)]
pub struct LossAndGradient {
    pub loss: f64,
    pub gradient: Vec<f64>,
    pub probabilities: Vec<f64>,
}

/// `P(readout = 1)` and its gradient with respect to every slot.
fn prob_and_gradient(
    qcnn: &Qcnn,
    params: &[f64],
    input: &Statevector,
    grad: &mut [f64],
) -> Result<f64> {
    let circuit = qcnn.circuit();
    let readout = qcnn.readout_qubit();
    let gates = circuit.gates();

    let mut before = Vec::with_capacity(gates.len());
    let mut state = input.clone();
    for (i, g) in gates.iter().enumerate() {
        before.push(state.clone());
        let theta = g.slot().map(|s| params[s]);
        state.apply_in_place(g, theta)?;
        debug_assert_eq!(before.len(), i + 1);
    }
    let p = state.prob_one(readout)?;

    for (j, g) in gates.iter().enumerate() {
        let Some(slot) = g.slot() else { continue };
        let mut d = 0.0;
        for term in g.kind().shift_rule() {
            let mut s = before[j].clone();
            s.apply_in_place(g, Some(params[slot] + term.shift))?;
            circuit.apply_range(params, j + 1, &mut s);
            d += term.coeff * s.prob_one(readout)?;
        }
        grad[slot] += d;
    }
    Ok(p)
}

/// Mean cross-entropy over `batch` and its parameter-shift gradient.
pub fn loss_and_gradient(
    qcnn: &Qcnn,
    params: &[f64],
    batch: &[(&Statevector, u8)],
) -> Result<LossAndGradient> {
    if batch.is_empty() {
        return Err(Error::arg("gradient of an empty batch"));
    }
    qcnn.circuit().check_params(params)?;
    let n = batch.len() as f64;
    let mut gradient = vec![0.0; params.len()];
    let mut sample_grad = vec![0.0; params.len()];
    let mut probabilities = Vec::with_capacity(batch.len());
    let mut labels = Vec::with_capacity(batch.len());
    for &(state, label) in batch {
        qcnn.circuit().check_input(state)?;
        sample_grad.iter_mut().for_each(|g| *g = 0.0);
        let p = prob_and_gradient(qcnn, params, state, &mut sample_grad)?;
        let outer = bce_derivative(p, label) / n;
        for (g, s) in gradient.iter_mut().zip(&sample_grad) {
            *g += outer * s;
        }
        probabilities.push(p);
        labels.push(label);
    }
    Ok(LossAndGradient {
        loss: loss(&probabilities, &labels)?,
        gradient,
        probabilities,
    })
}

pub fn gradient(qcnn: &Qcnn, params: &[f64], batch: &[(&Statevector, u8)]) -> Result<Vec<f64>> {
    Ok(loss_and_gradient(qcnn, params, batch)?.gradient)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcnn::{build_qcnn, PoolUnit, QcnnArchitecture};
    use crate::quantum::{Complex64, Gate, GateKind};
    use rand::{Rng, SeedableRng};

    fn random_real_state(n: usize, rng: &mut impl Rng) -> Statevector {
        let amps: Vec<f64> = (0..1 << n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        Statevector::from_amplitudes(amps.iter().map(|a| Complex64::new(a / norm, 0.0)).collect())
            .unwrap()
    }

    fn batch_loss(q: &Qcnn, params: &[f64], batch: &[(&Statevector, u8)]) -> f64 {
        let probs: Vec<f64> = batch
            .iter()
            .map(|(s, _)| q.forward(params, s).unwrap())
            .collect();
        let labels: Vec<u8> = batch.iter().map(|b| b.1).collect();
        loss(&probs, &labels).unwrap()
    }

    #[test]
    fn batch_gradient_is_mean_of_single_gradients() {
        let q = build_qcnn(4).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        let params: Vec<f64> = (0..12).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let (a, b) = (
            random_real_state(4, &mut rng),
            random_real_state(4, &mut rng),
        );
        let both = gradient(&q, &params, &[(&a, 1), (&b, 0)]).unwrap();
        let ga = gradient(&q, &params, &[(&a, 1)]).unwrap();
        let gb = gradient(&q, &params, &[(&b, 0)]).unwrap();
        for k in 0..12 {
            assert!((both[k] - (ga[k] + gb[k]) / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn balanced_half_probability_cancels() {
        // One RY(θ) then readout: p = sin²(θ/2) = 1/2 at θ = π/2. Labels 1 and 0
        // on the same state give derivatives -2 and +2 that cancel.
        let arch = QcnnArchitecture {
            n_qubits: 2,
            conv_unit: crate::qcnn::ConvUnit::RyCnot,
            pool_unit: PoolUnit::Controlled,
            layers: vec![crate::qcnn::Layer {
                conv: vec![(0, 1)],
                share_conv: false,
                pool: vec![(0, 1)],
                share_pool: false,
            }],
        };
        let q = arch.compile().unwrap();
        let s = Statevector::zero(2).unwrap();
        let params = [0.0, std::f64::consts::FRAC_PI_2, 0.0, 0.0];
        assert!((q.forward(&params, &s).unwrap() - 0.5).abs() < 1e-12);
        let g = gradient(&q, &params, &[(&s, 1), (&s, 0)]).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-8), "{g:?}");
    }

    #[test]
    fn controlled_rotation_uses_four_term_rule() {
        // The two-term rule is wrong for CRX: check the shift derivative of
        // P(target=1) against the closed form for a control in |1⟩.
        let c = crate::quantum::ParameterizedCircuit::new(
            2,
            1,
            vec![
                Gate::new(GateKind::X, &[0], None).unwrap(),
                Gate::new(GateKind::CRX, &[0, 1], Some(0)).unwrap(),
            ],
        )
        .unwrap();
        let theta: f64 = 0.7;
        let f = |t: f64| {
            c.run(&[t], &Statevector::zero(2).unwrap())
                .unwrap()
                .prob_one(1)
                .unwrap()
        };
        let exact = 0.5 * theta.sin();
        let four: f64 = GateKind::CRX
            .shift_rule()
            .iter()
            .map(|t| t.coeff * f(theta + t.shift))
            .sum();
        assert!((four - exact).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let q = build_qcnn(4).unwrap();
        assert!(gradient(&q, &[0.0; 12], &[]).is_err());
        let s = Statevector::zero(4).unwrap();
        assert!(gradient(&q, &[0.0; 11], &[(&s, 1)]).is_err());
        let wide = Statevector::zero(6).unwrap();
        assert!(gradient(&q, &[0.0; 12], &[(&wide, 1)]).is_err());
    }

    #[test]
    fn loss_matches_direct_evaluation() {
        let q = build_qcnn(4).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(2);
        let params: Vec<f64> = (0..12).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let s: Vec<Statevector> = (0..3).map(|_| random_real_state(4, &mut rng)).collect();
        let batch = [(&s[0], 1), (&s[1], 0), (&s[2], 1)];
        let lg = loss_and_gradient(&q, &params, &batch).unwrap();
        assert!((lg.loss - batch_loss(&q, &params, &batch)).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_central_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for n in [4, 6] {
            let q = build_qcnn(n).unwrap();
            for _ in 0..3 {
                let params: Vec<f64> = (0..q.total_params())
                    .map(|_| rng.gen_range(-3.0..3.0))
                    .collect();
                let s: Vec<Statevector> = (0..2).map(|_| random_real_state(n, &mut rng)).collect();
                let batch = [(&s[0], 0), (&s[1], 1)];
                let g = gradient(&q, &params, &batch).unwrap();
                for k in 0..params.len() {
                    let (mut up, mut dn) = (params.clone(), params.clone());
                    up[k] += 1e-5;
                    dn[k] -= 1e-5;
                    let fd = (batch_loss(&q, &up, &batch) - batch_loss(&q, &dn, &batch)) / 2e-5;
                    assert!((g[k] - fd).abs() < 1e-7, "n={n} k={k}: {} vs {fd}", g[k]);
                }
            }
        }
    }
}
