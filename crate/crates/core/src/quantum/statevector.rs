use num_complex::Complex64;

use super::{Gate, NORM_TOL};
use crate::data::FeatureVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    amplitudes: Vec<Complex64>,
    n_qubits: usize,
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::arg(format!(
            "amplitude count {len} is not a power of two >= 2"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

impl Statevector {
    /// `|0...0⟩` on `n_qubits`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits >= usize::BITS as usize {
            return Err(Error::arg(format!("unsupported qubit count {n_qubits}")));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::arg(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            amplitudes,
            n_qubits,
        })
    }

    /// Wraps amplitudes that are already unit norm.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        let sv = Self {
            amplitudes,
            n_qubits,
        };
        let norm = sv.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::arg(format!("state norm is {norm}, expected 1")));
        }
        Ok(sv)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub(crate) fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    pub fn prob_one(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.n_qubits {
            return Err(Error::arg(format!(
                "qubit {qubit} out of range for {} qubits",
                self.n_qubits
            )));
        }
        let mask = self.mask(qubit);
        let p: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        Ok(p.clamp(0.0, 1.0))
    }

    pub fn apply(&self, gate: &Gate, theta: Option<f64>) -> Result<Self> {
        let mut out = self.clone();
        out.apply_in_place(gate, theta)?;
        Ok(out)
    }

    pub fn apply_in_place(&mut self, gate: &Gate, theta: Option<f64>) -> Result<()> {
        gate.check_qubits(self.n_qubits)?;
        match (gate.is_parametric(), theta) {
            (true, None) => return Err(Error::arg(format!("{} needs an angle", gate.kind()))),
            (false, Some(_)) => return Err(Error::arg(format!("{} takes no angle", gate.kind()))),
            _ => {}
        }
        gate.act(&mut self.amplitudes, self.n_qubits, theta.unwrap_or(0.0));
        Ok(())
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }
}

/// Writes `x / ‖x‖` onto the basis amplitudes of `log2(len)` qubits.
pub fn amplitude_encode(x: &FeatureVector) -> Result<Statevector> {
    let n_qubits = qubits_for_len(x.len())?;
    if !x.norm().is_finite() || x.norm() <= 0.0 {
        return Err(Error::Encoding(format!("feature norm is {}", x.norm())));
    }
    let amplitudes = x
        .values()
        .iter()
        .map(|&v| Complex64::new(v / x.norm(), 0.0))
        .collect();
    Ok(Statevector {
        amplitudes,
        n_qubits,
    })
}

/// `P(qubit = 1)`.
pub fn measure_prob(state: &Statevector, qubit: usize) -> Result<f64> {
    state.prob_one(qubit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::GateKind;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn encode_examples() {
        let s = amplitude_encode(&FeatureVector::new(vec![1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(s, Statevector::zero(2).unwrap());

        let s = amplitude_encode(&FeatureVector::new(vec![3.0, 4.0])).unwrap();
        assert_eq!(s.n_qubits(), 1);
        assert!((s.amplitudes()[0].re - 0.6).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - 0.8).abs() < 1e-15);
        let p = s.probabilities();
        assert!((p[0] - 0.36).abs() < 1e-12 && (p[1] - 0.64).abs() < 1e-12);
        assert!((measure_prob(&s, 0).unwrap() - 0.64).abs() < 1e-12);

        assert!(matches!(
            amplitude_encode(&FeatureVector::new(vec![0.0; 4])),
            Err(Error::Encoding(_))
        ));
        assert!(matches!(
            amplitude_encode(&FeatureVector::new(vec![1.0, 2.0, 3.0])),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn measure_examples() {
        let z = Statevector::zero(3).unwrap();
        for q in 0..3 {
            assert_eq!(measure_prob(&z, q).unwrap(), 0.0);
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = Statevector::from_amplitudes(vec![c(h), c(0.0), c(0.0), c(h)]).unwrap();
        assert!((measure_prob(&bell, 0).unwrap() - 0.5).abs() < 1e-12);
        assert!(measure_prob(&bell, 2).is_err());
    }

    #[test]
    fn qubit_zero_is_most_significant() {
        let s = Statevector::basis(2, 2).unwrap();
        assert_eq!(measure_prob(&s, 0).unwrap(), 1.0);
        assert_eq!(measure_prob(&s, 1).unwrap(), 0.0);
    }

    #[test]
    fn gate_examples() {
        let zero = Statevector::zero(1).unwrap();
        let h = zero
            .apply(&Gate::new(GateKind::H, &[0], None).unwrap(), None)
            .unwrap();
        assert!((measure_prob(&h, 0).unwrap() - 0.5).abs() < 1e-12);
        assert!((h.amplitudes()[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);

        let ry = Gate::new(GateKind::RY, &[0], Some(0)).unwrap();
        let one = zero.apply(&ry, Some(std::f64::consts::PI)).unwrap();
        assert!((measure_prob(&one, 0).unwrap() - 1.0).abs() < 1e-9);

        let cnot = Gate::new(GateKind::CNOT, &[0, 1], None).unwrap();
        let s = Statevector::basis(2, 0b10)
            .unwrap()
            .apply(&cnot, None)
            .unwrap();
        assert_eq!(s, Statevector::basis(2, 0b11).unwrap());
    }

    #[test]
    fn gate_argument_errors() {
        let s = Statevector::zero(2).unwrap();
        let ry = Gate::new(GateKind::RY, &[0], Some(0)).unwrap();
        assert!(matches!(s.apply(&ry, None), Err(Error::Argument(_))));
        let h = Gate::new(GateKind::H, &[0], None).unwrap();
        assert!(matches!(s.apply(&h, Some(1.0)), Err(Error::Argument(_))));
        let far = Gate::new(GateKind::H, &[2], None).unwrap();
        assert!(matches!(s.apply(&far, None), Err(Error::Argument(_))));
    }

    proptest! {
        #[test]
        fn encode_then_measure_gives_normalized_squares(x in prop::collection::vec(-3.0f64..3.0, 8)) {
            let fv = FeatureVector::new(x.clone());
            prop_assume!(fv.norm() > 1e-6);
            let s = amplitude_encode(&fv).unwrap();
            prop_assert!((s.norm() - 1.0).abs() < 1e-12);
            let sq: f64 = x.iter().map(|v| v * v).sum();
            for q in 0..3 {
                let mask = 1 << (2 - q);
                let want: f64 = x.iter().enumerate().filter(|(i, _)| i & mask != 0).map(|(_, v)| v * v).sum::<f64>() / sq;
                prop_assert!((measure_prob(&s, q).unwrap() - want).abs() < 1e-12);
            }
        }
    }
}
