use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    RX,
    RY,
    RZ,
    H,
    X,
    CNOT,
    CZ,
    CRZ,
    CRX,
}

/// One term of a parameter-shift rule: `coeff * f(θ + shift)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftTerm {
    pub shift: f64,
    pub coeff: f64,
}

const TWO_TERM: [ShiftTerm; 2] = [
    ShiftTerm {
        shift: FRAC_PI_2,
        coeff: 0.5,
    },
    ShiftTerm {
        shift: -FRAC_PI_2,
        coeff: -0.5,
    },
];

// Controlled rotations have generator spectrum {0, ±1/2}, so two shifts do not
// suffice; coefficients are (√2 ± 1) / (4√2).
const C_NEAR: f64 = (SQRT_2 + 1.0) / (4.0 * SQRT_2);
const C_FAR: f64 = (SQRT_2 - 1.0) / (4.0 * SQRT_2);
const FOUR_TERM: [ShiftTerm; 4] = [
    ShiftTerm {
        shift: FRAC_PI_2,
        coeff: C_NEAR,
    },
    ShiftTerm {
        shift: -FRAC_PI_2,
        coeff: -C_NEAR,
    },
    ShiftTerm {
        shift: 3.0 * FRAC_PI_2,
        coeff: -C_FAR,
    },
    ShiftTerm {
        shift: -3.0 * FRAC_PI_2,
        coeff: C_FAR,
    },
];

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::H,
        GateKind::X,
        GateKind::CNOT,
        GateKind::CZ,
        GateKind::CRZ,
        GateKind::CRX,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::H | GateKind::X => 1,
            GateKind::CNOT | GateKind::CZ | GateKind::CRZ | GateKind::CRX => 2,
        }
    }

    pub fn is_parametric(self) -> bool {
        matches!(
            self,
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::CRZ | GateKind::CRX
        )
    }

    /// Exact derivative rule for the gate angle; empty for fixed gates.
    pub fn shift_rule(self) -> &'static [ShiftTerm] {
        match self {
            GateKind::RX | GateKind::RY | GateKind::RZ => &TWO_TERM,
            GateKind::CRX | GateKind::CRZ => &FOUR_TERM,
            _ => &[],
        }
    }

    /// The 2×2 block acting on the target (for controlled kinds, the block
    /// applied when the control is set).
    fn block(self, theta: f64) -> [[Complex64; 2]; 2] {
        let z = Complex64::new(0.0, 0.0);
        let r = |x: f64| Complex64::new(x, 0.0);
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        match self {
            GateKind::RX | GateKind::CRX => [
                [r(c), Complex64::new(0.0, -s)],
                [Complex64::new(0.0, -s), r(c)],
            ],
            GateKind::RY => [[r(c), r(-s)], [r(s), r(c)]],
            GateKind::RZ | GateKind::CRZ => [
                [Complex64::from_polar(1.0, -theta / 2.0), z],
                [z, Complex64::from_polar(1.0, theta / 2.0)],
            ],
            GateKind::H => [
                [r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2)],
                [r(FRAC_1_SQRT_2), r(-FRAC_1_SQRT_2)],
            ],
            GateKind::X | GateKind::CNOT => [[z, r(1.0)], [r(1.0), z]],
            GateKind::CZ => [[r(1.0), z], [z, r(-1.0)]],
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| Error::arg(format!("unknown gate kind {s:?}")))
    }
}

/// A gate placed on concrete qubits. For two-qubit kinds the first qubit is
/// the control.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    kind: GateKind,
    qubits: Vec<usize>,
    slot: Option<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[usize], slot: Option<usize>) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(Error::arg(format!(
                "{kind} acts on {} qubit(s), got {}",
                kind.arity(),
                qubits.len()
            )));
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::arg(format!("{kind} needs distinct qubits")));
        }
        if kind.is_parametric() != slot.is_some() {
            return Err(Error::arg(format!(
                "{kind} {} a parameter slot",
                if kind.is_parametric() {
                    "requires"
                } else {
                    "cannot take"
                }
            )));
        }
        Ok(Self {
            kind,
            qubits: qubits.to_vec(),
            slot,
        })
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn slot(&self) -> Option<usize> {
        self.slot
    }

    pub fn is_parametric(&self) -> bool {
        self.kind.is_parametric()
    }

    pub(crate) fn check_qubits(&self, n_qubits: usize) -> Result<()> {
        match self.qubits.iter().find(|&&q| q >= n_qubits) {
            Some(q) => Err(Error::arg(format!(
                "{} targets qubit {q} but the register has {n_qubits}",
                self.kind
            ))),
            None => Ok(()),
        }
    }

    /// Gate matrix on its own qubits, first listed qubit most significant.
    pub fn local_matrix(&self, theta: f64) -> Vec<Vec<Complex64>> {
        let b = self.kind.block(theta);
        if self.kind.arity() == 1 {
            return b.iter().map(|row| row.to_vec()).collect();
        }
        let mut m = vec![vec![Complex64::new(0.0, 0.0); 4]; 4];
        m[0][0] = Complex64::new(1.0, 0.0);
        m[1][1] = Complex64::new(1.0, 0.0);
        for r in 0..2 {
            for c in 0..2 {
                m[2 + r][2 + c] = b[r][c];
            }
        }
        m
    }

    /// In-place action on a register of `n_qubits`; qubits already validated.
    pub(crate) fn act(&self, amps: &mut [Complex64], n_qubits: usize, theta: f64) {
        let mask = |q: usize| 1usize << (n_qubits - 1 - q);
        match self.kind {
            GateKind::CZ => {
                let m = mask(self.qubits[0]) | mask(self.qubits[1]);
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & m == m {
                        *a = -*a;
                    }
                }
            }
            GateKind::CNOT | GateKind::X => {
                let (ctrl, t) = self.control_and_target(&mask);
                for i in 0..amps.len() {
                    if i & t == 0 && i & ctrl == ctrl {
                        amps.swap(i, i | t);
                    }
                }
            }
            kind => {
                let (ctrl, t) = self.control_and_target(&mask);
                let [[u00, u01], [u10, u11]] = kind.block(theta);
                for i in 0..amps.len() {
                    if i & t == 0 && i & ctrl == ctrl {
                        let j = i | t;
                        let (a, b) = (amps[i], amps[j]);
                        amps[i] = u00 * a + u01 * b;
                        amps[j] = u10 * a + u11 * b;
                    }
                }
            }
        }
    }

    /// (control mask, target mask); control mask is 0 for one-qubit gates.
    fn control_and_target(&self, mask: &impl Fn(usize) -> usize) -> (usize, usize) {
        match self.qubits.as_slice() {
            [t] => (0, mask(*t)),
            [c, t] => (mask(*c), mask(*t)),
            _ => unreachable!("arity checked at construction"),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for q in &self.qubits {
            write!(f, " {q}")?;
        }
        if let Some(s) = self.slot {
            write!(f, " #{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Gate {
    type Err = Error;

    /// Parses the `Display` form, e.g. `CRZ 0 1 #6` or `CNOT 1 2`.
    fn from_str(line: &str) -> Result<Self> {
        let mut parts = line.split_whitespace();
        let kind: GateKind = parts
            .next()
            .ok_or_else(|| Error::arg("empty gate line"))?
            .parse()?;
        let mut qubits = Vec::new();
        let mut slot = None;
        for tok in parts {
            if let Some(s) = tok.strip_prefix('#') {
                slot = Some(
                    s.parse()
                        .map_err(|_| Error::arg(format!("bad slot {tok:?}")))?,
                );
            } else {
                qubits.push(
                    tok.parse()
                        .map_err(|_| Error::arg(format!("bad qubit {tok:?}")))?,
                );
            }
        }
        Gate::new(kind, &qubits, slot)
    }
}
