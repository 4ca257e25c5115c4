use serde::{Deserialize, Serialize};

use super::{Gate, Statevector};
use crate::error::{Error, Result};

/// Ordered gate list whose angles are looked up by slot in a parameter
/// vector. A slot may drive several gates (weight sharing).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CircuitRecord", into = "CircuitRecord")]
pub struct ParameterizedCircuit {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<Gate>,
}

impl ParameterizedCircuit {
    pub fn new(n_qubits: usize, n_params: usize, gates: Vec<Gate>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::arg("circuit needs at least one qubit"));
        }
        let mut used = vec![false; n_params];
        for (i, g) in gates.iter().enumerate() {
            g.check_qubits(n_qubits)
                .map_err(|e| Error::arg(format!("gate {i}: {e}")))?;
            if let Some(s) = g.slot() {
                *used.get_mut(s).ok_or_else(|| {
                    Error::arg(format!(
                        "gate {i} uses slot {s} but the circuit has {n_params}"
                    ))
                })? = true;
            }
        }
        if let Some(s) = used.iter().position(|&u| !u) {
            return Err(Error::arg(format!("parameter slot {s} is never used")));
        }
        Ok(Self {
            n_qubits,
            n_params,
            gates,
        })
    }

    pub fn empty(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, 0, Vec::new())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub(crate) fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::arg(format!(
                "circuit has {} parameter slots, got {} values",
                self.n_params,
                params.len()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_input(&self, input: &Statevector) -> Result<()> {
        if input.n_qubits() != self.n_qubits {
            return Err(Error::arg(format!(
                "circuit acts on {} qubits, state has {}",
                self.n_qubits,
                input.n_qubits()
            )));
        }
        Ok(())
    }

    pub fn run(&self, params: &[f64], input: &Statevector) -> Result<Statevector> {
        self.check_params(params)?;
        self.check_input(input)?;
        let mut state = input.clone();
        self.apply_range(params, 0, &mut state);
        Ok(state)
    }

    /// Applies gates `from..` to `state` without re-validating.
    pub(crate) fn apply_range(&self, params: &[f64], from: usize, state: &mut Statevector) {
        let n = state.n_qubits();
        for g in &self.gates[from..] {
            let theta = g.slot().map_or(0.0, |s| params[s]);
            g.act(state.amplitudes_mut(), n, theta);
        }
    }

    /// Human-readable listing: a header line and one gate per line.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "circuit qubits={} params={}\n",
            self.n_qubits, self.n_params
        );
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with("//"));
        let header = lines
            .next()
            .ok_or_else(|| Error::arg("empty circuit text"))?;
        let mut n_qubits = None;
        let mut n_params = None;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("circuit") {
            return Err(Error::arg(format!("bad circuit header {header:?}")));
        }
        for f in fields {
            let (k, v) = f
                .split_once('=')
                .ok_or_else(|| Error::arg(format!("bad header field {f:?}")))?;
            let v: usize = v
                .parse()
                .map_err(|_| Error::arg(format!("bad header value {f:?}")))?;
            match k {
                "qubits" => n_qubits = Some(v),
                "params" => n_params = Some(v),
                _ => return Err(Error::arg(format!("unknown header field {k:?}"))),
            }
        }
        let gates = lines.map(str::parse).collect::<Result<Vec<Gate>>>()?;
        Self::new(
            n_qubits.ok_or_else(|| Error::arg("header lacks qubits="))?,
            n_params.ok_or_else(|| Error::arg("header lacks params="))?,
            gates,
        )
    }
}

#[derive(Serialize, Deserialize)]
struct CircuitRecord {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<String>,
}

impl From<ParameterizedCircuit> for CircuitRecord {
    fn from(c: ParameterizedCircuit) -> Self {
        Self {
            n_qubits: c.n_qubits,
            n_params: c.n_params,
            gates: c.gates.iter().map(ToString::to_string).collect(),
        }
    }
}

impl TryFrom<CircuitRecord> for ParameterizedCircuit {
    type Error = Error;

    fn try_from(r: CircuitRecord) -> Result<Self> {
        let gates = r
            .gates
            .iter()
            .map(|g| g.parse())
            .collect::<Result<Vec<Gate>>>()?;
        Self::new(r.n_qubits, r.n_params, gates)
    }
}
