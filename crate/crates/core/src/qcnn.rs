//! QCNN base-learner architectures.
//!
//! An architecture is a declarative list of layers. Each layer places
//! two-qubit convolution blocks on adjacent active qubits (open boundary: the
//! last active qubit never pairs with the first), then pooling steps that
//! entangle a control into a target and drop the control from every later
//! layer. The single survivor is measured.
//!
//! Slots are allocated in layer order. A `shared` stage reuses one set of
//! slots for every block in it.
//!
//! Built-in layouts:
//!
//! * 4 qubits, 2-slot `RY ⊗ RY · CNOT` blocks, no conv sharing, one shared
//!   pooling pair per layer: `3·2 + 2` in layer 0, `1·2 + 2` in layer 1 = 12.
//! * 6 qubits, 15-slot general two-qubit blocks, no conv sharing, one shared
//!   pooling pair per layer: `3·15 + 2`, `15 + 2`, `15 + 2` = 81.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{Gate, GateKind, ParameterizedCircuit, Statevector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvUnit {
    /// `RY(a) ⊗ RY(b)` then `CNOT(a→b)`.
    RyCnot,
    /// `U3 ⊗ U3 · CNOT(b→a) · RZ(a) ⊗ RY(b) · CNOT(a→b) · RY(b) · CNOT(b→a) ·
    /// U3 ⊗ U3`, with `U3 = RZ·RY·RZ`.
    Su4,
}

impl ConvUnit {
    pub fn n_params(self) -> usize {
        match self {
            ConvUnit::RyCnot => 2,
            ConvUnit::Su4 => 15,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ConvUnit::RyCnot => "ry-cnot",
            ConvUnit::Su4 => "su4",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        [ConvUnit::RyCnot, ConvUnit::Su4]
            .into_iter()
            .find(|u| u.name() == s)
            .ok_or_else(|| Error::arg(format!("unknown conv unit {s:?}")))
    }

    fn emit(self, a: usize, b: usize, slots: &[usize], out: &mut Vec<Gate>) -> Result<()> {
        let g = |kind, qs: &[usize], slot| Gate::new(kind, qs, slot);
        match self {
            ConvUnit::RyCnot => {
                out.push(g(GateKind::RY, &[a], Some(slots[0]))?);
                out.push(g(GateKind::RY, &[b], Some(slots[1]))?);
                out.push(g(GateKind::CNOT, &[a, b], None)?);
            }
            ConvUnit::Su4 => {
                let u3 = |q: usize, s: &[usize], out: &mut Vec<Gate>| -> Result<()> {
                    out.push(g(GateKind::RZ, &[q], Some(s[0]))?);
                    out.push(g(GateKind::RY, &[q], Some(s[1]))?);
                    out.push(g(GateKind::RZ, &[q], Some(s[2]))?);
                    Ok(())
                };
                u3(a, &slots[0..3], out)?;
                u3(b, &slots[3..6], out)?;
                out.push(g(GateKind::CNOT, &[b, a], None)?);
                out.push(g(GateKind::RZ, &[a], Some(slots[6]))?);
                out.push(g(GateKind::RY, &[b], Some(slots[7]))?);
                out.push(g(GateKind::CNOT, &[a, b], None)?);
                out.push(g(GateKind::RY, &[b], Some(slots[8]))?);
                out.push(g(GateKind::CNOT, &[b, a], None)?);
                u3(a, &slots[9..12], out)?;
                u3(b, &slots[12..15], out)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoolUnit {
    /// `CRZ(c→t)` then `CRX(c→t)`: both rotations fire on control `|1⟩`.
    Controlled,
    /// `CRZ(c→t)`, then `X(c) · CRX(c→t) · X(c)`: RZ fires on control `|1⟩`,
    /// RX on control `|0⟩`.
    Conditional,
}

impl PoolUnit {
    pub const N_PARAMS: usize = 2;

    fn name(self) -> &'static str {
        match self {
            PoolUnit::Controlled => "controlled",
            PoolUnit::Conditional => "conditional",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        [PoolUnit::Controlled, PoolUnit::Conditional]
            .into_iter()
            .find(|u| u.name() == s)
            .ok_or_else(|| Error::arg(format!("unknown pool unit {s:?}")))
    }

    fn emit(self, c: usize, t: usize, slots: &[usize], out: &mut Vec<Gate>) -> Result<()> {
        out.push(Gate::new(GateKind::CRZ, &[c, t], Some(slots[0]))?);
        let flip = self == PoolUnit::Conditional;
        if flip {
            out.push(Gate::new(GateKind::X, &[c], None)?);
        }
        out.push(Gate::new(GateKind::CRX, &[c, t], Some(slots[1]))?);
        if flip {
            out.push(Gate::new(GateKind::X, &[c], None)?);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layer {
    /// Convolution blocks as `(a, b)` qubit pairs.
    pub conv: Vec<(usize, usize)>,
    pub share_conv: bool,
    /// Pooling steps as `(control, target)`; the control is discarded.
    pub pool: Vec<(usize, usize)>,
    pub share_pool: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QcnnArchitecture {
    pub n_qubits: usize,
    pub conv_unit: ConvUnit,
    pub pool_unit: PoolUnit,
    pub layers: Vec<Layer>,
}

/// Slot ranges of one compiled layer, for inspection and tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSlots {
    pub active_before: Vec<usize>,
    pub conv: Vec<Vec<usize>>,
    pub pool: Vec<Vec<usize>>,
}

fn chain(qubits: &[usize]) -> Vec<(usize, usize)> {
    qubits.windows(2).map(|w| (w[0], w[1])).collect()
}

impl QcnnArchitecture {
    /// The default 4- or 6-qubit layout.
    pub fn standard(n_qubits: usize) -> Result<Self> {
        let layer = |conv, pool| Layer {
            conv,
            share_conv: false,
            pool,
            share_pool: true,
        };
        match n_qubits {
            4 => Ok(Self {
                n_qubits,
                conv_unit: ConvUnit::RyCnot,
                pool_unit: PoolUnit::Conditional,
                layers: vec![
                    layer(chain(&[0, 1, 2, 3]), vec![(0, 1), (2, 3)]),
                    layer(vec![(1, 3)], vec![(1, 3)]),
                ],
            }),
            6 => Ok(Self {
                n_qubits,
                conv_unit: ConvUnit::Su4,
                pool_unit: PoolUnit::Conditional,
                layers: vec![
                    layer(vec![(0, 1), (2, 3), (4, 5)], vec![(0, 1), (2, 3), (4, 5)]),
                    layer(vec![(1, 3)], vec![(1, 3)]),
                    layer(vec![(3, 5)], vec![(3, 5)]),
                ],
            }),
            n => Err(Error::arg(format!(
                "QCNN width must be 4 or 6 qubits, got {n}"
            ))),
        }
    }

    /// Checks the layout and assigns slots to every stage.
    pub fn allocate(&self) -> Result<(Vec<LayerSlots>, usize)> {
        if self.n_qubits < 2 {
            return Err(Error::arg("a QCNN needs at least two qubits"));
        }
        let mut active: Vec<usize> = (0..self.n_qubits).collect();
        let mut next = 0usize;
        let mut take = |k: usize| {
            let r: Vec<usize> = (next..next + k).collect();
            next += k;
            r
        };
        let mut out = Vec::with_capacity(self.layers.len());
        for (li, layer) in self.layers.iter().enumerate() {
            let pos = |q: usize| active.iter().position(|&a| a == q);
            for &(a, b) in &layer.conv {
                match (pos(a), pos(b)) {
                    (Some(i), Some(j)) if j == i + 1 => {}
                    _ => {
                        return Err(Error::arg(format!(
                            "layer {li}: conv pair ({a}, {b}) is not an adjacent active pair in {active:?}"
                        )))
                    }
                }
            }
            if layer.pool.is_empty() {
                return Err(Error::arg(format!("layer {li} has no pooling step")));
            }
            let mut dropped = Vec::new();
            for &(c, t) in &layer.pool {
                if c == t
                    || pos(c).is_none()
                    || pos(t).is_none()
                    || dropped.contains(&c)
                    || dropped.contains(&t)
                {
                    return Err(Error::arg(format!(
                        "layer {li}: invalid pool step ({c} -> {t}) over {active:?}"
                    )));
                }
                dropped.push(c);
            }

            let unit = self.conv_unit.n_params();
            let conv = if layer.conv.is_empty() {
                Vec::new()
            } else if layer.share_conv {
                vec![take(unit); layer.conv.len()]
            } else {
                layer.conv.iter().map(|_| take(unit)).collect()
            };
            let pool = if layer.share_pool {
                vec![take(PoolUnit::N_PARAMS); layer.pool.len()]
            } else {
                layer
                    .pool
                    .iter()
                    .map(|_| take(PoolUnit::N_PARAMS))
                    .collect()
            };
            out.push(LayerSlots {
                active_before: active.clone(),
                conv,
                pool,
            });
            active.retain(|q| !dropped.contains(q));
        }
        if active.len() != 1 {
            return Err(Error::arg(format!(
                "pooling must end on one readout qubit, {active:?} remain"
            )));
        }
        Ok((out, next))
    }

    pub fn readout_qubit(&self) -> Result<usize> {
        let mut active: Vec<usize> = (0..self.n_qubits).collect();
        for layer in &self.layers {
            active.retain(|q| !layer.pool.iter().any(|&(c, _)| c == *q));
        }
        match active.as_slice() {
            [q] => Ok(*q),
            _ => Err(Error::arg("architecture does not pool down to one qubit")),
        }
    }

    pub fn compile(&self) -> Result<Qcnn> {
        let (slots, total) = self.allocate()?;
        let mut gates = Vec::new();
        for (layer, ls) in self.layers.iter().zip(&slots) {
            for (&(a, b), s) in layer.conv.iter().zip(&ls.conv) {
                self.conv_unit.emit(a, b, s, &mut gates)?;
            }
            for (&(c, t), s) in layer.pool.iter().zip(&ls.pool) {
                self.pool_unit.emit(c, t, s, &mut gates)?;
            }
        }
        Ok(Qcnn {
            readout: self.readout_qubit()?,
            circuit: ParameterizedCircuit::new(self.n_qubits, total, gates)?,
            arch: self.clone(),
        })
    }

    /// Line-oriented description, parsed back by [`QcnnArchitecture::from_text`].
    pub fn to_text(&self) -> String {
        let pairs = |ps: &[(usize, usize)], sep: char| {
            ps.iter()
                .map(|(a, b)| format!("{a}{sep}{b}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let yn = |b: bool| if b { "yes" } else { "no" };
        let mut out = format!(
            "qcnn qubits={} conv={} pool={}\n",
            self.n_qubits,
            self.conv_unit.name(),
            self.pool_unit.name()
        );
        for l in &self.layers {
            let conv = if l.conv.is_empty() {
                "-".to_string()
            } else {
                pairs(&l.conv, '-')
            };
            let _ = writeln!(
                out,
                "layer conv={conv} share_conv={} pool={} share_pool={}",
                yn(l.share_conv),
                pairs(&l.pool, '>'),
                yn(l.share_pool)
            );
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |what: &str| Error::arg(format!("architecture text: {what}"));
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| bad("empty"))?;
        let fields = |line: &str, tag: &str| -> Result<Vec<(String, String)>> {
            let mut it = line.split_whitespace();
            if it.next() != Some(tag) {
                return Err(bad(&format!("expected a {tag:?} line, got {line:?}")));
            }
            it.map(|f| {
                f.split_once('=')
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .ok_or_else(|| bad(&format!("field {f:?}")))
            })
            .collect()
        };
        let lookup = |fs: &[(String, String)], k: &str| -> Result<String> {
            fs.iter()
                .find(|(key, _)| key == k)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| bad(&format!("missing {k}=")))
        };
        let pairs = |s: &str, sep: char| -> Result<Vec<(usize, usize)>> {
            if s == "-" {
                return Ok(Vec::new());
            }
            s.split(',')
                .map(|p| {
                    let (a, b) = p
                        .split_once(sep)
                        .ok_or_else(|| bad(&format!("pair {p:?}")))?;
                    Ok((
                        a.parse().map_err(|_| bad(&format!("qubit {a:?}")))?,
                        b.parse().map_err(|_| bad(&format!("qubit {b:?}")))?,
                    ))
                })
                .collect()
        };
        let flag = |s: &str| match s {
            "yes" => Ok(true),
            "no" => Ok(false),
            _ => Err(bad(&format!("flag {s:?}"))),
        };
        let h = fields(header, "qcnn")?;
        let n_qubits = lookup(&h, "qubits")?.parse().map_err(|_| bad("qubits"))?;
        let conv_unit = ConvUnit::parse(&lookup(&h, "conv")?)?;
        let pool_unit = PoolUnit::parse(&lookup(&h, "pool")?)?;
        let layers = lines
            .map(|line| {
                let f = fields(line, "layer")?;
                Ok(Layer {
                    conv: pairs(&lookup(&f, "conv")?, '-')?,
                    share_conv: flag(&lookup(&f, "share_conv")?)?,
                    pool: pairs(&lookup(&f, "pool")?, '>')?,
                    share_pool: flag(&lookup(&f, "share_pool")?)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let arch = Self {
            n_qubits,
            conv_unit,
            pool_unit,
            layers,
        };
        arch.allocate()?;
        Ok(arch)
    }
}

/// A compiled architecture: immutable and shareable across workers.
#[derive(Debug, Clone, PartialEq)]
pub struct Qcnn {
    arch: QcnnArchitecture,
    circuit: ParameterizedCircuit,
    readout: usize,
}

impl Qcnn {
    pub fn arch(&self) -> &QcnnArchitecture {
        &self.arch
    }

    pub fn circuit(&self) -> &ParameterizedCircuit {
        &self.circuit
    }

    pub fn readout_qubit(&self) -> usize {
        self.readout
    }

    pub fn n_qubits(&self) -> usize {
        self.arch.n_qubits
    }

    pub fn total_params(&self) -> usize {
        self.circuit.n_params()
    }

    /// `P(readout = 1)`, read as the probability of class 1.
    pub fn forward(&self, params: &[f64], encoded: &Statevector) -> Result<f64> {
        let out = self.circuit.run(params, encoded)?;
        out.prob_one(self.readout)
    }
}

/// Compiles the standard layout for 4 or 6 qubits.
pub fn build_qcnn(n_qubits: usize) -> Result<Qcnn> {
    QcnnArchitecture::standard(n_qubits)?.compile()
}
