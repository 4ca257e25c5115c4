//! Dense statevector simulation.
//!
//! Qubit 0 is the most significant bit of the basis index, so on two qubits
//! `|10⟩` is index 2. Rotations follow `R_P(θ) = exp(-iθP/2)`.

mod circuit;
mod gate;
mod statevector;

pub use circuit::ParameterizedCircuit;
pub use gate::{Gate, GateKind, ShiftTerm};
pub use statevector::{amplitude_encode, measure_prob, Statevector};

pub use num_complex::Complex64;

/// Norm tolerance for statevectors.
pub const NORM_TOL: f64 = 1e-9;
