//! Hybrid quantum-classical ensemble classification.
//!
//! Variational QCNN base learners run on a dense statevector simulator, are
//! trained on bootstrap resamples of a binarized, PCA-reduced MNIST task, and
//! are combined by majority voting, accuracy-weighted voting, or
//! confusion-matrix weighting with a similarity penalty.
//!
//! Module map:
//!
//! * [`data`]: IDX loading, splits, bootstrap resampling, PCA.
//! * [`quantum`]: statevectors, gates, parameterized circuits.
//! * [`qcnn`]: 4- and 6-qubit QCNN layouts.
//! * [`trainer`]: loss, parameter-shift gradients, Adam, evaluation.
//! * [`ensemble`]: similarity, voting weights, combination, analysis formulas.
//! * [`experiment`]: size sweep, repeated evaluation, single-vs-base runs.

pub mod data;
pub mod ensemble;
pub mod error;
pub mod experiment;
pub mod qcnn;
pub mod quantum;
pub mod seed;
pub mod trainer;

pub use error::{Error, Result};
