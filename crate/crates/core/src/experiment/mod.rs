//! Experiment harness: ensemble-size sweeps, repeated sampling, and single
//! learner vs bootstrap learner curves, written as CSV plus a JSON manifest.

mod config;
mod output;
mod runs;

pub use config::ExperimentConfig;
pub use output::{Manifest, OutputFile, SeedRecord};
pub use runs::{
    run_repeated_eval, run_single_vs_base, run_size_sweep, MethodSummary, RepeatReport,
    SingleVsBaseReport, SweepReport, SweepRow, Workbench,
};
