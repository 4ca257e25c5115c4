//! `qel`: run ensemble experiments and predict with saved ensembles.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use qel::data::load_mnist;
use qel::ensemble::{EnsembleModel, Strategy};
use qel::experiment::{run_repeated_eval, run_single_vs_base, run_size_sweep, ExperimentConfig};

#[derive(Parser)]
#[command(name = "qel", version, about = "Quantum ensemble learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test accuracy against ensemble size for each strategy.
    Sweep(ExperimentArgs),
    /// Mean and variance of accuracy over repeated test subsamples.
    Repeat(ExperimentArgs),
    /// Training curves of a full-data learner and a bootstrap learner.
    SingleVsBase(ExperimentArgs),
    /// Classify an IDX dataset with a saved ensemble.
    Predict(PredictArgs),
}

/// Flags mirror the config file keys; flags win over the file.
#[derive(Args)]
struct ExperimentArgs {
    /// Key-value config file (`key = value` per line).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    train_images: Option<String>,
    #[arg(long)]
    train_labels: Option<String>,
    #[arg(long)]
    test_images: Option<String>,
    #[arg(long)]
    test_labels: Option<String>,
    /// Digit pair, e.g. `0,1`.
    #[arg(long)]
    digits: Option<String>,
    /// Used only without explicit test files.
    #[arg(long)]
    test_fraction: Option<String>,
    /// 4 or 6.
    #[arg(long)]
    qubits: Option<String>,
    #[arg(long)]
    learners: Option<String>,
    /// Ensemble sizes for the sweep, e.g. `5,10,15,20`.
    #[arg(long)]
    ladder: Option<String>,
    /// Comma list of majority, accuracy-weighted, confusion-matrix.
    #[arg(long)]
    strategies: Option<String>,
    #[arg(long)]
    bootstrap_fraction: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    batch_size: Option<String>,
    #[arg(long)]
    learning_rate: Option<String>,
    #[arg(long)]
    init_scale: Option<String>,
    #[arg(long)]
    s_threshold: Option<String>,
    #[arg(long)]
    accuracy_threshold: Option<String>,
    /// natural or base10.
    #[arg(long)]
    log_base: Option<String>,
    #[arg(long)]
    similarity_sample_size: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    trial_size: Option<String>,
    /// Master seed.
    #[arg(long)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long)]
    output: Option<String>,
}

impl ExperimentArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            cfg.apply_text(&text)
                .with_context(|| format!("in {}", path.display()))?;
        }
        let flags = [
            ("train-images", &self.train_images),
            ("train-labels", &self.train_labels),
            ("test-images", &self.test_images),
            ("test-labels", &self.test_labels),
            ("digits", &self.digits),
            ("test-fraction", &self.test_fraction),
            ("qubits", &self.qubits),
            ("learners", &self.learners),
            ("ladder", &self.ladder),
            ("strategies", &self.strategies),
            ("bootstrap-fraction", &self.bootstrap_fraction),
            ("steps", &self.steps),
            ("batch-size", &self.batch_size),
            ("learning-rate", &self.learning_rate),
            ("init-scale", &self.init_scale),
            ("s-threshold", &self.s_threshold),
            ("accuracy-threshold", &self.accuracy_threshold),
            ("log-base", &self.log_base),
            ("similarity-sample-size", &self.similarity_sample_size),
            ("trials", &self.trials),
            ("trial-size", &self.trial_size),
            ("seed", &self.seed),
            ("output", &self.output),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v).with_context(|| format!("--{key}"))?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct PredictArgs {
    /// Ensemble file written by `sweep` or `repeat`.
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    images: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, default_value = "0,1")]
    digits: String,
    #[arg(long, default_value = "confusion-matrix")]
    strategy: String,
    /// Write `index,label,prediction` rows here.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn predict(args: &PredictArgs) -> Result<()> {
    let strategy: Strategy = args.strategy.parse()?;
    let mut cfg = ExperimentConfig::default();
    cfg.set("digits", &args.digits)?;
    let model = EnsembleModel::load(&args.model)?;
    let data = load_mnist(&args.images, &args.labels, cfg.digits)?;
    let pred = model.predict(&data, strategy)?;
    let labels: Vec<u8> = data.labels().collect();
    let hits = pred.iter().zip(&labels).filter(|(p, y)| p == y).count();
    if let Some(path) = &args.output {
        let mut text = String::from("index,label,prediction\n");
        for (i, (y, p)) in labels.iter().zip(&pred).enumerate() {
            text.push_str(&format!("{i},{y},{p}\n"));
        }
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    println!(
        "{strategy}: {hits}/{} correct, accuracy {:.4}",
        labels.len(),
        hits as f64 / labels.len() as f64
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep(a) => {
            let cfg = a.resolve()?;
            let report = run_size_sweep(&cfg)?;
            println!("{:<18} {:>4} {:>8}", "strategy", "N", "accuracy");
            for r in &report.rows {
                println!(
                    "{:<18} {:>4} {:>8.4}",
                    r.strategy.name(),
                    r.n_learners,
                    r.accuracy
                );
            }
            println!("wrote {}", cfg.output_dir.join("sweep.csv").display());
        }
        Command::Repeat(a) => {
            let cfg = a.resolve()?;
            let report = run_repeated_eval(&cfg)?;
            println!(
                "{:<18} {:>8} {:>8} {:>11}",
                "method", "test", "mean", "variance"
            );
            for m in &report.methods {
                println!(
                    "{:<18} {:>8.4} {:>8.4} {:>11.3e}",
                    m.method, m.test_accuracy, m.mean, m.variance
                );
            }
            println!("wrote {}", cfg.output_dir.join("repeat.csv").display());
        }
        Command::SingleVsBase(a) => {
            let cfg = a.resolve()?;
            let report = run_single_vs_base(&cfg)?;
            println!(
                "full-data learner test accuracy {:.4}",
                report.full_test_accuracy
            );
            println!(
                "bootstrap learner test accuracy {:.4}",
                report.base_test_accuracy
            );
            println!(
                "wrote {}",
                cfg.output_dir.join("single_vs_base.csv").display()
            );
        }
        Command::Predict(a) => predict(&a)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
