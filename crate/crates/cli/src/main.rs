//! `termweight` — experiment runner for supervised term weighting.
//!
//! Subcommands:
//! - `run`: execute a class x scheme x learner sweep and write the result
//!   tree (resumable; per-cell failures are recorded, not fatal).
//! - `surfaces`: export (tpr, fpr) surface data for trained local models and
//!   the closed-form supervised scores.
//! - `gen-corpus`: write a seeded synthetic labeled corpus for demos/tests.
//!
//! Exit codes: 0 success, 1 configuration error, 2 partial failure (some
//! cells failed).

mod config;
mod experiment;
mod surfaces;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RawConfig;

#[derive(Parser)]
#[command(name = "termweight", version, about = "Supervised term-weighting experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment sweep described by a config file and/or flags.
    Run(SweepArgs),
    /// Export surface data for an existing experiment output tree.
    Surfaces(SweepArgs),
    /// Generate a synthetic labeled corpus (TSV: id, labels, text).
    GenCorpus(GenArgs),
}

/// Every config-file key is also available as a flag of the same name;
/// flags override file values.
#[derive(Args)]
struct SweepArgs {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<String>,
    /// Corpus format: tsv | dir.
    #[arg(long)]
    format: Option<String>,
    /// Split policy: named | fraction.
    #[arg(long)]
    split: Option<String>,
    #[arg(long)]
    train_fraction: Option<String>,
    #[arg(long)]
    dataset: Option<String>,
    /// "english", "none", or a path to a word list.
    #[arg(long)]
    stopwords: Option<String>,
    #[arg(long)]
    select_ratio: Option<String>,
    /// Comma-separated weighting scheme names.
    #[arg(long)]
    schemes: Option<String>,
    /// Comma-separated learner names (LR, SVM, MNB, KNN).
    #[arg(long)]
    learners: Option<String>,
    #[arg(long)]
    repetitions: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    output: Option<String>,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    workers: Option<String>,
    /// Significance sample pairing: per-class | pooled.
    #[arg(long)]
    significance_pairing: Option<String>,
    #[arg(long)]
    surface_resolution: Option<String>,
    #[arg(long)]
    surface_prior: Option<String>,
    #[arg(long)]
    surface_docs: Option<String>,
    #[arg(long)]
    ltw_hidden_local: Option<String>,
    #[arg(long)]
    ltw_hidden_global_cap: Option<String>,
    #[arg(long)]
    ltw_hidden_dd: Option<String>,
    #[arg(long)]
    ltw_dropout: Option<String>,
    #[arg(long)]
    ltw_learning_rate: Option<String>,
    #[arg(long)]
    ltw_batch_size: Option<String>,
    #[arg(long)]
    ltw_max_steps: Option<String>,
    #[arg(long)]
    ltw_validation_every: Option<String>,
    #[arg(long)]
    ltw_patience: Option<String>,
    #[arg(long)]
    ltw_min_delta: Option<String>,
    #[arg(long)]
    ltw_validation_fraction: Option<String>,
}

#[derive(Args)]
struct GenArgs {
    /// Number of documents (minimum 10).
    #[arg(long, default_value_t = 200)]
    docs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Destination TSV file.
    #[arg(long)]
    output: PathBuf,
}

impl SweepArgs {
    fn resolve(&self) -> anyhow::Result<config::ExperimentConfig> {
        let file = match &self.config {
            Some(path) => RawConfig::from_file(path)?,
            None => RawConfig::default(),
        };
        let mut flags = RawConfig::default();
        let overrides: [(&str, &Option<String>); 28] = [
            ("corpus", &self.corpus),
            ("format", &self.format),
            ("split", &self.split),
            ("train_fraction", &self.train_fraction),
            ("dataset", &self.dataset),
            ("stopwords", &self.stopwords),
            ("select_ratio", &self.select_ratio),
            ("schemes", &self.schemes),
            ("learners", &self.learners),
            ("repetitions", &self.repetitions),
            ("seed", &self.seed),
            ("output", &self.output),
            ("workers", &self.workers),
            ("significance_pairing", &self.significance_pairing),
            ("surface_resolution", &self.surface_resolution),
            ("surface_prior", &self.surface_prior),
            ("surface_docs", &self.surface_docs),
            ("ltw_hidden_local", &self.ltw_hidden_local),
            ("ltw_hidden_global_cap", &self.ltw_hidden_global_cap),
            ("ltw_hidden_dd", &self.ltw_hidden_dd),
            ("ltw_dropout", &self.ltw_dropout),
            ("ltw_learning_rate", &self.ltw_learning_rate),
            ("ltw_batch_size", &self.ltw_batch_size),
            ("ltw_max_steps", &self.ltw_max_steps),
            ("ltw_validation_every", &self.ltw_validation_every),
            ("ltw_patience", &self.ltw_patience),
            ("ltw_min_delta", &self.ltw_min_delta),
            ("ltw_validation_fraction", &self.ltw_validation_fraction),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                flags.set(key, v.clone());
            }
        }
        file.overlay(flags).resolve()
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => {
            let config = match args.resolve() {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("configuration error: {e:#}");
                    return ExitCode::from(1);
                }
            };
            match experiment::run_experiment(&config) {
                Ok(report) => {
                    println!(
                        "{} classes, {} cells ({} reused, {} failed); results in {}",
                        report.classes,
                        report.cells_total,
                        report.cells_reused,
                        report.cells_failed,
                        config.output.display()
                    );
                    if report.cells_failed > 0 {
                        ExitCode::from(2)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Surfaces(args) => {
            let config = match args.resolve() {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("configuration error: {e:#}");
                    return ExitCode::from(1);
                }
            };
            match surfaces::emit_surfaces(&config) {
                Ok(report) => {
                    println!(
                        "{} reference and {} learned surfaces written to {} ({} skipped)",
                        report.reference,
                        report.learned,
                        config.output.join("surfaces").display(),
                        report.skipped
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(1)
                }
            }
        }
        Command::GenCorpus(args) => {
            let docs = match termweight::toy::generate(args.docs, args.seed) {
                Ok(d) => d,
                Err(e) => {
                    eprintln!("configuration error: {e}");
                    return ExitCode::from(1);
                }
            };
            if let Some(parent) = args.output.parent() {
                if !parent.as_os_str().is_empty() {
                    if let Err(e) = std::fs::create_dir_all(parent) {
                        eprintln!("error: creating {}: {e}", parent.display());
                        return ExitCode::from(1);
                    }
                }
            }
            match termweight::io::write_documents_tsv(&args.output, &docs) {
                Ok(()) => {
                    println!("{} documents written to {}", docs.len(), args.output.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
