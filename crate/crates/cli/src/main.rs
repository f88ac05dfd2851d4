//! Command-line harness wiring the pipeline: dataset generation and
//! ingestion, graph/embedding/interpolator construction, classification,
//! bound reports, and deterministic multi-seed parameter sweeps.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical or I/O
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use supemb_cli::commands;
use supemb_cli::config::{ConfigError, ExperimentConfig, RawConfig};

#[derive(Parser)]
#[command(name = "supemb", version, about = "Supervised manifold embeddings, RBF extension, margins, and bound reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Materialize the configured dataset as CSV
    Synth(CommonArgs),
    /// Run one pipeline cell and write runs.csv
    Run(CommonArgs),
    /// Run the axis cross product x seeds and write sweep.csv
    Sweep(CommonArgs),
    /// Evaluate every bound on a realized run and write bounds.csv
    Bounds(CommonArgs),
    /// Compare embedding variants and ambient baselines; write compare.csv
    Compare(CommonArgs),
}

/// Every config key is also a flag of the same name.
#[derive(Args, Default)]
struct CommonArgs {
    /// INI-style config file; flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    kind: Option<String>,
    #[arg(long = "per_class")]
    per_class: Option<String>,
    #[arg(long)]
    noise: Option<String>,
    #[arg(long = "csv_path")]
    csv_path: Option<String>,
    #[arg(long = "label_column")]
    label_column: Option<String>,
    #[arg(long = "train_fraction")]
    train_fraction: Option<String>,
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long = "k_within")]
    k_within: Option<String>,
    #[arg(long = "k_between")]
    k_between: Option<String>,
    #[arg(long = "heat_t")]
    heat_t: Option<String>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    ridge: Option<String>,
    #[arg(long)]
    rule: Option<String>,
    #[arg(long = "per_class_axis")]
    per_class_axis: Option<String>,
    #[arg(long = "dim_axis")]
    dim_axis: Option<String>,
    #[arg(long = "mu_axis")]
    mu_axis: Option<String>,
    #[arg(long = "sigma_axis")]
    sigma_axis: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    categories: Option<String>,
    #[arg(long = "category_dims")]
    category_dims: Option<String>,
    #[arg(long)]
    outdir: Option<String>,
}

fn resolve_config(args: &CommonArgs) -> Result<ExperimentConfig, ConfigError> {
    let mut raw = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    let overrides: [(&str, &Option<String>); 29] = [
        ("kind", &args.kind),
        ("per_class", &args.per_class),
        ("noise", &args.noise),
        ("csv_path", &args.csv_path),
        ("label_column", &args.label_column),
        ("train_fraction", &args.train_fraction),
        ("seeds", &args.seeds),
        ("k_within", &args.k_within),
        ("k_between", &args.k_between),
        ("heat_t", &args.heat_t),
        ("method", &args.method),
        ("dim", &args.dim),
        ("mu", &args.mu),
        ("sigma", &args.sigma),
        ("ridge", &args.ridge),
        ("rule", &args.rule),
        ("per_class_axis", &args.per_class_axis),
        ("dim_axis", &args.dim_axis),
        ("mu_axis", &args.mu_axis),
        ("sigma_axis", &args.sigma_axis),
        ("delta", &args.delta),
        ("epsilon", &args.epsilon),
        ("q", &args.q),
        ("alpha", &args.alpha),
        ("beta", &args.beta),
        ("theta", &args.theta),
        ("categories", &args.categories),
        ("category_dims", &args.category_dims),
        ("outdir", &args.outdir),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            raw.set_override(key, v)?;
        }
    }
    raw.resolve()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (&CommonArgs, fn(&ExperimentConfig) -> supemb::Result<PathBuf>) = match &cli.command {
        Command::Synth(a) => (a, commands::cmd_synth),
        Command::Run(a) => (a, commands::cmd_run),
        Command::Sweep(a) => (a, commands::cmd_sweep),
        Command::Bounds(a) => (a, commands::cmd_bounds),
        Command::Compare(a) => (a, commands::cmd_compare),
    };
    let cfg = match resolve_config(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(path) => {
            println!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
