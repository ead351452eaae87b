use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use nilweyl_cli::commands::{execute, Command};
use nilweyl_cli::config::ExperimentConfig;
use nilweyl_cli::output::write_outputs;

#[derive(Parser)]
#[command(name = "nilweyl", version, about = "Nilflow, Weyl-sum and renormalization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Log-log decay of |W(N)| against the exponent bounds.
    WeylDecay(Common),
    /// Weight, I_σ and distribution norms along the renormalization.
    ScalingScan(Common),
    /// Tube bounds on average widths over a T-grid.
    WidthScan(Common),
    /// Diophantine constant, counting ratios and continued fraction.
    Dioph(Common),
    /// Closed-form return map against stepping the group flow.
    ReturnMapCheck(Common),
    /// Representation norms with closed-form and Green-operator self-checks.
    RepNorms(Common),
}

#[derive(Args)]
struct Common {
    /// TOML file with experiment fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Shape string "k|i_1,...,i_n".
    #[arg(long)]
    shape: Option<String>,
    /// Comma-separated frequencies or polynomial coefficients.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    alpha: Option<Vec<f64>>,
    #[arg(long)]
    n_max: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Directory for the CSV and JSON outputs.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Sub {
    fn split(self) -> (Command, Common) {
        match self {
            Sub::WeylDecay(c) => (Command::WeylDecay, c),
            Sub::ScalingScan(c) => (Command::ScalingScan, c),
            Sub::WidthScan(c) => (Command::WidthScan, c),
            Sub::Dioph(c) => (Command::Dioph, c),
            Sub::ReturnMapCheck(c) => (Command::ReturnMapCheck, c),
            Sub::RepNorms(c) => (Command::RepNorms, c),
        }
    }
}

fn load(c: Common) -> Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(p) => ExperimentConfig::from_toml_file(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = c.shape {
        cfg.shape = s;
    }
    if c.alpha.is_some() {
        cfg.alpha = c.alpha;
    }
    if let Some(n) = c.n_max {
        cfg.n_max = n;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if c.threads.is_some() {
        cfg.threads = c.threads;
    }
    if c.out.is_some() {
        cfg.out = c.out;
    }
    Ok(cfg)
}

fn run() -> Result<ExitCode> {
    let (cmd, common) = Cli::parse().command.split();
    let cfg = load(common)?;
    let outcome = execute(cmd, &cfg)?;
    println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
    if let Some(dir) = &cfg.out {
        let (csv, json) = write_outputs(dir, cmd.name(), &outcome.table, &outcome.summary)?;
        eprintln!("wrote {} and {}", csv.display(), json.display());
    }
    Ok(match outcome.failure {
        Some(why) => {
            eprintln!("{} failed (shape {}, seed {}): {why}", cmd.name(), cfg.shape, cfg.seed);
            ExitCode::from(1)
        }
        None => ExitCode::SUCCESS,
    })
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
