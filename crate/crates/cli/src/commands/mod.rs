//! One module per subcommand. Each `run` returns a table and a serializable summary.

use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::output::Table;

pub mod dioph;
pub mod rep_norms;
pub mod return_map;
pub mod scaling;
pub mod weyl_decay;
pub mod width;

/// A command summary that may report a broken invariant.
pub trait Summary: Serialize {
    /// The first failing invariant with its parameters, if any.
    fn failure(&self) -> Option<String>;
}

pub struct Report<S> {
    pub table: Table,
    pub summary: S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    WeylDecay,
    ScalingScan,
    WidthScan,
    Dioph,
    ReturnMapCheck,
    RepNorms,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::WeylDecay => "weyl-decay",
            Command::ScalingScan => "scaling-scan",
            Command::WidthScan => "width-scan",
            Command::Dioph => "dioph",
            Command::ReturnMapCheck => "return-map-check",
            Command::RepNorms => "rep-norms",
        }
    }
}

/// Output of a finished command in a type-erased form.
pub struct Outcome {
    pub table: Table,
    pub summary: serde_json::Value,
    pub failure: Option<String>,
}

fn erase<S: Summary>(r: Report<S>) -> Result<Outcome> {
    let failure = r.summary.failure();
    Ok(Outcome { table: r.table, summary: serde_json::to_value(&r.summary)?, failure })
}

/// Validates the config and runs `cmd` on a pool of `cfg.threads` workers.
pub fn execute(cmd: Command, cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        pool = pool.num_threads(t);
    }
    pool.build()?.install(|| match cmd {
        Command::WeylDecay => erase(weyl_decay::run(cfg)?),
        Command::ScalingScan => erase(scaling::run(cfg)?),
        Command::WidthScan => erase(width::run(cfg)?),
        Command::Dioph => erase(dioph::run(cfg)?),
        Command::ReturnMapCheck => erase(return_map::run(cfg)?),
        Command::RepNorms => erase(rep_norms::run(cfg)?),
    })
}
