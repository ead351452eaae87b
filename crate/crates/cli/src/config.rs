//! Experiment configuration, read from TOML and overridden by flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nilweyl::lie_core::AlgebraShape;
use nilweyl::Rational;
use serde::{Deserialize, Serialize};

/// All knobs of every subcommand. Fields a command does not use are ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Shape string `k|i_1,...,i_n`.
    pub shape: String,
    /// Frequencies (width-scan, dioph) or monomial coefficients `a_0..a_k` (weyl-decay).
    pub alpha: Option<Vec<f64>>,
    pub seed: u64,
    /// Worker threads; `None` uses every core.
    pub threads: Option<usize>,
    /// Output directory for the CSV and JSON files.
    pub out: Option<PathBuf>,

    // weyl-decay
    pub n_max: u64,
    /// Leading coefficient `a_k`; defaults to `φ/k!`.
    pub leading: Option<f64>,
    pub samples: usize,
    pub points_per_decade: usize,
    /// Fraction of the (log-spaced) grid, counted from the top, used in slope fits.
    pub fit_fraction: f64,
    pub epsilon: f64,

    // scaling-scan and rep-norms
    /// Block weights, as exact fractions such as `"1/3"`.
    pub block_weights: Vec<String>,
    /// Values of `Λ` on the Jordan basis; defaults to 1 on the last vector of block 0.
    pub lambda: Option<Vec<f64>>,
    /// Overrides the optimal exponents.
    pub rho: Option<Vec<f64>>,
    pub sobolev: f64,
    pub tau: f64,
    pub t_max: f64,
    pub t_steps: usize,
    pub slope_tol: f64,
    pub test_functions: usize,
    pub rescale_factors: Vec<f64>,

    // width-scan
    pub t_grid: Vec<f64>,
    pub l: f64,
    pub i_const: f64,
    pub base_points: usize,
    pub samples_per_unit: usize,
    pub audit_pairs: usize,
    pub collapse_slope: f64,

    // dioph
    pub nu: f64,
    pub q_max: u64,
    pub count_n_max: u64,
    pub c_min: f64,
    pub include_zero: bool,
    pub divergence_slope: f64,

    // return-map-check
    pub cases: usize,
    pub max_steps: u32,
    pub tolerance: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            shape: "2|2".into(),
            alpha: None,
            seed: 0,
            threads: None,
            out: None,
            n_max: 1_000_000,
            leading: None,
            samples: 20,
            points_per_decade: 20,
            fit_fraction: 0.5,
            epsilon: 0.05,
            block_weights: vec!["1".into()],
            lambda: None,
            rho: None,
            sobolev: 2.0,
            tau: 0.5,
            t_max: 10.0,
            t_steps: 21,
            slope_tol: 0.02,
            test_functions: 20,
            rescale_factors: vec![0.1, 0.5, 2.0, 10.0],
            t_grid: vec![4.0, 8.0, 16.0, 32.0, 64.0],
            l: 2.0,
            i_const: 0.5,
            base_points: 4,
            samples_per_unit: 4,
            audit_pairs: 2000,
            collapse_slope: 1.5,
            nu: 1.0,
            q_max: 1_000_000,
            count_n_max: 100_000,
            c_min: 0.27,
            include_zero: false,
            divergence_slope: 0.25,
            cases: 1000,
            max_steps: 50,
            tolerance: 1e-10,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parsed_shape(&self) -> Result<AlgebraShape> {
        self.shape.parse().map_err(|e| anyhow::anyhow!("invalid shape {:?}: {e}", self.shape))
    }

    pub fn parsed_block_weights(&self) -> Result<Vec<Rational>> {
        self.block_weights
            .iter()
            .map(|s| s.trim().parse::<Rational>().map_err(|e| anyhow::anyhow!("invalid block weight {s:?}: {e}")))
            .collect()
    }

    /// Rejects empty grids and out-of-range tolerances.
    pub fn validate(&self) -> Result<()> {
        self.parsed_shape()?;
        if self.n_max < 2 || self.points_per_decade == 0 || self.samples == 0 {
            bail!("weyl-decay needs n_max ≥ 2, points_per_decade ≥ 1 and samples ≥ 1");
        }
        if !(self.fit_fraction > 0.0 && self.fit_fraction <= 1.0) {
            bail!("fit_fraction must lie in (0, 1], got {}", self.fit_fraction);
        }
        if self.t_steps < 2 || !(self.t_max > 0.0) {
            bail!("scaling-scan needs t_steps ≥ 2 and t_max > 0");
        }
        if self.t_grid.len() < 2 || self.t_grid.iter().any(|t| *t < 1.0) {
            bail!("width-scan needs at least two times T ≥ 1");
        }
        if self.base_points == 0 || self.cases == 0 || self.max_steps == 0 || self.test_functions == 0 {
            bail!("base_points, cases, max_steps and test_functions must be positive");
        }
        if self.threads == Some(0) {
            bail!("threads must be positive");
        }
        Ok(())
    }

    /// `N`-grid geometric from 1 to `n_max`, deduplicated after rounding.
    pub fn n_grid(&self) -> Vec<u64> {
        let decades = (self.n_max as f64).log10();
        let steps = (decades * self.points_per_decade as f64).ceil() as usize;
        let mut grid: Vec<u64> = (0..=steps)
            .map(|i| 10f64.powf(decades * i as f64 / steps as f64).round() as u64)
            .map(|n| n.clamp(1, self.n_max))
            .collect();
        grid.dedup();
        grid
    }

    /// First grid index with `N ≥ n_max^{1 − fit_fraction}`; the fit window in log space.
    pub fn fit_start(&self, grid: &[u64]) -> usize {
        let lo = (self.n_max as f64).powf(1.0 - self.fit_fraction);
        grid.iter().position(|&n| n as f64 >= lo * (1.0 - 1e-9)).unwrap_or(0).min(grid.len().saturating_sub(2))
    }

    /// `t`-grid `0, t_max/(steps-1), ..., t_max`.
    pub fn t_scan(&self) -> Vec<f64> {
        (0..self.t_steps).map(|i| self.t_max * i as f64 / (self.t_steps - 1) as f64).collect()
    }
}
