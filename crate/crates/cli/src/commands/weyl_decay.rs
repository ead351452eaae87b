use std::time::Instant;

use anyhow::{bail, Result};
use nilweyl::nilflow::{WeylPolynomial, WeylSum, WeylSumConfig};
use nilweyl::stats::{fit_loglog, LineFit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Report, Summary};
use crate::config::ExperimentConfig;
use crate::output::{join, num, Table};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleFit {
    pub sample: usize,
    pub coeffs: Vec<f64>,
    pub fit: LineFit,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeylDecaySummary {
    pub k: usize,
    pub samples: Vec<SampleFit>,
    /// `[N_lo, N_hi]` used in every fit.
    pub fit_range: [u64; 2],
    /// Mean of the per-sample slopes.
    pub fitted_slope: f64,
    pub max_slope: f64,
    /// `1 − 2/(3k(k−1))`.
    pub decay_bound: f64,
    pub epsilon: f64,
    /// `1 − 1/2^{k−1}`.
    pub weyl_bound: f64,
    /// Every sample slope is at most `decay_bound + ε`.
    pub pass: bool,
    pub terms: u64,
    pub wall_seconds: f64,
    pub terms_per_second: f64,
}

impl Summary for WeylDecaySummary {
    fn failure(&self) -> Option<String> {
        (!self.pass).then(|| format!("max slope {} exceeds {} + {}", self.max_slope, self.decay_bound, self.epsilon))
    }
}

pub fn decay_exponent(k: usize) -> f64 {
    1.0 - 2.0 / (3.0 * (k * (k - 1)) as f64)
}

pub fn weyl_exponent(k: usize) -> f64 {
    1.0 - 0.5f64.powi(k as i32 - 1)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Coefficient vectors `a_0..a_k`: the configured one, or `samples` draws of the
/// lower coefficients with a fixed leading term.
fn coefficient_samples(cfg: &ExperimentConfig, k: usize) -> Vec<Vec<f64>> {
    if let Some(a) = &cfg.alpha {
        return vec![a.clone()];
    }
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let lead = cfg.leading.unwrap_or(phi / factorial(k));
    (0..cfg.samples)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64);
            let mut c: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
            c.push(lead);
            c
        })
        .collect()
}

/// `|W(N)|` over a log grid for each coefficient sample, with log-log slope fits
/// on the upper part of the grid.
pub fn run(cfg: &ExperimentConfig) -> Result<Report<WeylDecaySummary>> {
    let shape = cfg.parsed_shape()?;
    let k = match &cfg.alpha {
        Some(a) if a.len() >= 2 => a.len() - 1,
        Some(_) => bail!("weyl-decay needs at least two coefficients"),
        None => shape.k(),
    };
    if k < 1 {
        bail!("Weyl sums need degree at least one");
    }
    let grid = cfg.n_grid();
    let start = cfg.fit_start(&grid);
    let x: Vec<f64> = grid.iter().map(|n| *n as f64).collect();

    let mut table = Table::new("weyl-decay", &cfg.shape, &["sample", "k", "coeffs", "n", "abs_w"]);
    let mut fits = Vec::new();
    let clock = Instant::now();
    for (i, coeffs) in coefficient_samples(cfg, k).into_iter().enumerate() {
        let ws = WeylSum::new(&WeylPolynomial::new(coeffs.clone()), WeylSumConfig::default());
        let w: Vec<f64> = ws.sum_grid(&grid).iter().map(|z| z.norm()).collect();
        let fit = fit_loglog(&x[start..], &w[start..])?;
        let tag = join(&coeffs);
        for (n, v) in grid.iter().zip(&w) {
            table.push(vec![i.to_string(), k.to_string(), tag.clone(), n.to_string(), num(*v)]);
        }
        fits.push(SampleFit { sample: i, coeffs, fit });
    }
    let wall = clock.elapsed().as_secs_f64();
    let terms = cfg.n_max * fits.len() as u64;
    let slopes: Vec<f64> = fits.iter().map(|f| f.fit.slope).collect();
    let fitted_slope = slopes.iter().sum::<f64>() / slopes.len() as f64;
    let max_slope = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bound = decay_exponent(k.max(2));
    let summary = WeylDecaySummary {
        k,
        samples: fits,
        fit_range: [grid[start], *grid.last().unwrap()],
        fitted_slope,
        max_slope,
        decay_bound: bound,
        epsilon: cfg.epsilon,
        weyl_bound: weyl_exponent(k),
        pass: max_slope <= bound + cfg.epsilon,
        terms,
        wall_seconds: wall,
        terms_per_second: terms as f64 / wall.max(1e-9),
    };
    Ok(Report { table, summary })
}
