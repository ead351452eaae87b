use anyhow::{bail, Result};
use nilweyl::diophantine::{best_approximations, continued_fraction, dc_check, dlemma_conditions, dn_constant_estimate, CountingSetup, DcCheck};
use nilweyl::stats::fit_loglog;
use serde::{Deserialize, Serialize};

use super::{Report, Summary};
use crate::config::ExperimentConfig;
use crate::output::{num, Table};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiophSummary {
    pub alpha: Vec<f64>,
    pub nu: f64,
    /// Partial quotients of `α_1` up to the precision of the input.
    pub partial_quotients: Vec<String>,
    pub dc: DcCheck,
    pub dc_pass: bool,
    pub c_min: f64,
    /// Largest counting ratio over the grid; a lower bound on the `D_n` constant.
    pub dn_constant: f64,
    /// Slope of `log max_δ ratio(N, δ)` against `log N` on the upper half of the grid.
    pub ratio_growth_slope: f64,
    pub ratio_diverges: bool,
    /// `q_{i+1} d_i^n ≤ 1` at every computed best approximation.
    pub dirichlet_ok: bool,
    pub certificate: bool,
}

impl Summary for DiophSummary {
    fn failure(&self) -> Option<String> {
        (!self.dirichlet_ok).then(|| "a best approximation violates q_{i+1} d_i^n ≤ 1".to_string())
    }
}

fn default_alpha() -> Vec<f64> {
    vec![0.5 * (5f64.sqrt() - 1.0)]
}

/// Classical constant, counting ratios and continued fraction of `α`.
pub fn run(cfg: &ExperimentConfig) -> Result<Report<DiophSummary>> {
    let alpha = cfg.alpha.clone().unwrap_or_else(default_alpha);
    if alpha.is_empty() {
        bail!("dioph needs at least one frequency");
    }
    let dc = dc_check(&alpha, cfg.nu, cfg.q_max)?;
    let best = best_approximations(&alpha, cfg.q_max)?;
    let n = alpha.len();
    let dirichlet_ok = if best.len() >= 3 {
        dlemma_conditions(&best, &vec![1.0 / n as f64; n], cfg.nu)?.dirichlet_ok
    } else {
        true
    };
    let cf = continued_fraction(&alpha[0], 40)?;
    let setup = CountingSetup::standard(alpha.clone())?.with_zero(cfg.include_zero);
    let est = dn_constant_estimate(&setup, cfg.nu, cfg.count_n_max)?;

    let mut table = Table::new("dioph", &cfg.shape, &["n", "delta", "count", "ratio"]);
    let mut by_n: Vec<(u64, f64)> = Vec::new();
    for r in &est.records {
        table.push(vec![r.n.to_string(), num(r.delta), r.count.to_string(), num(r.ratio)]);
        match by_n.last_mut() {
            Some((m, v)) if *m == r.n => *v = v.max(r.ratio),
            _ => by_n.push((r.n, r.ratio)),
        }
    }
    let half = &by_n[by_n.len() / 2..];
    let (x, y): (Vec<f64>, Vec<f64>) = half.iter().map(|(n, v)| (*n as f64, *v)).unzip();
    let ratio_growth_slope = fit_loglog(&x, &y).map(|f| f.slope).unwrap_or(0.0);
    let ratio_diverges = ratio_growth_slope > cfg.divergence_slope;
    let dc_pass = dc.c >= cfg.c_min;
    Ok(Report {
        table,
        summary: DiophSummary {
            alpha,
            nu: cfg.nu,
            partial_quotients: cf.quotients.iter().map(|q| q.to_string()).collect(),
            dc_pass,
            dc,
            c_min: cfg.c_min,
            dn_constant: est.c,
            ratio_growth_slope,
            ratio_diverges,
            dirichlet_ok,
            certificate: dc_pass && !ratio_diverges,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_passes_and_rational_fails() {
        let base = ExperimentConfig { q_max: 100_000, count_n_max: 20_000, ..Default::default() };
        let g = run(&base).unwrap().summary;
        assert!(g.certificate && g.dc_pass && !g.ratio_diverges, "{g:?}");
        assert!(g.partial_quotients[1..10].iter().all(|q| q == "1"));
        let r = run(&ExperimentConfig { alpha: Some(vec![0.375]), ..base }).unwrap().summary;
        assert!(!r.certificate && !r.dc_pass && r.ratio_diverges, "{r:?}");
        assert_eq!(r.dc.c, 0.0);
    }
}
