use anyhow::{bail, Result};
use nilweyl::lie_core::{AlgebraShape, GroupElement};
use nilweyl::nilflow::Nilflow;
use nilweyl::stats::fit_loglog;
use nilweyl::width::{average_width_lower_bound, CloseReturns, TubeRule, WidthConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Report, Summary};
use crate::config::ExperimentConfig;
use crate::output::{num, Table};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CollisionReport {
    pub point: usize,
    pub t_cap: f64,
    pub t: f64,
    pub t2: f64,
    pub r: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WidthSummary {
    pub alpha: Vec<f64>,
    pub rho: Vec<f64>,
    pub l: f64,
    /// Mean over base points of the tube bound on `1/w`, per `T`.
    pub mean_inverse_width: Vec<f64>,
    /// Mean over base points of the stated bound on `1/w`, per `T`.
    pub mean_stated: Vec<f64>,
    /// Log-log slope of `mean_inverse_width` against `T`.
    pub growth_slope: f64,
    /// Log-log slope of `mean_stated` against `T`.
    pub stated_slope: f64,
    /// Growth faster than `T^collapse_slope`. Generic frequencies grow about linearly.
    pub collapse: bool,
    pub audit_pairs: usize,
    pub first_collision: Option<CollisionReport>,
}

impl Summary for WidthSummary {
    fn failure(&self) -> Option<String> {
        self.first_collision
            .as_ref()
            .map(|c| format!("tube overlap at point {}, T = {}: t = {}, t' = {}, r = {}", c.point, c.t_cap, c.t, c.t2, c.r))
    }
}

pub fn default_alpha(shape: &AlgebraShape) -> Vec<f64> {
    let first = shape.first_layer();
    (0..shape.a())
        .map(|i| {
            if let Some(m) = first.iter().position(|&j| j == i) {
                // Golden ratio multiples keep the first layer badly approximable.
                (0.5 * (5f64.sqrt() - 1.0) * (m + 1) as f64).fract()
            } else {
                (0.37 * i as f64).fract()
            }
        })
        .collect()
}

pub fn default_rho(shape: &AlgebraShape) -> Vec<f64> {
    let k = shape.k() as f64;
    let mut rho = vec![0.0; shape.a()];
    for m in 0..shape.n() {
        for (i, j) in shape.block(m).enumerate() {
            rho[j] = 0.6 * (k - 1.0 - i as f64).max(0.0) / k;
        }
    }
    rho
}

/// Tube bounds on `1/w_{F^{(L)}}(x, T)` over a `T`-grid at seeded base points.
pub fn run(cfg: &ExperimentConfig) -> Result<Report<WidthSummary>> {
    let shape = cfg.parsed_shape()?;
    let alpha = cfg.alpha.clone().unwrap_or_else(|| default_alpha(&shape));
    let rho = cfg.rho.clone().unwrap_or_else(|| default_rho(&shape));
    if rho.len() != shape.a() {
        bail!("ρ needs {} entries, got {}", shape.a(), rho.len());
    }
    let flow = Nilflow::new(shape.clone(), alpha.clone())?;
    let cr = CloseReturns::new(flow, rho.clone(), cfg.i_const)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points: Vec<GroupElement<f64>> =
        (0..cfg.base_points).map(|_| GroupElement::new(rng.gen(), (0..shape.a()).map(|_| rng.gen()).collect())).collect();

    let mut table = Table::new(
        "width-scan",
        &cfg.shape,
        &["point", "t_cap", "l", "stated", "tube", "width_lower_bound", "pointwise_excess", "max_excess_ratio", "audit_pairs", "collision"],
    );
    let mut mean_inverse_width = vec![0.0; cfg.t_grid.len()];
    let mut mean_stated = vec![0.0; cfg.t_grid.len()];
    let mut audit_pairs = 0;
    let mut first_collision = None;
    for (p, x) in points.iter().enumerate() {
        for (ti, &t_cap) in cfg.t_grid.iter().enumerate() {
            let wc = WidthConfig {
                samples_per_unit: cfg.samples_per_unit,
                audit_pairs: cfg.audit_pairs,
                seed: cfg.seed.wrapping_add((p * cfg.t_grid.len() + ti) as u64),
                rule: TubeRule::Joint,
            };
            let b = average_width_lower_bound(&cr, x, t_cap, cfg.l, &wc)?;
            let audit = &b.tube_construction.audit;
            audit_pairs += audit.pairs;
            if let (Some(c), None) = (&audit.collision, &first_collision) {
                first_collision = Some(CollisionReport { point: p, t_cap, t: c.t, t2: c.t2, r: c.r });
            }
            mean_inverse_width[ti] += b.tube / points.len() as f64;
            mean_stated[ti] += b.stated / points.len() as f64;
            table.push(vec![
                p.to_string(),
                num(t_cap),
                num(cfg.l),
                num(b.stated),
                num(b.tube),
                num(b.width_lower_bound()),
                num(b.pointwise_excess),
                num(b.max_excess_ratio),
                audit.pairs.to_string(),
                audit.collision.is_some().to_string(),
            ]);
        }
    }
    let growth_slope = fit_loglog(&cfg.t_grid, &mean_inverse_width)?.slope;
    let stated_slope = fit_loglog(&cfg.t_grid, &mean_stated)?.slope;
    Ok(Report {
        table,
        summary: WidthSummary {
            alpha,
            rho,
            l: cfg.l,
            mean_inverse_width,
            mean_stated,
            growth_slope,
            stated_slope,
            collapse: growth_slope > cfg.collapse_slope,
            audit_pairs,
            first_collision,
        },
    })
}
