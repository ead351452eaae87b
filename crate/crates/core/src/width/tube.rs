use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::returns::{CloseReturns, ReturnTable};
use crate::error::{Error, Result};
use crate::lie_core::GroupElement;

/// Which of the three cross-section rules applies at a time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TubeCase {
    /// No stratum `j ≥ 1` contains the point.
    A,
    /// Some stratum beyond its cut-off contains the point; first-layer
    /// half-widths shrink to a quarter of the smallest such `δ'`. Under
    /// [`TubeRule::Joint`], `ell` is the largest `j ≥ 1` among the remaining strata
    /// and the transverse half-widths shrink as in case C.
    B { min_delta1: f64, ell: Option<u32> },
    /// Only strata up to their cut-offs; `ell` is the largest such `j`.
    C { ell: u32 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TubeSlice {
    pub t: f64,
    pub case: TubeCase,
    pub half_widths: Vec<f64>,
    /// Product of the side lengths `2 · half_width`.
    pub width: f64,
    /// `H^T_L` at the orbit point.
    pub big_h: f64,
}

/// First collision found by the audit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Collision {
    pub t: f64,
    pub t2: f64,
    pub r: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TubeAudit {
    pub pairs: usize,
    pub collision: Option<Collision>,
}

impl TubeAudit {
    pub fn passed(&self) -> bool {
        self.collision.is_none()
    }
}

/// The set `Ω = ∪_t Ω(t)` sampled along `t ∈ [0, T]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TubeConstruction {
    pub x: GroupElement<f64>,
    pub t: f64,
    pub l: f64,
    pub slices: Vec<TubeSlice>,
    pub audit: TubeAudit,
}

/// Output of [`average_width_lower_bound`]. Every field bounds `1/w` from above;
/// none is the width itself.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WidthBound {
    /// `(2/I)^a (1/T) ∫_0^T H^T_L ∘ φ^t(x) dt`.
    pub stated: f64,
    /// `(1/T) ∫_0^T dt / w_Ω(t)` for the constructed tube.
    pub tube: f64,
    /// Fraction of sampled times with `1/w_Ω(t) > (2/I)^a H^T_L`.
    pub pointwise_excess: f64,
    /// `max_t (1/w_Ω(t)) / ((2/I)^a H^T_L)`. At most `2^{a-n}` away from mixed
    /// case B slices.
    pub max_excess_ratio: f64,
    pub tube_construction: TubeConstruction,
}

impl WidthBound {
    /// Lower bound on the average width implied by the tube.
    pub fn width_lower_bound(&self) -> f64 {
        1.0 / self.tube
    }
}

/// How the cross section treats a point lying both beyond one cut-off and
/// within another.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TubeRule {
    /// Case B ignores the strata within their cut-offs. Not injective in general.
    ThreeCase,
    /// Case B also applies the case C transverse shrink.
    #[default]
    Joint,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WidthConfig {
    /// Quadrature points per unit of `X_α`-time.
    pub samples_per_unit: usize,
    pub audit_pairs: usize,
    pub seed: u64,
    pub rule: TubeRule,
}

impl Default for WidthConfig {
    fn default() -> Self {
        Self { samples_per_unit: 16, audit_pairs: 10_000, seed: 0, rule: TubeRule::Joint }
    }
}

impl CloseReturns {
    /// Cross section `Ω(t)` at the orbit point `p = (θ, h(θ)s)`.
    pub fn tube_slice(&self, table: &ReturnTable, t: f64, theta: f64, s: &[f64], rule: TubeRule) -> TubeSlice {
        let strata = self.strata_at(table, theta, s);
        let quarter = 0.25 * self.i_const;
        let a = self.shape().a();
        let first = self.shape().first_layer();
        let mut beyond: Option<f64> = None;
        let mut ell: Option<u32> = None;
        let mut big_h = 1.0;
        for &(idx, j) in &strata {
            let ar = &table.active[idx];
            big_h += self.stratum_weight(ar.delta1, ar.cutoff, j);
            if j > ar.cutoff {
                beyond = Some(beyond.map_or(ar.delta1, |b: f64| b.min(ar.delta1)));
            } else {
                ell = Some(ell.map_or(j, |e: u32| e.max(j)));
            }
        }
        let transverse = |e: Option<u32>| e.map_or(quarter, |e| quarter * 0.5f64.powi(e as i32 + 1));
        let (case, half_widths): (TubeCase, Vec<f64>) = match (beyond, ell) {
            (Some(d), e) => {
                let e = if rule == TubeRule::Joint { e } else { None };
                (
                    TubeCase::B { min_delta1: d, ell: e },
                    (0..a).map(|i| if first.contains(&i) { 0.25 * d } else { transverse(e) }).collect(),
                )
            }
            (None, Some(e)) => (
                TubeCase::C { ell: e },
                (0..a).map(|i| if first.contains(&i) { quarter } else { quarter * 0.5f64.powi(e as i32 + 1) }).collect(),
            ),
            (None, None) => (TubeCase::A, vec![quarter; a]),
        };
        let width = half_widths.iter().map(|h| 2.0 * h).product();
        TubeSlice { t, case, half_widths, width, big_h }
    }

    /// `w_Ω(t)` from the closed-form three-case expression.
    pub fn closed_form_width(&self, case: &TubeCase) -> f64 {
        let a = self.shape().a() as i32;
        let n = self.n() as i32;
        let half_i = 0.5 * self.i_const;
        match *case {
            TubeCase::A => half_i.powi(a),
            TubeCase::B { min_delta1, ell } => {
                let shrink = ell.map_or(1.0, |e| 2f64.powi(-(a - n) * (e as i32 + 1)));
                half_i.powi(a - n) * (0.5 * min_delta1).powi(n) * shrink
            }
            TubeCase::C { ell } => half_i.powi(a) * 2f64.powi(-(a - n) * (ell as i32 + 1)),
        }
    }

    fn orbit_point(&self, x: &GroupElement<f64>, time: f64) -> (f64, Vec<f64>) {
        let p = self.flow.flow(x, time);
        let s = self.shape().apply_h(&-p.t, &p.v);
        (p.t, s)
    }
}

/// Upper bounds on `1/w_{F^{(L)}}(x, T)` from the stated right-hand side and from
/// an explicit tube, with a sampled audit of the tube's injectivity.
pub fn average_width_lower_bound(cr: &CloseReturns, x: &GroupElement<f64>, t: f64, l: f64, cfg: &WidthConfig) -> Result<WidthBound> {
    if !(t >= 1.0 && l >= 1.0) {
        return Err(Error::Argument(format!("need T, L ≥ 1, got T = {t}, L = {l}")));
    }
    cr.flow.check(x)?;
    let table = cr.table(t, l);
    let span = t * l;
    let count = ((span * cfg.samples_per_unit as f64).ceil() as usize).max(1);
    let dt = t / count as f64;
    let slices: Vec<TubeSlice> = (0..count)
        .into_par_iter()
        .map(|i| {
            let ti = (i as f64 + 0.5) * dt;
            let (theta, s) = cr.orbit_point(x, ti * l);
            cr.tube_slice(&table, ti, theta, &s, cfg.rule)
        })
        .collect();
    let scale = (2.0 / cr.i_const).powi(cr.shape().a() as i32);
    let stated = scale * slices.iter().map(|s| s.big_h).sum::<f64>() / count as f64;
    let tube = slices.iter().map(|s| 1.0 / s.width).sum::<f64>() / count as f64;
    let mut excess = 0usize;
    let mut max_excess_ratio: f64 = 0.0;
    for s in &slices {
        let ratio = (1.0 / s.width) / (scale * s.big_h);
        max_excess_ratio = max_excess_ratio.max(ratio);
        if ratio > 1.0 + 1e-12 {
            excess += 1;
        }
    }
    let audit = audit_tube(cr, &table, x, &slices, cfg);
    Ok(WidthBound {
        stated,
        tube,
        pointwise_excess: excess as f64 / count as f64,
        max_excess_ratio,
        tube_construction: TubeConstruction { x: x.clone(), t, l, slices, audit },
    })
}

/// Two cross sections can only meet when their times differ by `r/L` with
/// `r` a positive integer; the audit samples such pairs, half of them with
/// `r` drawn from the active returns.
fn audit_tube(cr: &CloseReturns, table: &ReturnTable, x: &GroupElement<f64>, slices: &[TubeSlice], cfg: &WidthConfig) -> TubeAudit {
    let l = table.l;
    let t_end = table.t;
    let mut positive: Vec<i64> = table.active.iter().map(|a| a.r).filter(|r| *r > 0).collect();
    positive.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pairs = 0;
    for _ in 0..cfg.audit_pairs {
        let i = rng.gen_range(0..slices.len());
        let t0 = slices[i].t;
        let room = ((t_end - t0) * l).floor() as i64;
        if room < 1 {
            continue;
        }
        let fit = positive.partition_point(|r| *r <= room);
        let r = if fit > 0 && rng.gen_bool(0.5) { positive[rng.gen_range(0..fit)] } else { rng.gen_range(1..=room) };
        pairs += 1;
        let t1 = t0 + r as f64 / l;
        let (theta, s) = cr.orbit_point(x, t0 * l);
        let (theta1, s1) = cr.orbit_point(x, t1 * l);
        let other = cr.tube_slice(table, t1, theta1, &s1, cfg.rule);
        let d = cr.displacement(theta, &s, r);
        let hit = d
            .iter()
            .enumerate()
            .all(|(k, dk)| l.powf(cr.rho[k]) * dk.abs() < slices[i].half_widths[k] + other.half_widths[k]);
        if hit {
            return TubeAudit { pairs, collision: Some(Collision { t: t0, t2: t1, r }) };
        }
    }
    TubeAudit { pairs, collision: None }
}
