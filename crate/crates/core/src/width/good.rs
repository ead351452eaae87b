use serde::{Deserialize, Serialize};

use super::returns::CloseReturns;
use super::tube::{average_width_lower_bound, WidthConfig};
use crate::error::{Error, Result};
use crate::lie_core::GroupElement;

/// Parameters `(w, (L_i), ζ)` of a good point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GoodPointSpec {
    pub w: f64,
    pub levels: Vec<f64>,
    pub zeta: f64,
}

impl GoodPointSpec {
    pub fn new(w: f64, levels: Vec<f64>, zeta: f64) -> Result<Self> {
        if !(w > 0.0 && zeta > 0.0) {
            return Err(Error::Argument("w and ζ must be positive".into()));
        }
        if levels.is_empty() || levels[0] < 2.0 || levels.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::Argument("levels must be increasing and at least 2".into()));
        }
        Ok(Self { w, levels, zeta })
    }

    /// `N_i = [log L_i / log 2]`.
    pub fn n_i(&self, i: usize) -> usize {
        self.levels[i].log2().floor() as usize
    }

    /// `L_{j,i} = L_i^{j/N_i}`.
    pub fn l_ji(&self, j: usize, i: usize) -> f64 {
        self.levels[i].powf(j as f64 / self.n_i(i) as f64)
    }

    /// `Σ_i (log L_i)^2 L_i^{-ζ}` over the given levels.
    pub fn series(&self) -> f64 {
        self.levels.iter().map(|l| l.ln().powi(2) * l.powf(-self.zeta)).sum()
    }

    /// `w / L_i^ζ`.
    pub fn threshold(&self, i: usize) -> f64 {
        self.w * self.levels[i].powf(-self.zeta)
    }
}

/// One `(i, j)` check at `x` or at `y_i = φ^{L_i}(x)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GoodPointRow {
    pub i: usize,
    pub j: usize,
    pub at_y: bool,
    pub scale: f64,
    /// Tube lower bound on `w_{F^{(L_{j,i})}}(·, 1)`.
    pub width_bound: f64,
    pub threshold: f64,
}

impl GoodPointRow {
    pub fn passes(&self) -> bool {
        self.width_bound >= self.threshold
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GoodPointReport {
    pub good: bool,
    pub witness: Option<GoodPointRow>,
    pub rows: Vec<GoodPointRow>,
}

/// Tests the good-point inequalities with the tube width bound in place of the
/// width. A point the bound rejects may still be good; a point it accepts is good.
pub fn good_point_test(cr: &CloseReturns, x: &GroupElement<f64>, spec: &GoodPointSpec, cfg: &WidthConfig) -> Result<GoodPointReport> {
    let cfg = WidthConfig { audit_pairs: 0, ..*cfg };
    let mut rows = Vec::new();
    for i in 0..spec.levels.len() {
        let y = cr.flow.flow(x, spec.levels[i]);
        for j in 0..=spec.n_i(i) {
            let scale = spec.l_ji(j, i);
            for (at_y, p) in [(false, x), (true, &y)] {
                let b = average_width_lower_bound(cr, p, 1.0, scale, &cfg)?;
                let row = GoodPointRow { i, j, at_y, scale, width_bound: b.width_lower_bound(), threshold: spec.threshold(i) };
                let ok = row.passes();
                rows.push(row.clone());
                if !ok {
                    return Ok(GoodPointReport { good: false, witness: Some(row), rows });
                }
            }
        }
    }
    Ok(GoodPointReport { good: true, witness: None, rows })
}
