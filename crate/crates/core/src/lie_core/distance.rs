//! Coordinate distances along the ideal and the injectivity radius `I(Y)`.

use serde::{Deserialize, Serialize};

use super::basis::AdaptedBasis;
use super::group::GroupElement;
use super::shape::AlgebraShape;
use crate::linalg::Matrix;

/// Lower bound for `I(Y)`, the largest `I' ≤ 1/2` such that
/// `s ↦ x exp(Σ s_i Y_i)` is injective on `|s_i| < I'` for every `x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InjectivityRadius {
    pub value: f64,
    /// True when the value is proved (triangular structure) or certified by the search.
    pub certified: bool,
}

/// Search parameters for [`injectivity_radius`] and [`coordinate_displacement`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DistanceConfig {
    /// Lattice translates `m` are searched in a sup-norm ball of this radius.
    pub search_radius: i64,
    /// Number of fiber parameters `θ ∈ [0,1)` sampled for `I(Y)`.
    pub theta_grid: usize,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        Self { search_radius: 2, theta_grid: 64 }
    }
}

/// Precomputed data for distances with respect to one basis of the ideal.
#[derive(Clone, Debug)]
pub struct IdealFrame {
    pub shape: AlgebraShape,
    pub b: Matrix<f64>,
    pub binv: Matrix<f64>,
    pub radius: InjectivityRadius,
    pub cfg: DistanceConfig,
}

impl IdealFrame {
    pub fn new(basis: &AdaptedBasis<f64>, cfg: DistanceConfig) -> Self {
        let b = basis.coordinate_matrix();
        let binv = b.inverse().expect("basis spans the ideal");
        let radius = injectivity_radius_from(&basis.shape, &basis.y, &b, &binv, cfg);
        Self { shape: basis.shape.clone(), b, binv, radius, cfg }
    }

    /// Injectivity radius `I(Y)`.
    pub fn i(&self) -> f64 {
        self.radius.value
    }

    /// Coordinates `s` of minimal sup norm with `γ x2 = x1 exp(Σ s_i Y_i)` for
    /// some lattice element `γ`, searched over translates `m`. Points must be
    /// reduced; `None` when they lie on different fibers.
    pub fn displacement(&self, x1: &GroupElement<f64>, x2: &GroupElement<f64>) -> Option<Vec<f64>> {
        if (x1.t - x2.t).abs() > 1e-12 {
            return None;
        }
        let diff: Vec<f64> = x2.v.iter().zip(&x1.v).map(|(p, q)| p - q).collect();
        Some(self.min_translate(x1.t, &diff))
    }

    /// Minimal sup-norm solution `s = B^{-1} h(-θ)(d + m)` over integer `m`.
    pub fn min_translate(&self, theta: f64, d: &[f64]) -> Vec<f64> {
        let a = d.len();
        let base: Vec<f64> = d.iter().map(|x| x - x.round()).collect();
        let r = self.cfg.search_radius;
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut m = vec![-r; a];
        loop {
            let cand: Vec<f64> = base.iter().zip(&m).map(|(x, &mi)| x + mi as f64).collect();
            let s = self.binv.mul_vec(&self.shape.apply_h(&-theta, &cand));
            let nrm = s.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
            if best.as_ref().is_none_or(|(b, _)| nrm < *b) {
                best = Some((nrm, s));
            }
            // odometer over {-r..r}^a
            let mut i = 0;
            loop {
                if i == a {
                    return best.unwrap().1;
                }
                m[i] += 1;
                if m[i] <= r {
                    break;
                }
                m[i] = -r;
                i += 1;
            }
        }
    }

    /// `(‖x2 - x1‖_1, ..., ‖x2 - x1‖_a)`: `|s_i|` when the minimal displacement lies
    /// in `[-I/2, I/2]^a`, otherwise `I` in every coordinate.
    pub fn distance(&self, x1: &GroupElement<f64>, x2: &GroupElement<f64>) -> Vec<f64> {
        let i = self.i();
        match self.displacement(x1, x2) {
            Some(s) if s.iter().all(|x| x.abs() <= i / 2.0) => s.iter().map(|x| x.abs()).collect(),
            _ => vec![i; self.shape.a()],
        }
    }
}

/// Convenience wrapper returning the distance vector and `I(Y)`.
pub fn coordinate_distance(
    x1: &GroupElement<f64>,
    x2: &GroupElement<f64>,
    basis: &AdaptedBasis<f64>,
    cfg: DistanceConfig,
) -> (Vec<f64>, f64) {
    let frame = IdealFrame::new(basis, cfg);
    (frame.distance(x1, x2), frame.i())
}

/// Certified lower bound for `I(Y)`.
pub fn injectivity_radius(basis: &AdaptedBasis<f64>, cfg: DistanceConfig) -> InjectivityRadius {
    let b = basis.coordinate_matrix();
    let binv = b.inverse().expect("basis spans the ideal");
    injectivity_radius_from(&basis.shape, &basis.y, &b, &binv, cfg)
}

fn injectivity_radius_from(
    shape: &AlgebraShape,
    y: &[Vec<f64>],
    b: &Matrix<f64>,
    binv: &Matrix<f64>,
    cfg: DistanceConfig,
) -> InjectivityRadius {
    if triangular_unit_bound(shape, y) {
        return InjectivityRadius { value: 0.5, certified: true };
    }
    let a = shape.a();
    let r = cfg.search_radius;
    let grid = cfg.theta_grid.max(2);
    let n_norm = {
        let mut m = Matrix::zeros(a, a);
        for j in 0..a {
            let mut e = vec![0.0; a];
            e[j] = 1.0;
            for (i, v) in shape.apply_n(&e).into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m.norm_inf()
    };
    let k = shape.k() as f64;
    let lip = binv.norm_inf() * n_norm * k * r as f64;
    let mut raw = f64::INFINITY;
    let mut hb_max: f64 = 0.0;
    for g in 0..grid {
        let theta = g as f64 / grid as f64;
        let mut m = vec![-r; a];
        loop {
            if m.iter().any(|&x| x != 0) {
                let mf: Vec<f64> = m.iter().map(|&x| x as f64).collect();
                let s = binv.mul_vec(&shape.apply_h(&-theta, &mf));
                raw = raw.min(s.iter().fold(0.0f64, |acc, x| acc.max(x.abs())));
            }
            let mut i = 0;
            let mut done = false;
            loop {
                if i == a {
                    done = true;
                    break;
                }
                m[i] += 1;
                if m[i] <= r {
                    break;
                }
                m[i] = -r;
                i += 1;
            }
            if done {
                break;
            }
        }
        let hb = (0..a)
            .map(|j| shape.apply_h(&theta, &b.column(j)))
            .collect::<Vec<_>>();
        hb_max = hb_max.max(Matrix::from_columns(&hb).norm_inf());
    }
    let slack = lip * 0.5 / grid as f64;
    let inside = (raw - slack).max(0.0);
    let outside = (r as f64 + 1.0) / (hb_max * (1.0 + 1e-12) + slack);
    let value = (0.5 * inside.min(outside)).min(0.5);
    InjectivityRadius { value, certified: value > 0.0 }
}

/// True when every `Y_p` lives in one block, the leading coordinates are a
/// permutation of the index set and each leading coefficient has modulus at
/// most one. Then `B^{-1} h(-θ) m` keeps the leading integer entry of `m`
/// up to a factor `≥ 1`, so every nonzero translate has sup norm `≥ 1`.
fn triangular_unit_bound(shape: &AlgebraShape, y: &[Vec<f64>]) -> bool {
    let a = shape.a();
    let mut seen = vec![false; a];
    for v in y {
        let nz: Vec<usize> = (0..a).filter(|&i| v[i] != 0.0).collect();
        let Some(&lead) = nz.first() else { return false };
        let (m, _) = shape.pair(lead);
        if nz.iter().any(|&i| shape.pair(i).0 != m) {
            return false;
        }
        if seen[lead] || v[lead].abs() > 1.0 {
            return false;
        }
        seen[lead] = true;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::basis::{jordan_from_lattice_basis, BasisKind};
    use crate::lie_core::group::AlgebraElement;
    use crate::scalar::Rational;

    fn jordan_f64(shape: &str) -> AdaptedBasis<f64> {
        let s: AlgebraShape = shape.parse().unwrap();
        jordan_from_lattice_basis::<Rational>(&s).basis.map(crate::scalar::Scalar::to_f64)
    }

    #[test]
    fn jordan_radius_is_one_half() {
        let b = jordan_f64("3|3,2");
        let r = injectivity_radius(&b, DistanceConfig::default());
        assert_eq!(r.value, 0.5);
        assert!(r.certified);
    }

    #[test]
    fn skewed_basis_gets_certified_smaller_radius() {
        let s = AlgebraShape::filiform(2);
        let y = vec![vec![1.0, 0.0], vec![0.7, 2.0]];
        let b = AdaptedBasis::new(s, AlgebraElement::xi(2), y, BasisKind::Adapted).unwrap();
        let r = injectivity_radius(&b, DistanceConfig::default());
        assert!(r.value > 0.0 && r.value < 0.5, "{:?}", r);
    }

    #[test]
    fn distance_along_first_vector() {
        let b = jordan_f64("3|3");
        let s = b.shape.clone();
        let frame = IdealFrame::new(&b, DistanceConfig::default());
        let x = s.reduce(&GroupElement::new(0.3, vec![0.1, 0.7, 0.25])).unwrap();
        let eps = 1e-3;
        let step = s.exp(&AlgebraElement::new(0.0, b.y[0].iter().map(|c| c * eps).collect())).unwrap();
        let x2 = s.reduce(&s.group_mul(&x, &step).unwrap()).unwrap();
        let d = frame.distance(&x, &x2);
        assert!((d[0] - eps).abs() < 1e-14 && d[1] < 1e-14 && d[2] < 1e-14, "{d:?}");
        assert!(frame.distance(&x, &x).iter().all(|&v| v == 0.0));
    }
}
