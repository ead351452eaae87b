//! Ergodic integrals along orbits and the embedding of circle functions into
//! the nilmanifold that turns Weyl sums into ergodic integrals.

use serde::{Deserialize, Serialize};

use super::flow::Nilflow;
use super::weyl_poly::weyl_polynomial_mod1;
use crate::error::{Error, Result};
use crate::lie_core::GroupElement;
use crate::quad::CompositeRule;

/// Composite Gauss–Legendre rule along an orbit; one node per panel is the midpoint rule.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OrbitQuadrature {
    /// Panel width in flow time.
    pub panel: f64,
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
}

impl Default for OrbitQuadrature {
    fn default() -> Self {
        Self { panel: 0.125, nodes: 4 }
    }
}

/// `∫_{t0}^{t1} f(φ^t x) dt`.
pub fn orbit_integral(
    flow: &Nilflow,
    f: &dyn Fn(&GroupElement<f64>) -> f64,
    x: &GroupElement<f64>,
    t0: f64,
    t1: f64,
    q: &OrbitQuadrature,
) -> f64 {
    let rule = CompositeRule::new(q.nodes.max(1));
    rule.points(t0, t1, q.panel).into_iter().map(|(t, w)| w * f(&flow.flow(x, t))).sum()
}

/// Birkhoff average `(1/T) ∫_0^T f(φ^t x) dt`.
///
/// Written as `f_0 + Σ w_i (f_i - f_0) / Σ w_i`, so constants are returned exactly.
pub fn birkhoff_average(
    flow: &Nilflow,
    f: &dyn Fn(&GroupElement<f64>) -> f64,
    x: &GroupElement<f64>,
    t: f64,
    q: &OrbitQuadrature,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Argument(format!("averaging time must be positive, got {t}")));
    }
    flow.check(x)?;
    let rule = CompositeRule::new(q.nodes.max(1));
    let pts = rule.points(0.0, t, q.panel);
    let vals: Vec<f64> = pts.iter().map(|(s, _)| f(&flow.flow(x, *s))).collect();
    let f0 = vals[0];
    let wsum: f64 = pts.iter().map(|p| p.1).sum();
    let dev: f64 = pts.iter().zip(&vals).map(|((_, w), v)| w * (v - f0)).sum();
    Ok(f0 + dev / wsum)
}

/// Normalized polynomial bump `c (1 - (t/ε)^2)^p` on `(-ε, ε)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Bump {
    pub eps: f64,
    pub power: u32,
    norm: f64,
}

impl Bump {
    pub fn new(eps: f64, power: u32) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::Argument(format!("bump half-width must lie in (0, 1/2), got {eps}")));
        }
        // ∫_{-1}^{1} (1 - x^2)^p dx = 2^{2p+1} (p!)^2 / (2p+1)!
        let p = power as i32;
        let mut integral = 2.0;
        for j in 1..=p {
            integral *= (2 * j) as f64 / (2 * j + 1) as f64;
        }
        Ok(Self { eps, power, norm: 1.0 / (eps * integral) })
    }

    /// `C^{p-1}` bump; `power = 3` gives a `C^2` function.
    pub fn c2(eps: f64) -> Result<Self> {
        Self::new(eps, 3)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let x = t / self.eps;
        if x.abs() >= 1.0 {
            return 0.0;
        }
        self.norm * (1.0 - x * x).powi(self.power as i32)
    }
}

/// The function `F(f)` on a filiform nilmanifold with
/// `F(f)(φ^t(0, s)) = χ(t) f(s_k)` for `|t| < ε` and zero off that tube.
pub struct EmbeddedFunction<'a> {
    flow: &'a Nilflow,
    bump: Bump,
    f: &'a (dyn Fn(f64) -> f64 + Sync),
}

impl<'a> EmbeddedFunction<'a> {
    pub fn new(flow: &'a Nilflow, bump: Bump, f: &'a (dyn Fn(f64) -> f64 + Sync)) -> Result<Self> {
        if flow.shape().n() != 1 {
            return Err(Error::Argument(format!("embedding needs a filiform shape, got {}", flow.shape())));
        }
        Ok(Self { flow, bump, f })
    }

    /// Tube time `τ` and section coordinates `s` with `y = φ^τ(0, s)`, if `y` is in the tube.
    pub fn tube_coordinates(&self, y: &GroupElement<f64>) -> Option<(f64, Vec<f64>)> {
        let shape = self.flow.shape();
        let y = shape.reduce(y).ok()?;
        let eps = self.bump.eps;
        let tau = if y.t < eps {
            -y.t
        } else if y.t > 1.0 - eps {
            1.0 - y.t
        } else {
            return None;
        };
        // z = y exp(-τ X) = (t_y + τ, v + h(t_y) e(-τ)), with t_y + τ an integer q.
        let e = self.flow.exp_ideal(-tau);
        let he = shape.apply_h(&y.t, &e);
        let v: Vec<f64> = y.v.iter().zip(he).map(|(a, b)| a + b).collect();
        let q = (y.t + tau).round();
        let s: Vec<f64> = shape.apply_h(&-q, &v).into_iter().map(crate::modmath::frac).collect();
        Some((tau, s))
    }

    pub fn eval(&self, y: &GroupElement<f64>) -> f64 {
        match self.tube_coordinates(y) {
            Some((tau, s)) => self.bump.eval(tau) * (self.f)(*s.last().unwrap()),
            None => 0.0,
        }
    }
}

/// Whether the discrete sum runs over `ℓ = 0..=N` or `ℓ = 0..N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SumRange {
    /// `ℓ = 0, ..., N` (the integral runs over `[-ε, N + ε]`).
    Inclusive,
    /// `ℓ = 0, ..., N - 1` (the integral runs over `[-ε, N - ε]`).
    Exclusive,
}

/// Both sides of the identity `∫ F(f)(φ^t(0,s)) dt = Σ_ℓ f(P_k(α, s, ℓ))`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ReductionCheck {
    pub integral: f64,
    pub sum: f64,
}

impl ReductionCheck {
    pub fn error(&self) -> f64 {
        (self.integral - self.sum).abs()
    }
}

/// Evaluates both sides of the Weyl-sum/ergodic-integral reduction on a filiform nilmanifold.
pub fn reduction_identity(
    flow: &Nilflow,
    f: &(dyn Fn(f64) -> f64 + Sync),
    s: &[f64],
    bump: Bump,
    n: u64,
    range: SumRange,
    q: &OrbitQuadrature,
) -> Result<ReductionCheck> {
    let emb = EmbeddedFunction::new(flow, bump, f)?;
    let x0 = GroupElement::new(0.0, s.to_vec());
    flow.check(&x0)?;
    let eps = bump.eps;
    let (t1, last) = match range {
        SumRange::Inclusive => (n as f64 + eps, n as i64),
        SumRange::Exclusive => (n as f64 - eps, n as i64 - 1),
    };
    let integrand = |y: &GroupElement<f64>| emb.eval(y);
    // Break at every tube edge ℓ ± ε so each panel sees a polynomial integrand.
    let mut cuts = vec![-eps];
    for l in 0..=n as i64 {
        for c in [l as f64 - eps, l as f64 + eps] {
            if c > *cuts.last().unwrap() && c < t1 {
                cuts.push(c);
            }
        }
    }
    cuts.push(t1);
    let integral = cuts.windows(2).map(|w| orbit_integral(flow, &integrand, &x0, w[0], w[1], q)).sum();
    let alpha = flow.alpha();
    let mut sum = 0.0;
    for l in 0..=last {
        sum += f(weyl_polynomial_mod1(alpha, s, l)?);
    }
    Ok(ReductionCheck { integral, sum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::AlgebraShape;

    #[test]
    fn bump_has_unit_mass() {
        for p in 1..5 {
            let b = Bump::new(0.2, p).unwrap();
            let r = CompositeRule::new(8);
            let m = r.integrate(|t| b.eval(t), -0.2, 0.2, 0.05);
            assert!((m - 1.0).abs() < 1e-13, "p={p} m={m}");
        }
        assert!(Bump::new(0.5, 2).is_err());
    }

    #[test]
    fn constant_average_is_exact() {
        let fl = Nilflow::new(AlgebraShape::filiform(2), vec![0.618_033_988_749_894_9, 0.3]).unwrap();
        let x = GroupElement::new(0.1, vec![0.2, 0.3]);
        let c = 0.1f64;
        let avg = birkhoff_average(&fl, &|_| c, &x, 7.3, &OrbitQuadrature::default()).unwrap();
        assert_eq!(avg, c);
    }

    #[test]
    fn embedded_function_vanishes_off_tube() {
        let fl = Nilflow::new(AlgebraShape::filiform(2), vec![0.3, 0.1]).unwrap();
        let f = |x: f64| (std::f64::consts::TAU * x).cos();
        let emb = EmbeddedFunction::new(&fl, Bump::c2(0.1).unwrap(), &f).unwrap();
        assert_eq!(emb.eval(&GroupElement::new(0.5, vec![0.2, 0.7])), 0.0);
        let s = [0.25, 0.4];
        let y = fl.flow(&GroupElement::new(0.0, s.to_vec()), 0.05);
        let expected = Bump::c2(0.1).unwrap().eval(0.05) * f(0.4);
        assert!((emb.eval(&y) - expected).abs() < 1e-12);
    }
}
