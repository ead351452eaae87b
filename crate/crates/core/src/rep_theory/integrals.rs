//! The integrals `I_σ`, `J^τ_σ`, transverse Sobolev norms and the Green operator
//! in the model `X ↦ d/dx`, `Y ↦ i P_{Λ,Y}(x)` on `L^2(ℝ)`.

use serde::{Deserialize, Serialize};

use super::forms::DeltaPolynomial;
use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, integrate, integrate_line, QuadratureConfig};

fn natural_scale(delta: &DeltaPolynomial<f64>) -> f64 {
    // Largest root scale of Δ: |a_j / a_top|^{1/(top-j)}, at least one.
    let top = delta.degree();
    if top == 0 {
        return 1.0;
    }
    let lead = delta.coeffs[top].abs();
    let mut s: f64 = 1.0;
    for j in 0..top {
        let c = delta.coeffs[j].abs();
        if c > 0.0 {
            s = s.max((c / lead).powf(1.0 / (top - j) as f64));
        }
    }
    // The bulk of 1/(1+Δ) sits where Δ ≲ 1.
    s.max(lead.powf(-1.0 / top as f64)).min(1e12)
}

fn check_i(delta: &DeltaPolynomial<f64>, sigma: f64) -> Result<()> {
    let deg = delta.degree();
    if (deg as f64) * sigma <= 1.0 {
        return Err(Error::Domain(format!(
            "∫(1+Δ)^(-σ) diverges: deg Δ = {deg}, σ = {sigma}; need σ·deg Δ > 1"
        )));
    }
    Ok(())
}

/// `I_σ = (∫_ℝ (1+Δ(x))^{-σ} dx)^{1/2}`.
pub fn integral_i(delta: &DeltaPolynomial<f64>, sigma: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_i(delta, sigma)?;
    let s = natural_scale(delta);
    let v = integrate_line(|x| (1.0 + delta.eval(x)).powf(-sigma), s, cfg).value;
    Ok(v.sqrt())
}

/// `J^τ_σ = (∬_{|y| ≥ |x|} (1+Δ(x))^τ (1+Δ(y))^{-σ} dx dy)^{1/2}`, as a one-dimensional
/// integral in `y` of the cumulative inner integral over `|x| ≤ |y|`.
pub fn integral_j(delta: &DeltaPolynomial<f64>, tau: f64, sigma: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let d = delta.degree() as f64 / 2.0;
    if d == 0.0 || sigma <= tau * d + 1.0 || tau < 0.0 {
        return Err(Error::Domain(format!(
            "J needs σ > τd + 1 with d = deg Δ / 2 = {d}; got τ = {tau}, σ = {sigma}"
        )));
    }
    let s = natural_scale(delta);
    let inner_cfg = QuadratureConfig { abs_tol: cfg.abs_tol * 0.1, ..*cfg };
    let cum = |r: f64| {
        if r == 0.0 {
            return 0.0;
        }
        let up = |x: f64| (1.0 + delta.eval(x)).powf(tau) + (1.0 + delta.eval(-x)).powf(tau);
        integrate(up, 0.0, r, &inner_cfg).value
    };
    let outer = |y: f64| {
        let c = cum(y);
        c * ((1.0 + delta.eval(y)).powf(-sigma) + (1.0 + delta.eval(-y)).powf(-sigma))
    };
    let v = crate::quad::integrate_half_line(outer, s, cfg).value;
    Ok(v.sqrt())
}

/// `|D^X_Λ|_{F,-σ}`, which equals `I_σ(Λ, F)`.
pub fn invariant_distribution_norm(delta: &DeltaPolynomial<f64>, sigma: f64, cfg: &QuadratureConfig) -> Result<f64> {
    integral_i(delta, sigma, cfg)
}

/// `|f|_{F,σ} = (∫ (1+Δ)^σ |f|^2)^{1/2}`, so that `I_σ` is the dual norm of `D^X_Λ`.
pub fn transverse_sobolev_norm(
    f: impl Fn(f64) -> f64,
    delta: &DeltaPolynomial<f64>,
    sigma: f64,
    scale: f64,
    cfg: &QuadratureConfig,
) -> f64 {
    let g = |x: f64| {
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            (1.0 + delta.eval(x)).powf(sigma) * v * v
        }
    };
    integrate_line(g, scale, cfg).value.sqrt()
}

/// Sampling window for [`green_apply`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GreenConfig {
    /// `f` is treated as zero outside `[-radius, radius]`.
    pub radius: f64,
    /// Number of panels of the cumulative rule.
    pub panels: usize,
    /// Gauss–Legendre nodes per panel.
    pub nodes: usize,
    /// Relative kernel tolerance: `|∫f| ≤ kernel_tol · ‖f‖_{L^1}`.
    pub kernel_tol: f64,
}

impl Default for GreenConfig {
    fn default() -> Self {
        Self { radius: 40.0, panels: 4000, nodes: 8, kernel_tol: 1e-9 }
    }
}

/// `G(f)(x) = ∫_{-∞}^x f` on a grid, with cubic Hermite interpolation in between.
#[derive(Clone, Debug)]
pub struct GreenFunction {
    pub grid: Vec<f64>,
    /// `∫_{-∞}^{x_i} f`.
    pub left: Vec<f64>,
    /// `-∫_{x_i}^{∞} f`.
    pub right: Vec<f64>,
    /// `f(x_i)`, the derivative of `G` at the grid points.
    pub slope: Vec<f64>,
    /// `max_i |left_i - right_i|`.
    pub mismatch: f64,
    pub mean: f64,
    pub l1: f64,
}

impl GreenFunction {
    /// Average of the two one-sided formulas, interpolated.
    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = (self.grid[0], *self.grid.last().unwrap());
        if x <= lo || x >= hi {
            return 0.0;
        }
        let h = self.grid[1] - self.grid[0];
        let i = (((x - lo) / h).floor() as usize).min(self.grid.len() - 2);
        let t = (x - self.grid[i]) / h;
        let g0 = 0.5 * (self.left[i] + self.right[i]);
        let g1 = 0.5 * (self.left[i + 1] + self.right[i + 1]);
        let (m0, m1) = (self.slope[i] * h, self.slope[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * g0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * g1 + (t3 - t2) * m1
    }
}

/// Green operator for `X u = f` on the kernel of `D^X_Λ`.
pub fn green_apply(f: impl Fn(f64) -> f64, cfg: &GreenConfig) -> Result<GreenFunction> {
    let (nodes, weights) = gauss_legendre(cfg.nodes.max(1));
    let r = cfg.radius;
    let h = 2.0 * r / cfg.panels as f64;
    let grid: Vec<f64> = (0..=cfg.panels).map(|i| -r + i as f64 * h).collect();
    let mut panel = Vec::with_capacity(cfg.panels);
    let mut l1 = 0.0;
    for i in 0..cfg.panels {
        let mid = grid[i] + 0.5 * h;
        let (mut s, mut a) = (0.0, 0.0);
        for (x, w) in nodes.iter().zip(&weights) {
            let v = f(mid + 0.5 * h * x);
            s += 0.5 * h * w * v;
            a += 0.5 * h * w * v.abs();
        }
        panel.push(s);
        l1 += a;
    }
    let mut left = vec![0.0; grid.len()];
    for i in 0..cfg.panels {
        left[i + 1] = left[i] + panel[i];
    }
    let mut right = vec![0.0; grid.len()];
    for i in (0..cfg.panels).rev() {
        right[i] = right[i + 1] - panel[i];
    }
    let mean = left[cfg.panels];
    if mean.abs() > cfg.kernel_tol * l1.max(f64::MIN_POSITIVE) {
        return Err(Error::Precondition(format!(
            "f is not in the kernel K^∞(π^X_Λ) of the invariant distribution: ∫f = {mean:e}, ‖f‖₁ = {l1:e}"
        )));
    }
    let mismatch = left.iter().zip(&right).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let slope = grid.iter().map(|&x| f(x)).collect();
    Ok(GreenFunction { grid, left, right, slope, mismatch, mean, l1 })
}

/// Sobolev ratio `|G f|_τ / |f|_σ` next to the bound `J^τ_σ`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GreenBoundCheck {
    pub ratio: f64,
    pub j: f64,
}

impl GreenBoundCheck {
    pub fn holds(&self, rel_slack: f64) -> bool {
        self.ratio <= self.j * (1.0 + rel_slack)
    }
}

/// Compares `|G f|_{F,τ} / |f|_{F,σ}` with `J^τ_σ(Λ,F)`.
pub fn green_bound_check(
    f: impl Fn(f64) -> f64 + Copy,
    delta: &DeltaPolynomial<f64>,
    tau: f64,
    sigma: f64,
    green: &GreenConfig,
    cfg: &QuadratureConfig,
) -> Result<GreenBoundCheck> {
    let g = green_apply(f, green)?;
    let j = integral_j(delta, tau, sigma, cfg)?;
    let num = {
        let r = green.radius;
        let h = |x: f64| {
            let v = g.eval(x);
            (1.0 + delta.eval(x)).powf(tau) * v * v
        };
        integrate(h, -r, r, &QuadratureConfig { max_subdivisions: 20_000, ..*cfg }).value.sqrt()
    };
    let den = transverse_sobolev_norm(f, delta, sigma, 1.0, cfg);
    Ok(GreenBoundCheck { ratio: num / den, j })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn x2() -> DeltaPolynomial<f64> {
        DeltaPolynomial::from_polynomials(vec![vec![0.0, 1.0]])
    }

    #[test]
    fn cauchy_closed_form() {
        let cfg = QuadratureConfig::default();
        let i = integral_i(&x2(), 1.0, &cfg).unwrap();
        assert!((i - PI.sqrt()).abs() < 1e-10);
        assert!(integral_i(&x2(), 0.5, &cfg).is_err());
    }

    #[test]
    fn j_closed_form_for_tau_zero() {
        // τ = 0, Δ = x², σ = 2: J² = ∫ 2|y| / (1+y²)² dy = 2.
        let cfg = QuadratureConfig::default();
        let j = integral_j(&x2(), 0.0, 2.0, &cfg).unwrap();
        assert!((j - 2f64.sqrt()).abs() < 1e-9);
        assert!(integral_j(&x2(), 1.0, 1.5, &cfg).is_err());
    }

    #[test]
    fn green_of_a_gaussian_derivative() {
        let f = |x: f64| -2.0 * x * (-x * x).exp();
        let g = green_apply(f, &GreenConfig::default()).unwrap();
        for x in [-3.0, -0.7, 0.0, 0.25, 1.9] {
            assert!((g.eval(x) - (-x * x).exp()).abs() < 1e-8, "x={x}");
        }
        assert!(g.mismatch < 1e-12);
        assert!(green_apply(|x: f64| (-x * x).exp(), &GreenConfig::default()).is_err());
    }

    #[test]
    fn sobolev_norm_of_a_gaussian() {
        let cfg = QuadratureConfig::default();
        let f = |x: f64| (-x * x / 2.0).exp();
        let n0 = transverse_sobolev_norm(f, &x2(), 0.0, 1.0, &cfg);
        assert!((n0 * n0 - PI.sqrt()).abs() < 1e-12);
        // ∫(1+x²)² e^{-x²} = √π (1 + 1 + 3/4)
        let n2 = transverse_sobolev_norm(f, &x2(), 2.0, 1.0, &cfg);
        assert!((n2 * n2 - PI.sqrt() * 2.75).abs() < 1e-11);
    }
}
