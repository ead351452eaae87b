//! The diagonal rescaling `A^ρ_t` of adapted bases and its effect on representation data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_core::{AdaptedBasis, AlgebraShape};
use crate::quad::QuadratureConfig;
use crate::rep_theory::{integral_i, RepCoefficients};
use crate::scalar::Scalar;
use crate::stats::{fit_line, LineFit};

/// Scaling exponents `ρ_i^{(m)}`, indexed like the shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingExponents<T> {
    pub shape: AlgebraShape,
    pub rho: Vec<T>,
}

impl<T: Scalar> ScalingExponents<T> {
    pub fn new(shape: AlgebraShape, rho: Vec<T>) -> Result<Self> {
        if rho.len() != shape.a() {
            return Err(Error::Argument(format!("{} scaling exponents for dimension {}", rho.len(), shape.a())));
        }
        if rho.iter().any(|r| *r < T::zero()) {
            return Err(Error::Argument("scaling exponents must be nonnegative".into()));
        }
        Ok(Self { shape, rho })
    }

    /// `ρ̄ = (ρ_1^{(1)}, ..., ρ_1^{(n)})`.
    pub fn rho_bar(&self) -> Vec<T> {
        self.shape.first_layer().into_iter().map(|i| self.rho[i].clone()).collect()
    }

    /// `|ρ̄|`.
    pub fn rho_bar_norm(&self) -> T {
        self.rho_bar().into_iter().fold(T::zero(), |a, b| a + b)
    }

    pub fn sum(&self) -> T {
        self.rho.iter().fold(T::zero(), |a, b| a + b.clone())
    }

    /// `Σ ρ = 1`, so that `A^ρ_t` has determinant one.
    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.sum().to_f64() - 1.0).abs() <= tol
    }

    pub fn block(&self, m: usize) -> &[T] {
        &self.rho[self.shape.block(m)]
    }

    pub fn to_f64(&self) -> ScalingExponents<f64> {
        ScalingExponents { shape: self.shape.clone(), rho: self.rho.iter().map(|r| r.to_f64()).collect() }
    }
}

/// `A^ρ_t F = (e^t X, ..., e^{-ρ_i t} Y_i, ...)`.
pub fn rescale_basis(basis: &AdaptedBasis<f64>, rho: &[f64], t: f64) -> AdaptedBasis<f64> {
    let sy: Vec<f64> = rho.iter().map(|r| (-r * t).exp()).collect();
    basis.scaled(&t.exp(), &sy)
}

/// Representation coefficients after the diagonal rescaling `X ↦ ex·X`, `Y_i ↦ ey_i·Y_i`:
/// `Λ_i^{(j)} ↦ ex^j ey_i Λ_i^{(j)}`.
pub fn rescale_coefficients<T: Scalar>(rc: &RepCoefficients<T>, ex: &T, ey: &[T]) -> RepCoefficients<T> {
    let table = rc
        .table
        .iter()
        .zip(ey)
        .map(|(row, e)| {
            let mut p = e.clone();
            row.iter()
                .map(|c| {
                    let v = c.clone() * p.clone();
                    p = p.clone() * ex.clone();
                    v
                })
                .collect()
        })
        .collect();
    RepCoefficients { table, degrees: rc.degrees.clone() }
}

/// Coefficients in `F(t) = A^ρ_t F`: `Λ_i^{(j)}(F(t)) = e^{(j - ρ_i)t} Λ_i^{(j)}(F)`.
pub fn coefficients_at(rc: &RepCoefficients<f64>, rho: &[f64], t: f64) -> RepCoefficients<f64> {
    let ey: Vec<f64> = rho.iter().map(|r| (-r * t).exp()).collect();
    rescale_coefficients(rc, &t.exp(), &ey)
}

/// `λ_F(ρ) = min_{d_i ≠ 0} ρ_i / d_i`.
pub fn lambda_rho<T: Scalar>(degrees: &[usize], rho: &[T]) -> Result<T> {
    degrees
        .iter()
        .zip(rho)
        .filter(|(d, _)| **d > 0)
        .map(|(d, r)| r.clone() / T::from_usize(*d).unwrap())
        .fold(None, |acc: Option<T>, v| match acc {
            Some(a) if a <= v => Some(a),
            _ => Some(v),
        })
        .ok_or_else(|| Error::Domain("all degrees vanish".into()))
}

/// `λ(ρ) = min_{1 ≤ i < k} ρ_i^{(m_0)} / (k - i)` along the chain of block `m_0`.
pub fn lambda_chain<T: Scalar>(chain: &[T]) -> T {
    let k = chain.len();
    (0..k - 1)
        .map(|i| chain[i].clone() / T::from_usize(k - 1 - i).unwrap())
        .fold(None, |acc: Option<T>, v| match acc {
            Some(a) if a <= v => Some(a),
            _ => Some(v),
        })
        .expect("chain of length at least two")
}

/// `δ(ρ) = min_{1 ≤ i < k} (ρ_i^{(m_0)} - ρ_{i+1}^{(m_0)})`.
pub fn delta_rho<T: Scalar>(chain: &[T]) -> T {
    (0..chain.len() - 1)
        .map(|i| chain[i].clone() - chain[i + 1].clone())
        .fold(None, |acc: Option<T>, v| match acc {
            Some(a) if a <= v => Some(a),
            _ => Some(v),
        })
        .expect("chain of length at least two")
}

/// Block `m_0`: the first block of full length `k` on which `|Λ(η̃_k^{(m)})|` is maximal.
pub fn choose_m0<T: Scalar>(shape: &AlgebraShape, lambda_values: &[T]) -> Result<usize> {
    let k = shape.k();
    let mut best: Option<(usize, T)> = None;
    for m in 0..shape.n() {
        if shape.degrees()[m] != k {
            continue;
        }
        let v = lambda_values[shape.index(m, k - 1)].abs();
        if v.is_zero() {
            continue;
        }
        match &best {
            Some((_, b)) if *b >= v => {}
            _ => best = Some((m, v)),
        }
    }
    best.map(|b| b.0).ok_or_else(|| Error::Domain("Λ vanishes on every top element of a full-length block".into()))
}

/// Optimal exponents for a probability vector `σ` over blocks, centred on block `m0`:
/// `ρ_1^{(m)} = 2σ_m / ((k-2)σ_{m0} + 2)`,
/// `ρ_i^{(m0)} = 2σ_{m0}(k-i) / ((k-1)[(k-2)σ_{m0} + 2])` for `i ≥ 2`, all others zero.
pub fn optimal_rho<T: Scalar>(shape: &AlgebraShape, sigma: &[T], m0: usize) -> Result<ScalingExponents<T>> {
    let n = shape.n();
    let k = shape.k();
    if sigma.len() != n {
        return Err(Error::Argument(format!("σ has {} entries for {n} blocks", sigma.len())));
    }
    if sigma.iter().any(|s| *s <= T::zero()) {
        return Err(Error::Argument("σ entries must be positive".into()));
    }
    let total = sigma.iter().fold(T::zero(), |a, b| a + b.clone());
    if (total.clone() - T::one()).abs().to_f64() > if T::is_exact() { 0.0 } else { 1e-12 } {
        return Err(Error::Argument(format!("σ must sum to one, got {}", total.to_f64())));
    }
    if m0 >= n || shape.degrees()[m0] != k {
        return Err(Error::Argument(format!("block {m0} does not have full length {k}")));
    }
    if k < 2 {
        return Err(Error::Argument("optimal exponents need at least two steps".into()));
    }
    let kt = T::from_usize(k).unwrap();
    let two = T::from_usize(2).unwrap();
    let s0 = sigma[m0].clone();
    let den = (kt.clone() - two.clone()) * s0.clone() + two.clone();
    let mut rho = vec![T::zero(); shape.a()];
    for (m, s) in sigma.iter().enumerate() {
        rho[shape.index(m, 0)] = two.clone() * s.clone() / den.clone();
    }
    let km1 = kt.clone() - T::one();
    for i in 2..=k {
        let ki = T::from_usize(k - i).unwrap();
        rho[shape.index(m0, i - 1)] = two.clone() * s0.clone() * ki / (km1.clone() * den.clone());
    }
    ScalingExponents::new(shape.clone(), rho)
}

/// `2σ_{m0} / ((k-1)[(k-2)σ_{m0} + 2])`, the common value of `λ` and `δ` at the optimum.
pub fn optimal_exponent<T: Scalar>(k: usize, sigma_m0: &T) -> T {
    let kt = T::from_usize(k).unwrap();
    let two = T::from_usize(2).unwrap();
    two.clone() * sigma_m0.clone()
        / ((kt.clone() - T::one()) * ((kt - two.clone()) * sigma_m0.clone() + two))
}

/// The chain inequality `δ(ρ) ≤ λ(ρ) ≤ 2R/(k(k-1))` with `R = Σ_{i<k} ρ_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainInequality<T> {
    pub delta: T,
    pub lambda: T,
    pub upper: T,
    /// `ρ_i = 2R(k-i)/(k(k-1))` for every `i`.
    pub proportional: bool,
}

impl<T: Scalar> ChainInequality<T> {
    pub fn evaluate(chain: &[T]) -> Self {
        let k = chain.len();
        let r = chain[..k - 1].iter().fold(T::zero(), |a, b| a + b.clone());
        let kk = T::from_usize(k * (k - 1)).unwrap();
        let two = T::from_usize(2).unwrap();
        let upper = two.clone() * r.clone() / kk.clone();
        let proportional = (1..=k).all(|i| {
            let target = two.clone() * r.clone() * T::from_usize(k - i).unwrap() / kk.clone();
            chain[i - 1] == target
        });
        Self { delta: delta_rho(chain), lambda: lambda_chain(chain), upper, proportional }
    }

    pub fn holds(&self) -> bool {
        self.delta <= self.lambda && self.lambda <= self.upper
    }
}

/// Configuration for [`lyapunov_norm`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LyapunovConfig {
    pub tau_max: f64,
    pub grid_points: usize,
    pub refine_iters: usize,
    pub quad: QuadratureConfig,
}

impl Default for LyapunovConfig {
    fn default() -> Self {
        Self { tau_max: 20.0, grid_points: 32, refine_iters: 60, quad: QuadratureConfig::default() }
    }
}

/// `|D^X_Λ|_{F(τ),-σ} = e^{τ/2} I_σ(Λ, F(τ))`.
pub fn distribution_norm_at(rc: &RepCoefficients<f64>, rho: &[f64], sigma: f64, tau: f64, q: &QuadratureConfig) -> Result<f64> {
    let d = coefficients_at(rc, rho, tau).delta();
    Ok((0.5 * tau).exp() * integral_i(&d, sigma, q)?)
}

/// Result of the infimum search in [`lyapunov_norm`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LyapunovValue {
    pub value: f64,
    /// Minimizing `τ`.
    pub tau: f64,
    /// Value at `τ = 0`, i.e. `|D^X_Λ|_{F,-σ}`.
    pub at_zero: f64,
}

/// `‖D^X_Λ‖_{F,-σ} = inf_{τ ≥ 0} e^{-λτ/2} |D^X_Λ|_{F(τ),-σ}` by a geometric grid with golden-section refinement.
pub fn lyapunov_norm(rc: &RepCoefficients<f64>, rho: &[f64], sigma: f64, cfg: &LyapunovConfig) -> Result<LyapunovValue> {
    let lambda = lambda_rho(&rc.degrees, rho)?;
    let f = |tau: f64| -> Result<f64> {
        Ok((-0.5 * lambda * tau).exp() * distribution_norm_at(rc, rho, sigma, tau, &cfg.quad)?)
    };
    let mut taus = vec![0.0];
    let g = cfg.grid_points.max(2);
    let t0 = cfg.tau_max * 1e-3;
    for i in 0..g {
        taus.push(t0 * (cfg.tau_max / t0).powf(i as f64 / (g - 1) as f64));
    }
    let vals: Vec<f64> = taus.iter().map(|&t| f(t)).collect::<Result<_>>()?;
    let (bi, _) = vals.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let at_zero = vals[0];
    let mut best = (taus[bi], vals[bi]);
    let lo = if bi == 0 { 0.0 } else { taus[bi - 1] };
    let hi = if bi + 1 < taus.len() { taus[bi + 1] } else { taus[bi] };
    if hi > lo {
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (lo, hi);
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let (mut fc, mut fd) = (f(c)?, f(d)?);
        for _ in 0..cfg.refine_iters {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = f(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = f(d)?;
            }
        }
        for (t, v) in [(c, fc), (d, fd)] {
            if v < best.1 {
                best = (t, v);
            }
        }
    }
    Ok(LyapunovValue { value: best.1, tau: best.0, at_zero })
}

/// Weight, normalized coefficients and norms of `D^X_Λ` along `t ↦ A^ρ_t F`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingReport {
    pub t: Vec<f64>,
    pub weight: Vec<f64>,
    pub hat_norm: Vec<f64>,
    pub i_sigma: Vec<f64>,
    /// `e^{t/2} I_σ(Λ, F(t))`.
    pub dist_norm: Vec<f64>,
    pub lambda: f64,
    /// `‖Λ‖_F` at `t = 0`.
    pub weighted_norm: f64,
    pub weight_fit: LineFit,
    pub i_fit: LineFit,
    pub dist_fit: LineFit,
}

pub fn scaling_report(rc: &RepCoefficients<f64>, rho: &[f64], sigma: f64, t: &[f64], q: &QuadratureConfig) -> Result<ScalingReport> {
    let lambda = lambda_rho(&rc.degrees, rho)?;
    let mut weight = Vec::with_capacity(t.len());
    let mut hat_norm = Vec::with_capacity(t.len());
    let mut i_sigma = Vec::with_capacity(t.len());
    let mut dist_norm = Vec::with_capacity(t.len());
    for &s in t {
        let c = coefficients_at(rc, rho, s);
        weight.push(c.weight()?);
        hat_norm.push(c.hat_norm()?);
        let i = integral_i(&c.delta(), sigma, q)?;
        i_sigma.push(i);
        dist_norm.push((0.5 * s).exp() * i);
    }
    let logs = |v: &[f64]| v.iter().map(|x| x.ln()).collect::<Vec<_>>();
    Ok(ScalingReport {
        t: t.to_vec(),
        weight_fit: fit_line(t, &logs(&weight))?,
        i_fit: fit_line(t, &logs(&i_sigma))?,
        dist_fit: fit_line(t, &logs(&dist_norm))?,
        weight,
        hat_norm,
        i_sigma,
        dist_norm,
        lambda,
        weighted_norm: rc.weighted_norm()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_core::jordan_from_lattice_basis;
    use crate::rep_theory::{rep_coefficients, LinearForm};
    use crate::scalar::{q, Rational};

    #[test]
    fn optimal_rho_small_cases() {
        let r = optimal_rho(&AlgebraShape::filiform(2), &[q(1, 1)], 0).unwrap();
        assert_eq!(r.rho, vec![q(1, 1), q(0, 1)]);
        let r = optimal_rho(&AlgebraShape::filiform(3), &[q(1, 1)], 0).unwrap();
        assert_eq!(r.rho, vec![q(2, 3), q(1, 3), q(0, 1)]);
        assert_eq!(lambda_chain(&r.rho), q(1, 3));
        assert_eq!(delta_rho(&r.rho), q(1, 3));
        assert!(optimal_rho(&AlgebraShape::filiform(3), &[q(1, 2)], 0).is_err());
    }

    #[test]
    fn optimal_rho_several_blocks() {
        let shape: AlgebraShape = "4|4,2,4".parse().unwrap();
        let sigma = [q(1, 2), q(1, 3), q(1, 6)];
        let r = optimal_rho(&shape, &sigma, 2).unwrap();
        assert_eq!(r.sum(), q(1, 1));
        let chain = r.block(2).to_vec();
        assert_eq!(lambda_chain(&chain), optimal_exponent(4, &sigma[2]));
        assert_eq!(delta_rho(&chain), optimal_exponent(4, &sigma[2]));
        assert!(r.block(0)[1..].iter().all(|x| *x == q(0, 1)));
        assert_eq!(choose_m0(&shape, &[q(0, 1), q(0, 1), q(0, 1), q(3, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(-3, 1)]).unwrap(), 0);
    }

    #[test]
    fn intertwining_is_exact_in_rationals() {
        let shape = AlgebraShape::filiform(3);
        let basis = jordan_from_lattice_basis::<Rational>(&shape).basis;
        let lam = LinearForm::new(shape, vec![q(1, 3), q(2, 1), q(5, 7)]).unwrap();
        let rc = rep_coefficients(&lam, &basis).unwrap();
        // e^t = 16 and ρ = (1/2, 1/4, 1/4)
        let ex = q(16, 1);
        let ey = [q(1, 4), q(1, 2), q(1, 2)];
        let rescaled = basis.scaled(&ex, &ey);
        assert_eq!(rep_coefficients(&lam, &rescaled).unwrap(), rescale_coefficients(&rc, &ex, &ey));
        assert_eq!(rescaled.volume(), basis.volume());
    }

    #[test]
    fn chain_inequality_equality_profile() {
        let c = ChainInequality::evaluate(&[q(2, 3), q(1, 3), q(0, 1)]);
        assert!(c.holds() && c.proportional);
        assert_eq!(c.delta, c.upper);
        // δ = λ without the proportional profile.
        let c = ChainInequality::evaluate(&[q(1, 1), q(1, 4), q(0, 1)]);
        assert!(c.holds() && !c.proportional);
        assert_eq!(c.delta, c.lambda);
        assert!(c.lambda < c.upper);
    }

    #[test]
    fn lyapunov_norm_is_below_the_unscaled_norm() {
        let shape = AlgebraShape::filiform(3);
        let basis = jordan_from_lattice_basis::<Rational>(&shape).basis.map(|c| c.to_f64());
        let lam = LinearForm::integral(shape, &[0, 0, 1]).unwrap();
        let rc = rep_coefficients(&lam, &basis).unwrap();
        let rho = [2.0 / 3.0, 1.0 / 3.0, 0.0];
        let l = lyapunov_norm(&rc, &rho, 2.0, &LyapunovConfig::default()).unwrap();
        assert!(l.value <= l.at_zero);
        assert!(l.value > 0.0);
    }
}
