//! Continued fractions, best simultaneous approximations and the counting
//! Diophantine condition `D_n(Ȳ, σ, ν)`.
//!
//! Membership in any of these classes is a statement about all scales. Every
//! constant computed here is a finite-scale estimate at an explicit `N_max` or
//! `Q_max`: a lower bound on any admissible constant, never a certificate of
//! membership.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::modmath::{centered, dist_z, mul_mod1};
use crate::scalar::{Rational, Scalar};

const CHUNK: u64 = 1 << 16;

/// Continued fraction expansion with integer convergents.
#[derive(Clone, Debug, PartialEq)]
pub struct CfExpansion {
    /// Partial quotients `a_0; a_1, a_2, …`.
    pub quotients: Vec<BigInt>,
    /// Convergents `(p_i, q_i)`, one per partial quotient.
    pub convergents: Vec<(BigInt, BigInt)>,
    /// The precision guard stopped the expansion before the requested depth.
    pub truncated: bool,
    /// The input is rational and the expansion is complete.
    pub terminated: bool,
}

impl CfExpansion {
    pub fn depth(&self) -> usize {
        self.quotients.len() - 1
    }

    /// Denominators `q_i` that fit in a `u64`.
    pub fn denominators(&self) -> Vec<u64> {
        self.convergents.iter().map_while(|(_, q)| q.to_u64()).collect()
    }

    pub fn convergent(&self, i: usize) -> Rational {
        let (p, q) = &self.convergents[i];
        BigRational::new(p.clone(), q.clone())
    }
}

/// Expands `alpha` to at most `depth` partial quotients after `a_0`.
///
/// The expansion is computed exactly from the rational value of the
/// representation. For floating inputs a level is kept only if every real
/// within one rounding error of the input shares it, so all returned
/// convergents belong to the real number the input stands for.
pub fn continued_fraction<T: Scalar>(alpha: &T, depth: usize) -> Result<CfExpansion> {
    let x = alpha.to_rational().ok_or_else(|| Error::Argument("α must be finite".into()))?;
    let tol = T::unit_roundoff() * alpha.to_f64().abs().max(f64::MIN_POSITIVE);
    let eps = BigRational::from_float(tol).unwrap_or_else(BigRational::zero);
    let (lo, hi) = (&x - &eps, &x + &eps);

    let a0 = x.floor().to_integer();
    let mut rem = &x - BigRational::from_integer(a0.clone());
    let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
    let (mut p, mut q) = (a0.clone(), BigInt::one());
    let mut out = CfExpansion { quotients: vec![a0], convergents: vec![(p.clone(), q.clone())], truncated: false, terminated: false };
    while out.depth() < depth {
        if rem.is_zero() {
            out.terminated = true;
            break;
        }
        let y = rem.recip();
        let a = y.floor().to_integer();
        rem = y - BigRational::from_integer(a.clone());
        let pn = &a * &p + &p_prev;
        let qn = &a * &q + &q_prev;
        if !eps.is_zero() {
            // Reals whose expansion starts with the current quotients fill the
            // interval between these two points.
            let e1 = BigRational::new(pn.clone(), qn.clone());
            let e2 = BigRational::new(&pn + &p, &qn + &q);
            let (l, h) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
            if !(l < lo && hi < h) {
                out.truncated = true;
                break;
            }
        }
        out.quotients.push(a);
        out.convergents.push((pn.clone(), qn.clone()));
        (p_prev, q_prev, p, q) = (p, q, pn, qn);
    }
    if rem.is_zero() && !out.truncated {
        out.terminated = true;
    }
    Ok(out)
}

/// A best simultaneous approximation for the sup norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestApproximation {
    pub q: u64,
    pub p: Vec<i64>,
    /// `‖qα − p‖_∞`.
    pub d: f64,
}

/// `‖qα‖_{ℤ^n}` in the sup norm.
pub fn sup_dist(alpha: &[f64], q: i64) -> f64 {
    alpha.iter().map(|&a| dist_z(mul_mod1(q as i128, a))).fold(0.0, f64::max)
}

/// All `q ≤ q_max` with `‖qα‖ < ‖q'α‖` for every `q' < q`, by exhaustive scan.
pub fn best_approximations(alpha: &[f64], q_max: u64) -> Result<Vec<BestApproximation>> {
    if alpha.is_empty() || q_max == 0 {
        return Err(Error::Argument("need a nonempty α and Q_max ≥ 1".into()));
    }
    let chunks = q_max.div_ceil(CHUNK);
    let local: Vec<Vec<(u64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut best = f64::INFINITY;
            let mut recs = Vec::new();
            for q in c * CHUNK + 1..=((c + 1) * CHUNK).min(q_max) {
                let d = sup_dist(alpha, q as i64);
                if d < best {
                    best = d;
                    recs.push((q, d));
                }
            }
            recs
        })
        .collect();
    let mut best = f64::INFINITY;
    let mut out = Vec::new();
    for (q, d) in local.into_iter().flatten() {
        if d < best {
            best = d;
            let p = alpha.iter().map(|&a| (q as f64 * a - centered(mul_mod1(q as i128, a))).round() as i64).collect();
            out.push(BestApproximation { q, p, d });
        }
    }
    Ok(out)
}

/// Result of [`dc_check`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DcCheck {
    /// `min_{q ≤ Q_max} q^{ν/n} ‖qα‖_{ℤ^n}`.
    pub c: f64,
    pub argmin: u64,
    pub q_max: u64,
}

/// Classical simultaneous Diophantine constant up to `Q_max`. The minimum is
/// attained at a best approximation, so only those are scanned.
pub fn dc_check(alpha: &[f64], nu: f64, q_max: u64) -> Result<DcCheck> {
    let n = alpha.len() as f64;
    let best = best_approximations(alpha, q_max)?;
    let (c, argmin) = best
        .iter()
        .map(|b| ((b.q as f64).powf(nu / n) * b.d, b.q))
        .fold((f64::INFINITY, 0), |acc, v| if v.0 < acc.0 { v } else { acc });
    Ok(DcCheck { c, argmin, q_max })
}

/// Coordinate norms `|θ|_i` attached to a basis `Ȳ` of `ℝ^n`.
///
/// `|θ|_i = |s_i|` when `[θ] = exp(Σ s_i Ȳ_i)` for some `s` with every
/// `|s_i| ≤ Ī/2`; otherwise every norm equals `Ī`.
#[derive(Clone, Debug)]
pub struct NormBasis {
    cols: Matrix<f64>,
    inv: Matrix<f64>,
    i_bar: f64,
    standard: bool,
}

impl NormBasis {
    /// The standard basis, with `Ī = 1/2`.
    pub fn standard(n: usize) -> Self {
        Self { cols: Matrix::identity(n), inv: Matrix::identity(n), i_bar: 0.5, standard: true }
    }

    pub fn new(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.len();
        if n == 0 || columns.iter().any(|c| c.len() != n) {
            return Err(Error::Shape("basis must be n vectors in ℝ^n".into()));
        }
        let cols = Matrix::from_columns(columns);
        let inv = cols.inverse().ok_or_else(|| Error::Argument("basis vectors are dependent".into()))?;
        // Ī is half the smallest sup norm of a nonzero point of Ȳ^{-1}ℤ^n.
        let v0 = (0..n).map(|j| sup_norm(&inv.column(j))).fold(f64::INFINITY, f64::min);
        let radius = (v0 * cols.norm_inf()).floor() as i64;
        if (2 * radius + 1).pow(n as u32) > 5_000_000 {
            return Err(Error::Argument("basis too ill-conditioned for enumeration".into()));
        }
        let mut shortest = v0;
        for_each_int_vector(&vec![(-radius, radius); n], |z| {
            if z.iter().any(|&v| v != 0) {
                let zf: Vec<f64> = z.iter().map(|&v| v as f64).collect();
                shortest = shortest.min(sup_norm(&inv.mul_vec(&zf)));
            }
        });
        Ok(Self { cols, inv, i_bar: 0.5 * shortest, standard: false })
    }

    pub fn dim(&self) -> usize {
        self.cols.rows()
    }

    pub fn i_bar(&self) -> f64 {
        self.i_bar
    }

    /// `(|θ|_1, …, |θ|_n)`.
    pub fn norms(&self, theta: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let half = 0.5 * self.i_bar;
        if self.standard {
            let d: Vec<f64> = theta.iter().map(|&t| dist_z(t)).collect();
            return if d.iter().all(|&x| x <= half) { d } else { vec![self.i_bar; n] };
        }
        let theta: Vec<f64> = theta.iter().map(|&t| t - t.floor()).collect();
        let ranges: Vec<(i64, i64)> = (0..n)
            .map(|j| {
                let rad = half * self.cols.row(j).iter().map(|v| v.abs()).sum::<f64>();
                ((theta[j] - rad).ceil() as i64, (theta[j] + rad).floor() as i64)
            })
            .collect();
        let mut found = None;
        for_each_int_vector(&ranges, |z| {
            if found.is_none() {
                let v: Vec<f64> = theta.iter().zip(z).map(|(t, &zi)| t - zi as f64).collect();
                let s = self.inv.mul_vec(&v);
                if sup_norm(&s) <= half * (1.0 + 1e-12) {
                    found = Some(s.iter().map(|x| x.abs()).collect());
                }
            }
        });
        found.unwrap_or_else(|| vec![self.i_bar; n])
    }
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn for_each_int_vector(ranges: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    if ranges.iter().any(|(lo, hi)| lo > hi) {
        return;
    }
    let mut z: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(&z);
        let mut i = 0;
        loop {
            if i == z.len() {
                return;
            }
            if z[i] < ranges[i].1 {
                z[i] += 1;
                break;
            }
            z[i] = ranges[i].0;
            i += 1;
        }
    }
}

/// One evaluation of `#R(N, δ)` against `max{N^{1−1/ν}, Nδ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingRecord {
    pub n: u64,
    pub delta: f64,
    pub count: u64,
    pub ratio: f64,
}

/// `count / max{N^{1−1/ν}, Nδ}`.
pub fn counting_ratio(count: u64, n: u64, delta: f64, nu: f64) -> f64 {
    let n = n as f64;
    count as f64 / n.powf(1.0 - 1.0 / nu).max(n * delta)
}

/// Data of the counting condition: `α`, the weights `σ` and the norms.
#[derive(Clone, Debug)]
pub struct CountingSetup {
    pub alpha: Vec<f64>,
    pub sigma: Vec<f64>,
    pub basis: NormBasis,
    /// Count `r = 0` as an element of `R(N, δ)`.
    pub include_zero: bool,
}

impl CountingSetup {
    pub fn new(alpha: Vec<f64>, sigma: Vec<f64>, basis: NormBasis) -> Result<Self> {
        let n = alpha.len();
        if n == 0 || sigma.len() != n || basis.dim() != n {
            return Err(Error::Shape("α, σ and the basis must share the dimension".into()));
        }
        if sigma.iter().any(|&s| !(s > 0.0 && s <= 1.0)) || (sigma.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::Argument("σ must be a probability vector with positive entries".into()));
        }
        Ok(Self { alpha, sigma, basis, include_zero: false })
    }

    /// Standard basis and equal weights `σ_i = 1/n`.
    pub fn standard(alpha: Vec<f64>) -> Result<Self> {
        let n = alpha.len();
        Self::new(alpha, vec![1.0 / n as f64; n], NormBasis::standard(n))
    }

    pub fn with_zero(mut self, include: bool) -> Self {
        self.include_zero = include;
        self
    }

    /// `(|rα|_1, …, |rα|_n)`.
    pub fn norms_at(&self, r: i64) -> Vec<f64> {
        let theta: Vec<f64> = self.alpha.iter().map(|&a| mul_mod1(r as i128, a)).collect();
        self.basis.norms(&theta)
    }

    /// Smallest `δ` with `r ∈ R(N, δ)`: `max_i |rα|_i^{1/σ_i}`.
    pub fn entry_delta(&self, r: i64) -> f64 {
        self.norms_at(r).iter().zip(&self.sigma).map(|(v, s)| v.powf(1.0 / s)).fold(0.0, f64::max)
    }

    fn member(&self, r: i64, delta: f64) -> bool {
        self.norms_at(r).iter().zip(&self.sigma).all(|(v, s)| *v <= delta.powf(*s))
    }

    /// `#R(N, δ)` by a direct scan of `1 ≤ r ≤ N`, doubled for `−r`.
    pub fn count(&self, n: u64, delta: f64) -> u64 {
        let half: u64 = (1..=n).into_par_iter().filter(|&r| self.member(r as i64, delta)).count() as u64;
        2 * half + u64::from(self.include_zero)
    }

    pub fn record(&self, n: u64, delta: f64, nu: f64) -> CountingRecord {
        let count = self.count(n, delta);
        CountingRecord { n, delta, count, ratio: counting_ratio(count, n, delta, nu) }
    }
}

/// `N`-grid `{⌊2^{k/4}⌋} ∩ [1, N_max]`; nested as `N_max` grows.
pub fn n_grid(n_max: u64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for k in 0.. {
        let v = 2f64.powf(k as f64 / 4.0).floor() as u64;
        if v > n_max {
            break;
        }
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    out
}

/// 32 geometric points spanning `[N^{−ν}, 1]`.
pub fn delta_grid(n: u64, nu: f64) -> Vec<f64> {
    let lo = (n as f64).powf(-nu).ln();
    if lo == 0.0 {
        return vec![1.0];
    }
    (0..32).map(|i| (lo * (1.0 - i as f64 / 31.0)).exp()).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DnEstimate {
    pub nu: f64,
    pub n_max: u64,
    /// Largest ratio seen; a lower bound on `C(Ȳ, σ, α)`.
    pub c: f64,
    pub worst: CountingRecord,
    pub records: Vec<CountingRecord>,
}

/// Largest counting ratio over [`n_grid`] × [`delta_grid`].
pub fn dn_constant_estimate(setup: &CountingSetup, nu: f64, n_max: u64) -> Result<DnEstimate> {
    if nu < 1.0 || n_max == 0 {
        return Err(Error::Argument("need ν ≥ 1 and N_max ≥ 1".into()));
    }
    let entry: Vec<f64> = (1..=n_max).into_par_iter().map(|r| setup.entry_delta(r as i64)).collect();
    let zero = u64::from(setup.include_zero);
    let mut records = Vec::new();
    for n in n_grid(n_max) {
        let mut sorted = entry[..n as usize].to_vec();
        sorted.par_sort_unstable_by(f64::total_cmp);
        for delta in delta_grid(n, nu) {
            let count = 2 * sorted.partition_point(|&e| e <= delta) as u64 + zero;
            records.push(CountingRecord { n, delta, count, ratio: counting_ratio(count, n, delta, nu) });
        }
    }
    let worst = *records.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio)).expect("grid is nonempty");
    Ok(DnEstimate { nu, n_max, c: worst.ratio, worst, records })
}

/// Comparison of `min_r |r|^ν max_i |rα|_i` with the lower bound
/// `min{Ī²/4, (1 + C)^{−2ν}}` implied by a counting constant `C`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StdCheck {
    pub min_scaled: f64,
    pub argmin: i64,
    pub bound: f64,
    pub holds: bool,
}

pub fn std_check(setup: &CountingSetup, nu: f64, c_dn: f64, n_max: u64) -> StdCheck {
    let (min_scaled, argmin) = (1..=n_max as i64)
        .into_par_iter()
        .map(|r| ((r as f64).powf(nu) * setup.norms_at(r).into_iter().fold(0.0, f64::max), r))
        .reduce(|| (f64::INFINITY, 0), |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    let bound = std_bound(setup.basis.i_bar(), c_dn, nu);
    StdCheck { min_scaled, argmin, bound, holds: min_scaled >= bound }
}

/// `min{Ī²/4, (1 + C)^{−2ν}}`.
pub fn std_bound(i_bar: f64, c_dn: f64, nu: f64) -> f64 {
    (0.25 * i_bar * i_bar).min((1.0 + c_dn).powf(-2.0 * nu))
}

/// Per-level constants of the best-approximation conditions (a), (b), (c).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DlemmaLevel {
    pub i: usize,
    pub q: u64,
    pub q_next: u64,
    /// `q_{i+1} / q_i^ν`.
    pub a: f64,
    /// `q_{i+1}^{M/ν} / (q_i d_{i−1}^{n−1})`.
    pub b: f64,
    /// `q_{i+1}^{1/ν} / (q_i d_{i−1}^{(n−2)(1−m/M)})`.
    pub c: f64,
    /// `q_{i+1} d_i^n`, at most 1.
    pub dirichlet: f64,
}

impl DlemmaLevel {
    pub fn holds(&self, c_alpha: f64) -> [bool; 3] {
        [self.a <= c_alpha, self.b <= c_alpha, self.c <= c_alpha]
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DlemmaReport {
    pub levels: Vec<DlemmaLevel>,
    /// Smallest `C_α` for which (a), (b), (c) hold at every computed level.
    pub envelope: [f64; 3],
    pub dirichlet_ok: bool,
}

pub fn dlemma_conditions(best: &[BestApproximation], sigma: &[f64], nu: f64) -> Result<DlemmaReport> {
    let n = best.first().map(|b| b.p.len()).ok_or_else(|| Error::Argument("no best approximations".into()))?;
    if sigma.len() != n {
        return Err(Error::Shape("σ must have one weight per coordinate".into()));
    }
    let big_m = sigma.iter().cloned().fold(f64::MIN, f64::max);
    let small_m = sigma.iter().cloned().fold(f64::MAX, f64::min);
    let nf = n as f64;
    let c_exp = (nf - 2.0) * (1.0 - small_m / big_m);
    let mut levels = Vec::new();
    let mut envelope = [0.0f64; 3];
    for i in 1..best.len().saturating_sub(1) {
        let (q, qn, d_prev) = (best[i].q as f64, best[i + 1].q as f64, best[i - 1].d);
        let lvl = DlemmaLevel {
            i,
            q: best[i].q,
            q_next: best[i + 1].q,
            a: qn / q.powf(nu),
            b: qn.powf(big_m / nu) / (q * d_prev.powf(nf - 1.0)),
            c: qn.powf(1.0 / nu) / (q * d_prev.powf(c_exp)),
            dirichlet: qn * best[i].d.powf(nf),
        };
        envelope = [envelope[0].max(lvl.a), envelope[1].max(lvl.b), envelope[2].max(lvl.c)];
        levels.push(lvl);
    }
    let dirichlet_ok = best.windows(2).all(|w| w[1].q as f64 * w[0].d.powf(nf) <= 1.0 + 1e-9);
    Ok(DlemmaReport { levels, envelope, dirichlet_ok })
}

fn weight_extremes(sigma: &[Rational], nu: &Rational) -> Result<(Rational, Rational)> {
    let one = Rational::one();
    if sigma.is_empty() || sigma.iter().any(|s| *s <= Rational::zero()) || sigma.iter().sum::<Rational>() != one || *nu < one {
        return Err(Error::Argument("σ must be a positive probability vector and ν ≥ 1".into()));
    }
    let big_m = sigma.iter().max().unwrap().clone();
    let small_m = sigma.iter().min().unwrap().clone();
    Ok((small_m, big_m))
}

/// Largest `μ` with `DC_{n,μ} ⊂ D_n(Ȳ, σ, ν)` from the best-approximation conditions:
/// `min{ν, [M/ν + 1 − 1/n]^{−1}, [1/ν + (1 − 2/n)(1 − m/M)]^{−1}}`.
pub fn dcond_exponent(sigma: &[Rational], nu: &Rational) -> Result<Rational> {
    let (small_m, big_m) = weight_extremes(sigma, nu)?;
    let one = Rational::one();
    let n = Rational::from_integer(sigma.len().into());
    let b = (&big_m / nu + &one - n.recip()).recip();
    let c = (nu.recip() + (&one - Rational::from_integer(2.into()) / &n) * (&one - &small_m / &big_m)).recip();
    Ok([nu.clone(), b, c].into_iter().min().unwrap())
}

/// `1/ν < min{[Mn]^{−1}, 1 − (1 − 2/n)(1 − m/M)}`, decided exactly.
pub fn dfull_holds(sigma: &[Rational], nu: &Rational) -> Result<bool> {
    let (small_m, big_m) = weight_extremes(sigma, nu)?;
    let one = Rational::one();
    let n = Rational::from_integer(sigma.len().into());
    let first = (&big_m * &n).recip();
    let second = &one - (&one - Rational::from_integer(2.into()) / &n) * (&one - &small_m / &big_m);
    Ok(nu.recip() < first.min(second))
}

/// Upper bound on the cut-off `J^r_L` for any `L ≥ 1` when the first-layer
/// frequencies satisfy the counting condition with constant `c_dn`:
/// `J ≤ n/(a−n) · log₂(2|r|^ν / c)` with `c = min{I, Ī²/4, (1+C)^{−2ν}}`.
pub fn cutoff_upper_bound(a: usize, n: usize, nu: f64, i_const: f64, i_bar: f64, c_dn: f64, r: i64) -> Result<f64> {
    if a <= n || r == 0 {
        return Err(Error::Argument("need a > n and r ≠ 0".into()));
    }
    let c = i_const.min(std_bound(i_bar, c_dn, nu));
    Ok(n as f64 / (a - n) as f64 * (2.0 * (r.unsigned_abs() as f64).powf(nu) / c).log2())
}

/// `(1 + log⁺(1/I) + log(1 + C))(1 + log|r|)`, the scale the cut-off grows on.
pub fn cutoff_log_scale(i_const: f64, c_dn: f64, r: i64) -> f64 {
    (1.0 + (1.0 / i_const).ln().max(0.0) + (1.0 + c_dn).ln()) * (1.0 + (r.unsigned_abs() as f64).ln())
}
