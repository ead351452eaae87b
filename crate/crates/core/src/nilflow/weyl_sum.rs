//! Weyl sums `Σ_{n<N} e(P(n))` by forward differences modulo one.
//!
//! The difference table `Δ^j P(ℓ)` is kept as residues modulo one in 128-bit
//! fixed point. Additions wrap exactly, so the only error is the initial
//! rounding of the coefficients to `2^-128`; the phase fed to `sin`/`cos` has
//! full double precision at every `ℓ`. Chunks of a fixed length are summed in
//! parallel and combined in index order, so results do not depend on the
//! number of threads.

use num::bigint::BigInt;
use num::complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modmath::{bigint_mod_2_128, binom_big, fixed_from_f64, fixed_from_rational, fixed_to_f64, Fixed};
use crate::nilflow::weyl_poly::WeylPolynomial;
use crate::scalar::Rational;

/// Tuning knobs for [`WeylSum`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WeylSumConfig {
    /// Terms per parallel chunk; the reduction order depends only on this.
    pub chunk: u64,
}

impl Default for WeylSumConfig {
    fn default() -> Self {
        Self { chunk: 1 << 16 }
    }
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.comp);
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct ComplexAcc {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexAcc {
    fn merge(&mut self, o: &Self) {
        self.re.merge(&o.re);
        self.im.merge(&o.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Prepared Weyl-sum kernel for one polynomial.
#[derive(Clone, Debug)]
pub struct WeylSum {
    /// `Δ^j P(0) mod 1`.
    b: Vec<Fixed>,
    cfg: WeylSumConfig,
}

impl WeylSum {
    /// Kernel for a polynomial with double coefficients (taken as exact dyadics).
    pub fn new(poly: &WeylPolynomial<f64>, cfg: WeylSumConfig) -> Self {
        let a: Vec<Fixed> = poly.coeffs.iter().map(|&c| fixed_from_f64(c)).collect();
        Self { b: monomial_to_differences(&a), cfg }
    }

    /// Kernel for a polynomial with exact rational coefficients.
    pub fn from_rational(poly: &WeylPolynomial<Rational>, cfg: WeylSumConfig) -> Self {
        let a: Vec<Fixed> = poly.coeffs.iter().map(fixed_from_rational).collect();
        Self { b: monomial_to_differences(&a), cfg }
    }

    /// Kernel from binomial-basis coefficients `b_j = Δ^j P(0)`.
    pub fn from_differences(b: &[f64], cfg: WeylSumConfig) -> Self {
        Self { b: b.iter().map(|&x| fixed_from_f64(x)).collect(), cfg }
    }

    pub fn degree(&self) -> usize {
        self.b.len().saturating_sub(1)
    }

    /// `W(N) = Σ_{n=0}^{N-1} e(P(n))`.
    pub fn sum(&self, n: u64) -> Complex64 {
        self.sum_range(0, n)
    }

    /// `Σ_{n=start}^{end-1} e(P(n))`.
    pub fn sum_range(&self, start: u64, end: u64) -> Complex64 {
        if end <= start {
            return Complex64::new(0.0, 0.0);
        }
        let chunk = self.cfg.chunk.max(1);
        let first = start / chunk;
        let last = (end - 1) / chunk;
        let parts: Vec<ComplexAcc> = (first..=last)
            .into_par_iter()
            .map(|c| {
                let lo = (c * chunk).max(start);
                let hi = ((c + 1) * chunk).min(end);
                self.chunk_sum(lo, hi)
            })
            .collect();
        let mut acc = ComplexAcc::default();
        for p in &parts {
            acc.merge(p);
        }
        acc.value()
    }

    /// `W(N)` at every `N` of a grid, from a single pass over `[0, max N)`.
    pub fn sum_grid(&self, grid: &[u64]) -> Vec<Complex64> {
        let mut points: Vec<u64> = grid.to_vec();
        points.sort_unstable();
        points.dedup();
        let Some(&top) = points.last() else { return Vec::new() };
        let chunk = self.cfg.chunk.max(1);
        let mut cuts: Vec<u64> = (0..=top / chunk).map(|c| c * chunk).collect();
        cuts.extend(points.iter().copied());
        cuts.push(top);
        cuts.sort_unstable();
        cuts.dedup();
        let parts: Vec<ComplexAcc> = cuts
            .par_windows(2)
            .map(|w| self.chunk_sum(w[0], w[1]))
            .collect();
        let mut acc = ComplexAcc::default();
        let mut prefix = std::collections::HashMap::new();
        prefix.insert(0u64, Complex64::new(0.0, 0.0));
        for (w, p) in cuts.windows(2).zip(&parts) {
            acc.merge(p);
            prefix.insert(w[1], acc.value());
        }
        grid.iter().map(|n| prefix[n]).collect()
    }

    /// Difference table at `ℓ`: `Δ^j P(ℓ) = Σ_i b_{j+i} binom(ℓ, i) mod 1`.
    fn table_at(&self, l: u64) -> Vec<Fixed> {
        let k = self.degree();
        let lb = BigInt::from(l);
        let bins: Vec<u128> = (0..=k).map(|i| bigint_mod_2_128(&binom_big(&lb, i))).collect();
        (0..=k)
            .map(|j| {
                (0..=k - j).fold(0u128, |acc, i| acc.wrapping_add(self.b[j + i].wrapping_mul(bins[i])))
            })
            .collect()
    }

    fn chunk_sum(&self, lo: u64, hi: u64) -> ComplexAcc {
        let mut d = self.table_at(lo);
        let k = self.degree();
        let mut acc = ComplexAcc::default();
        for _ in lo..hi {
            let (s, c) = (std::f64::consts::TAU * fixed_to_f64(d[0])).sin_cos();
            acc.re.add(c);
            acc.im.add(s);
            for j in 0..k {
                d[j] = d[j].wrapping_add(d[j + 1]);
            }
        }
        acc
    }
}

/// `b_j = Σ_i a_i j! S(i, j) mod 1`, with `S` the Stirling numbers of the second kind.
fn monomial_to_differences(a: &[Fixed]) -> Vec<Fixed> {
    let k = a.len().saturating_sub(1);
    // surj[i][j] = j! S(i, j), number of surjections from i to j elements
    let mut surj = vec![vec![0u128; k + 1]; k + 1];
    surj[0][0] = 1;
    for i in 1..=k {
        for j in 1..=i {
            let prev = surj[i - 1][j].wrapping_add(surj[i - 1][j - 1]);
            surj[i][j] = prev.wrapping_mul(j as u128);
        }
    }
    (0..=k)
        .map(|j| (0..=k).fold(0u128, |acc, i| acc.wrapping_add(a[i].wrapping_mul(surj[i][j]))))
        .collect()
}

/// Convenience: `W(N)` for a double-coefficient polynomial with default settings.
pub fn weyl_sum(poly: &WeylPolynomial<f64>, n: i64) -> Result<Complex64> {
    if n < 0 {
        return Err(Error::Argument(format!("number of terms must be nonnegative, got {n}")));
    }
    Ok(WeylSum::new(poly, WeylSumConfig::default()).sum(n as u64))
}
