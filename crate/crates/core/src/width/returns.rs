use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_core::AlgebraShape;
use crate::linalg::Matrix;
use crate::modmath::{centered, mul_mod1};
use crate::nilflow::{FrequencyVector, Nilflow};
use crate::scalar::{binomials, Scalar};

/// `Ψ^{(r)}_{α,θ}(s) = Φ^r(s) - s` before reduction. Block by block the
/// output is `(rα_1, r(s_1 + α_2) + binom(r,2)α_1, ...)`, which does not
/// involve the top coordinate of the block.
pub fn psi_r<T: Scalar>(freq: &FrequencyVector<T>, s: &[T], r: i64) -> Result<Vec<T>> {
    if r == 0 {
        return Err(Error::Argument("Ψ^(r) needs r ≠ 0".into()));
    }
    let shape = &freq.shape;
    if s.len() != shape.a() {
        return Err(Error::Shape(format!("point of length {} for shape {shape}", s.len())));
    }
    let b = binomials(&T::from_i64(r).unwrap(), shape.k() + 1);
    let mut out = vec![T::zero(); shape.a()];
    for m in 0..shape.n() {
        let blk = shape.block(m);
        let (sb, ab) = (&s[blk.clone()], &freq.alpha[blk.clone()]);
        for j in 0..blk.len() {
            let mut acc = b[j + 1].clone() * ab[0].clone();
            for i in 1..=j {
                acc = acc + b[i].clone() * (sb[j - i].clone() + ab[j - i + 1].clone());
            }
            out[blk.start + j] = acc;
        }
    }
    Ok(out)
}

/// Determinant of `Ψ^{(r)}` as a map from the non-top coordinates to the
/// non-first coordinates, obtained from unit differences (exact, since `Ψ` is affine).
pub fn psi_jacobian_det<T: Scalar>(freq: &FrequencyVector<T>, r: i64) -> Result<T> {
    let shape = &freq.shape;
    let a = shape.a();
    let inputs: Vec<usize> = (0..a).filter(|i| !shape.top_layer().contains(i)).collect();
    let outputs: Vec<usize> = (0..a).filter(|i| !shape.is_first_layer(*i)).collect();
    let base = vec![T::zero(); a];
    let p0 = psi_r(freq, &base, r)?;
    let mut cols = Vec::with_capacity(inputs.len());
    for &i in &inputs {
        let mut e = base.clone();
        e[i] = T::one();
        let p = psi_r(freq, &e, r)?;
        cols.push(outputs.iter().map(|&o| p[o].clone() - p0[o].clone()).collect::<Vec<_>>());
    }
    Ok(Matrix::from_columns(&cols).det())
}

/// Representative of `d` modulo the fiber lattice `h(-θ) ℤ^a` with every
/// coordinate in `[-1/2, 1/2]`; it is unique up to ties.
pub fn reduce_displacement(shape: &AlgebraShape, theta: f64, d: &[f64]) -> Vec<f64> {
    let u = shape.apply_h(&theta, d);
    let b = binomials(&-theta, shape.k());
    let mut out = vec![0.0; d.len()];
    for m in 0..shape.n() {
        let blk = shape.block(m);
        let mut y = vec![0.0; blk.len()];
        for j in 0..blk.len() {
            let mut p = u[blk.start + j];
            for l in 1..=j {
                p += b[l] * y[j - l];
            }
            let mj = p.round();
            y[j] = u[blk.start + j] - mj;
            out[blk.start + j] = p - mj;
        }
    }
    out
}

/// Stratum index used for an exact return, `δ'' = 0`.
pub const STRATUM_AT_ZERO: u32 = 1000;

/// Close-return functionals of a nilflow in the basis `(X_α, η̃)` rescaled by `L^ρ`.
#[derive(Clone, Debug)]
pub struct CloseReturns {
    pub flow: Nilflow,
    pub rho: Vec<f64>,
    /// Injectivity constant `I`, in `(0, 1/2]`.
    pub i_const: f64,
    first: Vec<usize>,
    other: Vec<usize>,
}

/// Returns `r` with `δ'(r, L) ≤ I/2`, the only ones with nonempty strata.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActiveReturn {
    pub r: i64,
    pub delta1: f64,
    pub cutoff: u32,
}

/// Per-`(r, L)` data: `δ'`, the cut-off, and optionally `δ''` at a point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CloseReturnProfile {
    pub r: i64,
    pub l: f64,
    pub delta1: f64,
    pub delta2: Option<f64>,
    pub cutoff: u32,
}

/// Active returns for `1 ≤ |r| ≤ [TL]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReturnTable {
    pub t: f64,
    pub l: f64,
    pub r_max: i64,
    pub active: Vec<ActiveReturn>,
}

impl CloseReturns {
    pub fn new(flow: Nilflow, rho: Vec<f64>, i_const: f64) -> Result<Self> {
        let shape = flow.shape().clone();
        if rho.len() != shape.a() {
            return Err(Error::Shape(format!("{} exponents for dimension {}", rho.len(), shape.a())));
        }
        if rho.iter().any(|r| !(0.0..1.0).contains(r)) {
            return Err(Error::Argument("scaling exponents must lie in [0, 1)".into()));
        }
        if !(i_const > 0.0 && i_const <= 0.5) {
            return Err(Error::Argument(format!("I = {i_const} must lie in (0, 1/2]")));
        }
        if shape.a() == shape.n() {
            return Err(Error::Argument("close returns need a block of length at least two".into()));
        }
        let first = shape.first_layer();
        let other = (0..shape.a()).filter(|i| !first.contains(i)).collect();
        Ok(Self { flow, rho, i_const, first, other })
    }

    pub fn shape(&self) -> &AlgebraShape {
        self.flow.shape()
    }

    /// `a - n`.
    pub fn codim(&self) -> usize {
        self.other.len()
    }

    pub fn n(&self) -> usize {
        self.first.len()
    }

    /// `‖·‖_i` of a reduced coordinate: `|s_i|` when `|s_i| ≤ I/2`, else `I`.
    pub fn coordinate_norm(&self, d: f64) -> f64 {
        if d.abs() <= 0.5 * self.i_const {
            d.abs()
        } else {
            self.i_const
        }
    }

    fn capped(&self, idx: usize, l: f64, d: f64) -> f64 {
        (l.powf(self.rho[idx]) * self.coordinate_norm(d)).min(self.i_const)
    }

    /// `Φ^r(x) - x` at the point `(θ, h(θ)s)`, reduced.
    pub fn displacement(&self, theta: f64, s: &[f64], r: i64) -> Vec<f64> {
        let img = self.flow.return_map(theta, s, r);
        let d: Vec<f64> = img.iter().zip(s).map(|(a, b)| a - b).collect();
        reduce_displacement(self.shape(), theta, &d)
    }

    /// `δ'(r, L) = max_{i ≤ n} min{I, L^{ρ_i} ‖rα_1‖_i}`; independent of the point.
    pub fn delta_one(&self, r: i64, l: f64) -> f64 {
        let alpha = self.flow.alpha();
        self.first
            .iter()
            .map(|&i| self.capped(i, l, centered(mul_mod1(r as i128, alpha[i]))))
            .fold(0.0, f64::max)
    }

    /// `δ''(r, L)` from a reduced displacement.
    pub fn delta_other_of(&self, d: &[f64], l: f64) -> f64 {
        self.other.iter().map(|&i| self.capped(i, l, d[i])).fold(0.0, f64::max)
    }

    /// `δ''(r, L)(x) = max_{i > n} min{I, L^{ρ_i} ‖Φ^r(x) - x‖_i}`.
    pub fn delta_other(&self, theta: f64, s: &[f64], r: i64, l: f64) -> f64 {
        self.delta_other_of(&self.displacement(theta, s, r), l)
    }

    /// First-layer values `‖Φ^r(x) - x‖_i` read off the displacement; equal to `‖rα_1‖`.
    pub fn first_layer_of(&self, d: &[f64]) -> Vec<f64> {
        self.first.iter().map(|&i| d[i]).collect()
    }

    /// `J_{r,L} = max{j ≥ 0 : 2^{j(a-n)} ≤ (2/δ')^n}`.
    pub fn cutoff(&self, delta1: f64) -> u32 {
        if delta1 <= 0.0 {
            return STRATUM_AT_ZERO;
        }
        let c = self.codim() as f64;
        let rhs = self.n() as f64 * (2.0 / delta1).log2();
        let mut j = (rhs / c).floor().max(0.0) as u32;
        while j > 0 && (j as f64) * c > rhs {
            j -= 1;
        }
        while ((j + 1) as f64) * c <= rhs {
            j += 1;
        }
        j.min(STRATUM_AT_ZERO)
    }

    /// `j` with `2^{-(j+1)} I < δ'' ≤ 2^{-j} I`.
    pub fn stratum(&self, delta2: f64) -> u32 {
        if delta2 <= 0.0 {
            return STRATUM_AT_ZERO;
        }
        let mut j = (self.i_const / delta2).log2().floor().max(0.0) as u32;
        let upper = |j: u32| self.i_const * 0.5f64.powi(j as i32);
        while j > 0 && delta2 > upper(j) {
            j -= 1;
        }
        while delta2 <= upper(j + 1) {
            j += 1;
        }
        j.min(STRATUM_AT_ZERO)
    }

    pub fn profile(&self, r: i64, l: f64, at: Option<(f64, &[f64])>) -> Result<CloseReturnProfile> {
        if r == 0 {
            return Err(Error::Argument("close returns need r ≠ 0".into()));
        }
        let delta1 = self.delta_one(r, l);
        let delta2 = at.map(|(theta, s)| self.delta_other(theta, s, r, l));
        Ok(CloseReturnProfile { r, l, delta1, delta2, cutoff: self.cutoff(delta1) })
    }

    /// Weight of the stratum `j` of `r` in `h_{r,L}`.
    pub fn stratum_weight(&self, delta1: f64, cutoff: u32, j: u32) -> f64 {
        if j == 0 {
            return 0.0;
        }
        if j <= cutoff {
            2f64.powi((j as usize * self.codim()) as i32)
        } else {
            (2.0 / delta1).powi(self.n() as i32)
        }
    }

    /// `h_{r,L}(x)`.
    pub fn h(&self, theta: f64, s: &[f64], r: i64, l: f64) -> f64 {
        let delta1 = self.delta_one(r, l);
        if delta1 > 0.5 * self.i_const {
            return 0.0;
        }
        let j = self.stratum(self.delta_other(theta, s, r, l));
        self.stratum_weight(delta1, self.cutoff(delta1), j)
    }

    pub fn table(&self, t: f64, l: f64) -> ReturnTable {
        let r_max = (t * l).floor() as i64;
        let mut active = Vec::new();
        for r in 1..=r_max {
            let delta1 = self.delta_one(r, l);
            if delta1 <= 0.5 * self.i_const {
                let cutoff = self.cutoff(delta1);
                active.push(ActiveReturn { r, delta1, cutoff });
                active.push(ActiveReturn { r: -r, delta1, cutoff });
            }
        }
        ReturnTable { t, l, r_max, active }
    }

    /// Strata `(r, j)` with `j ≥ 1` containing the point, for the active returns of the table.
    pub fn strata_at(&self, table: &ReturnTable, theta: f64, s: &[f64]) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        for (idx, ar) in table.active.iter().enumerate() {
            let j = self.stratum(self.delta_other(theta, s, ar.r, table.l));
            if j >= 1 {
                out.push((idx, j));
            }
        }
        out
    }

    /// `H^T_L(x) = 1 + Σ_{1 ≤ |r| ≤ [TL]} h_{r,L}(x)`.
    pub fn big_h(&self, table: &ReturnTable, theta: f64, s: &[f64]) -> f64 {
        1.0 + self
            .strata_at(table, theta, s)
            .into_iter()
            .map(|(idx, j)| {
                let ar = &table.active[idx];
                self.stratum_weight(ar.delta1, ar.cutoff, j)
            })
            .sum::<f64>()
    }

    /// Measure of `{δ''(r, L) ≤ c}` for `c ≤ I/2`: `Π_{i > n} 2c L^{-ρ_i}`.
    fn sublevel_measure(&self, c: f64, l: f64) -> f64 {
        self.other.iter().map(|&i| (2.0 * c * l.powf(-self.rho[i])).min(1.0)).product()
    }

    /// Exact `∫_M h_{r,L}`, from the box volumes of the strata.
    pub fn expected_h(&self, r: i64, l: f64) -> f64 {
        let delta1 = self.delta_one(r, l);
        if delta1 > 0.5 * self.i_const {
            return 0.0;
        }
        let cutoff = self.cutoff(delta1);
        let level = |j: u32| self.sublevel_measure(self.i_const * 0.5f64.powi(j as i32), l);
        let mut acc = 0.0;
        for j in 1..=cutoff.min(STRATUM_AT_ZERO - 1) {
            acc += self.stratum_weight(delta1, cutoff, j) * (level(j) - level(j + 1));
        }
        if cutoff < STRATUM_AT_ZERO {
            acc += (2.0 / delta1).powi(self.n() as i32) * level(cutoff + 1);
        }
        acc
    }

    /// Exact `∫_M H^T_L`.
    pub fn expected_big_h(&self, table: &ReturnTable) -> f64 {
        1.0 + table.active.iter().map(|ar| self.expected_h(ar.r, table.l)).sum::<f64>()
    }

    /// The stated bound `I^{a-n} (1 + J_{r,L}) L^{-Σ_{i>n} ρ_i}` on `∫_M h_{r,L}`.
    pub fn stated_h_bound(&self, r: i64, l: f64) -> f64 {
        let cutoff = self.cutoff(self.delta_one(r, l)) as f64;
        let rho_sum: f64 = self.other.iter().map(|&i| self.rho[i]).sum();
        self.i_const.powi(self.codim() as i32) * (1.0 + cutoff) * l.powf(-rho_sum)
    }

    /// `(2I)^{a-n} (1 + J_{r,L}) L^{-Σ_{i>n} ρ_i}`, the bound the box volumes give.
    pub fn box_h_bound(&self, r: i64, l: f64) -> f64 {
        2f64.powi(self.codim() as i32) * self.stated_h_bound(r, l)
    }

    /// Monte Carlo estimate of `∫_M h_{r,L}`, uniform on the fundamental domain.
    pub fn mc_h(&self, r: i64, l: f64, samples: usize, seed: u64) -> McEstimate {
        let shape = self.shape().clone();
        let vals = sample_points(&shape, samples, seed)
            .into_par_iter()
            .map(|(theta, s)| self.h(theta, &s, r, l))
            .collect::<Vec<_>>();
        McEstimate::from_values(&vals)
    }
}

/// Mean and standard error of a Monte Carlo sample.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl McEstimate {
    pub fn from_values(v: &[f64]) -> Self {
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = if v.len() > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        Self { mean, stderr: (var / n).sqrt(), samples: v.len() }
    }
}

const BATCH: usize = 4096;

/// Uniform points `(θ, s)` of `M`, with `s = h(-θ) u` for `u` uniform in `[0,1)^a`.
/// Batches use independent streams, so the result does not depend on the thread count.
pub fn sample_points(shape: &AlgebraShape, samples: usize, seed: u64) -> Vec<(f64, Vec<f64>)> {
    let batches = samples.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = BATCH.min(samples - b * BATCH);
            (0..count)
                .map(|_| {
                    let theta: f64 = rng.gen();
                    let u: Vec<f64> = (0..shape.a()).map(|_| rng.gen()).collect();
                    (theta, shape.apply_h(&-theta, &u))
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Monte Carlo frequency of `AP^r(U_θ)` next to the exact slice volume.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ApMeasure {
    pub empirical: f64,
    pub exact: f64,
    pub stderr: f64,
    /// `(empirical - exact) / stderr`; zero when both agree with no spread.
    pub z: f64,
}

/// Checks the almost-periodic measure formula on the fiber over `θ` for the
/// box `U = {|s_i| ≤ c_i}` with `c_i ∈ (0, 1/2]`.
pub fn ap_measure_check(flow: &Nilflow, theta: f64, half_widths: &[f64], r: i64, samples: usize, seed: u64) -> Result<ApMeasure> {
    let shape = flow.shape();
    if half_widths.len() != shape.a() || half_widths.iter().any(|c| !(*c > 0.0 && *c <= 0.5)) {
        return Err(Error::Argument("box half-widths must be in (0, 1/2], one per coordinate".into()));
    }
    if r == 0 {
        return Err(Error::Argument("AP sets need r ≠ 0".into()));
    }
    let first = shape.first_layer();
    let alpha = flow.alpha();
    let hit = first.iter().all(|&i| centered(mul_mod1(r as i128, alpha[i])).abs() <= half_widths[i]);
    let exact = if hit {
        (0..shape.a()).filter(|i| !first.contains(i)).map(|i| (2.0 * half_widths[i]).min(1.0)).product()
    } else {
        0.0
    };
    let batches = samples.div_ceil(BATCH);
    let count: usize = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let n = BATCH.min(samples - b * BATCH);
            let mut c = 0;
            for _ in 0..n {
                let u: Vec<f64> = (0..shape.a()).map(|_| rng.gen()).collect();
                let s = shape.apply_h(&-theta, &u);
                let img = flow.return_map(theta, &s, r);
                let d: Vec<f64> = img.iter().zip(&s).map(|(a, b)| a - b).collect();
                let d = reduce_displacement(shape, theta, &d);
                if d.iter().zip(half_widths).all(|(x, c)| x.abs() <= *c) {
                    c += 1;
                }
            }
            c
        })
        .sum();
    let p = count as f64 / samples as f64;
    let stderr = (exact * (1.0 - exact) / samples as f64).sqrt();
    let z = if stderr > 0.0 {
        (p - exact) / stderr
    } else if p == exact {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(ApMeasure { empirical: p, exact, stderr, z })
}
