use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_core::{AlgebraElement, AlgebraShape, GroupElement};
use crate::modmath::{binom_big, binom_i128, frac, mul_mod1, mul_mod1_big};
use crate::scalar::{binomials, Scalar};

/// Frequencies `α_i^{(m)}` indexed by the flattened index set of a shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyVector<T> {
    pub shape: AlgebraShape,
    pub alpha: Vec<T>,
}

impl<T: Scalar> FrequencyVector<T> {
    pub fn new(shape: AlgebraShape, alpha: Vec<T>) -> Result<Self> {
        shape.check_len(alpha.len(), "frequency vector")?;
        Ok(Self { shape, alpha })
    }

    /// The first-layer frequencies `α_1 = (α_1^{(1)}, ..., α_1^{(n)})`.
    pub fn first_layer(&self) -> Vec<T> {
        self.shape.first_layer().into_iter().map(|i| self.alpha[i].clone()).collect()
    }

    /// Frequencies of block `m`.
    pub fn block(&self, m: usize) -> &[T] {
        &self.alpha[self.shape.block(m)]
    }
}

/// `X_α = log(x^{-1} exp(Σ α_j η̃_j))`; its `ξ`-component is always `-1`.
pub fn build_x_alpha<T: Scalar>(freq: &FrequencyVector<T>) -> AlgebraElement<T> {
    let shape = &freq.shape;
    // x^{-1} = (-1, 0) and exp(Σ α η̃) = (0, α), so the product is (-1, h(-1) α).
    let g = GroupElement::new(-T::one(), shape.apply_h(&-T::one(), &freq.alpha));
    shape.log(&g).expect("lengths checked")
}

/// Closed-form `N`-th return map `h(N) s + c_N(α)` without reduction, where
/// `c_N(α) = Σ_{j<N} h(j) α` has block entries `Σ_l binom(N, l+1) α_{i-l}`.
pub fn return_map_exact<T: Scalar>(freq: &FrequencyVector<T>, s: &[T], n: i64) -> Vec<T> {
    let shape = &freq.shape;
    let nt = T::from_i64(n).unwrap();
    let b = binomials(&nt, shape.k() + 1);
    let hs = shape.apply_lower_toeplitz(&b, s);
    let c = shape.apply_lower_toeplitz(&b[1..], &freq.alpha);
    hs.into_iter().zip(c).map(|(x, y)| x + y).collect()
}

/// Nilflow `φ^t(Γ g) = Γ g exp(t X_α)` on the compact quotient, in double precision.
///
/// Integer parts of the time are applied through the closed-form return map,
/// evaluated modulo one with exact integer multipliers, so accuracy does not
/// degrade with the length of the orbit.
#[derive(Clone, Debug)]
pub struct Nilflow {
    shape: AlgebraShape,
    alpha: Vec<f64>,
    generator: AlgebraElement<f64>,
    /// `(τN)^j w / (j+1)!` for the generator `(τ, w)`.
    exp_terms: Vec<Vec<f64>>,
}

impl Nilflow {
    pub fn new(shape: AlgebraShape, alpha: Vec<f64>) -> Result<Self> {
        let freq = FrequencyVector::new(shape.clone(), alpha.clone())?;
        let generator = build_x_alpha(&freq);
        let mut exp_terms = Vec::with_capacity(shape.k());
        let mut term = generator.w.clone();
        exp_terms.push(term.clone());
        for j in 1..shape.k() {
            term = shape.ad_ideal(&generator, &term).into_iter().map(|e| e / (j + 1) as f64).collect();
            exp_terms.push(term.clone());
        }
        Ok(Self { shape, alpha, generator, exp_terms })
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// The generator `X_α`.
    pub fn generator(&self) -> &AlgebraElement<f64> {
        &self.generator
    }

    /// Ideal component of `exp(s X_α)`.
    pub fn exp_ideal(&self, s: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.shape.a()];
        let mut p = s;
        for term in &self.exp_terms {
            for (o, t) in out.iter_mut().zip(term) {
                *o += p * t;
            }
            p *= s;
        }
        out
    }

    /// Reduced point `φ^t(x)`.
    pub fn flow(&self, x: &GroupElement<f64>, t: f64) -> GroupElement<f64> {
        let x = self.shape.reduce(x).expect("length checked by caller");
        let n = t.floor();
        let f = t - n;
        let u = if n != 0.0 { self.advance(x.t, &x.v, n as i64) } else { x.v };
        if f == 0.0 {
            return GroupElement::new(x.t, u);
        }
        // (θ, u) exp(f X) = (θ - f, u + h(θ) e(f)), then one lattice step if θ - f < 0.
        let e = self.exp_ideal(f);
        let he = self.shape.apply_h(&x.t, &e);
        let v: Vec<f64> = u.iter().zip(he).map(|(a, b)| a + b).collect();
        self.shape.reduce(&GroupElement::new(x.t - f, v)).unwrap()
    }

    /// The untwisted fiber coordinates `u` after `n` unit steps on the fiber over `θ`:
    /// `u ↦ h(n) u + c_n(h(θ) α) mod ℤ^a`.
    pub fn advance(&self, theta: f64, u: &[f64], n: i64) -> Vec<f64> {
        let beta = self.shape.apply_h(&theta, &self.alpha);
        let k = self.shape.k();
        let bin: Vec<Option<i128>> = (0..=k + 1).map(|j| binom_i128(n, j)).collect();
        let mut out = vec![0.0; u.len()];
        for m in 0..self.shape.n() {
            let r = self.shape.block(m);
            for i in 0..r.len() {
                let mut acc = 0.0;
                for l in 0..=i {
                    acc += mul_bin(&bin, n, l, u[r.start + i - l]);
                    acc += mul_bin(&bin, n, l + 1, beta[r.start + i - l]);
                }
                out[r.start + i] = frac(acc);
            }
        }
        out
    }

    /// `N`-th return map on the fiber `T^a_θ` in the coordinates `s` of the
    /// point `(θ, h(θ) s)`. The result is the canonical representative
    /// `h(-θ) u'` with `u' ∈ [0,1)^a`.
    pub fn return_map(&self, theta: f64, s: &[f64], n: i64) -> Vec<f64> {
        let u: Vec<f64> = self.shape.apply_h(&theta, s).into_iter().map(frac).collect();
        let u2 = self.advance(theta, &u, n);
        self.shape.apply_h(&-theta, &u2)
    }

    /// Point `(θ, h(θ) s)` of the fiber over `θ`, reduced.
    pub fn fiber_point(&self, theta: f64, s: &[f64]) -> GroupElement<f64> {
        self.shape.reduce(&GroupElement::new(theta, self.shape.apply_h(&theta, s))).unwrap()
    }

    /// Checks a point has the right length for this flow.
    pub fn check(&self, x: &GroupElement<f64>) -> Result<()> {
        if x.v.len() != self.shape.a() {
            return Err(Error::Shape(format!("point of length {} for shape {}", x.v.len(), self.shape)));
        }
        Ok(())
    }
}

fn mul_bin(bin: &[Option<i128>], n: i64, j: usize, x: f64) -> f64 {
    match bin[j] {
        Some(b) => mul_mod1(b, x),
        None => mul_mod1_big(&binom_big(&n.into(), j), x),
    }
}
