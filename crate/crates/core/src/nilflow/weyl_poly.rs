//! The Weyl polynomial of a filiform return map and its monomial form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modmath::{binom_big, binom_i128, frac, mul_mod1, mul_mod1_big};
use crate::scalar::Scalar;

/// Real polynomial `P(N) = Σ_j a_j N^j`, stored by monomial coefficients `a_0..a_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylPolynomial<T> {
    pub coeffs: Vec<T>,
}

impl<T: Scalar> WeylPolynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    /// Polynomial of the filiform return map with frequencies `α` and start `s`.
    pub fn from_binomial(alpha: &[T], s: &[T]) -> Result<Self> {
        Ok(Self { coeffs: coefficient_map(alpha, s)? })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Exact value by Horner's rule.
    pub fn eval(&self, n: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * n.clone() + c.clone())
    }

    /// Binomial-basis coefficients `b_j = Δ^j P(0)`, so `P(N) = Σ_j b_j binom(N, j)`.
    pub fn binomial_coefficients(&self) -> Vec<T> {
        let k = self.degree();
        let mut vals: Vec<T> = (0..=k).map(|i| self.eval(&T::from_usize(i).unwrap())).collect();
        let mut out = Vec::with_capacity(k + 1);
        for j in 0..=k {
            out.push(vals[0].clone());
            for i in 0..k - j {
                vals[i] = vals[i + 1].clone() - vals[i].clone();
            }
            vals.truncate(k - j);
        }
        out
    }

    /// Frequencies and start point `(α, s)` realizing this polynomial, with `s_1 = ... = s_{k-1} = 0`.
    pub fn to_binomial(&self) -> (Vec<T>, Vec<T>) {
        let k = self.degree();
        let b = self.binomial_coefficients();
        let mut alpha = vec![T::zero(); k];
        let mut s = vec![T::zero(); k];
        alpha[0] = b[k].clone();
        for j in 1..k {
            alpha[k - j] = b[j].clone();
        }
        s[k - 1] = b[0].clone();
        (alpha, s)
    }
}

fn check(alpha_len: usize, s_len: usize) -> Result<usize> {
    if alpha_len != s_len || alpha_len == 0 {
        return Err(Error::Shape(format!("α has length {alpha_len}, s has length {s_len}")));
    }
    Ok(alpha_len)
}

/// `P_k(α, s, N) = binom(N,k) α_1 + Σ_{j=1}^{k-1} binom(N,j)(s_{k-j} + α_{k-j+1}) + s_k`, exactly.
pub fn weyl_polynomial_value<T: Scalar>(alpha: &[T], s: &[T], n: i64) -> Result<T> {
    let k = check(alpha.len(), s.len())?;
    let nt = T::from_i64(n).unwrap();
    let b = crate::scalar::binomials(&nt, k);
    let mut acc = b[k].clone() * alpha[0].clone() + s[k - 1].clone();
    for j in 1..k {
        acc = acc + b[j].clone() * (s[k - j - 1].clone() + alpha[k - j].clone());
    }
    Ok(acc)
}

/// `P_k(α, s, N) mod 1` in double precision, with exact integer binomials.
pub fn weyl_polynomial_mod1(alpha: &[f64], s: &[f64], n: i64) -> Result<f64> {
    let k = check(alpha.len(), s.len())?;
    let mul = |j: usize, x: f64| match binom_i128(n, j) {
        Some(b) => mul_mod1(b, x),
        None => mul_mod1_big(&binom_big(&n.into(), j), x),
    };
    let mut acc = mul(k, alpha[0]) + frac(s[k - 1]);
    for j in 1..k {
        acc += mul(j, s[k - j - 1]) + mul(j, alpha[k - j]);
    }
    Ok(frac(acc))
}

/// Monomial coefficients `a_0..a_k` of `P_k(α, s, ·)`.
pub fn coefficient_map<T: Scalar>(alpha: &[T], s: &[T]) -> Result<Vec<T>> {
    let k = check(alpha.len(), s.len())?;
    // polys[j] = coefficients of binom(N, j)
    let mut polys: Vec<Vec<T>> = vec![vec![T::one()]];
    for j in 0..k {
        let prev = &polys[j];
        let jt = T::from_usize(j).unwrap();
        let d = T::from_usize(j + 1).unwrap();
        let mut next = vec![T::zero(); prev.len() + 1];
        for (i, c) in prev.iter().enumerate() {
            // (N - j)/(j+1) * c N^i
            next[i + 1] = next[i + 1].clone() + c.clone() / d.clone();
            next[i] = next[i].clone() - c.clone() * jt.clone() / d.clone();
        }
        polys.push(next);
    }
    let mut weights = vec![T::zero(); k + 1];
    weights[k] = alpha[0].clone();
    weights[0] = s[k - 1].clone();
    for j in 1..k {
        weights[j] = s[k - j - 1].clone() + alpha[k - j].clone();
    }
    let mut out = vec![T::zero(); k + 1];
    for (w, p) in weights.iter().zip(&polys) {
        for (o, c) in out.iter_mut().zip(p) {
            *o = o.clone() + w.clone() * c.clone();
        }
    }
    Ok(out)
}
