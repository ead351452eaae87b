use serde::{Deserialize, Serialize};

use super::shape::AlgebraShape;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Element `t ξ + Σ w_j η̃_j` of the Lie algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement<T> {
    pub t: T,
    pub w: Vec<T>,
}

/// Element `(t, v)` of the twisted product `ℝ ⋉_h ℝ^a`.
///
/// The product is `(t, v)(t', v') = (t + t', v + h(t) v')`, so that conjugation
/// by `x = (1, 0)` acts on the ideal by `h(1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupElement<T> {
    pub t: T,
    pub v: Vec<T>,
}

/// Integer point `(q, m)` of the lattice `Γ = ℤ ⋉ ℤ^a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticePoint {
    pub q: i64,
    pub m: Vec<i64>,
}

impl<T: Scalar> AlgebraElement<T> {
    pub fn new(t: T, w: Vec<T>) -> Self {
        Self { t, w }
    }

    pub fn zero(a: usize) -> Self {
        Self { t: T::zero(), w: vec![T::zero(); a] }
    }

    /// The generator `ξ = log x`.
    pub fn xi(a: usize) -> Self {
        Self { t: T::one(), w: vec![T::zero(); a] }
    }

    /// The ideal element `η̃_j` (flat index `j`).
    pub fn eta_tilde(a: usize, j: usize) -> Self {
        let mut w = vec![T::zero(); a];
        w[j] = T::one();
        Self { t: T::zero(), w }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            t: self.t.clone() + o.t.clone(),
            w: self.w.iter().zip(&o.w).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        Self { t: self.t.clone() * s.clone(), w: self.w.iter().map(|a| a.clone() * s.clone()).collect() }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> AlgebraElement<U> {
        AlgebraElement { t: f(&self.t), w: self.w.iter().map(&f).collect() }
    }

    /// True when the element lies in the Abelian ideal.
    pub fn in_ideal(&self) -> bool {
        self.t.is_zero()
    }
}

impl<T: Scalar> GroupElement<T> {
    pub fn new(t: T, v: Vec<T>) -> Self {
        Self { t, v }
    }

    pub fn identity(a: usize) -> Self {
        Self { t: T::zero(), v: vec![T::zero(); a] }
    }

    /// The generator `x = (1, 0)`.
    pub fn x(a: usize) -> Self {
        Self { t: T::one(), v: vec![T::zero(); a] }
    }

    /// The generator `y_j = (0, e_j)`.
    pub fn y(a: usize, j: usize) -> Self {
        let mut v = vec![T::zero(); a];
        v[j] = T::one();
        Self { t: T::zero(), v }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> GroupElement<U> {
        GroupElement { t: f(&self.t), v: self.v.iter().map(&f).collect() }
    }
}

impl LatticePoint {
    pub fn new(q: i64, m: Vec<i64>) -> Self {
        Self { q, m }
    }

    pub fn to_group<T: Scalar>(&self) -> GroupElement<T> {
        GroupElement {
            t: T::from_i64(self.q).unwrap(),
            v: self.m.iter().map(|&x| T::from_i64(x).unwrap()).collect(),
        }
    }
}

/// Bernoulli numbers `B_0..B_n` with `B_1 = -1/2`, as reduced fractions.
pub(crate) fn bernoulli(n: usize) -> Vec<(i64, i64)> {
    use num::rational::Ratio;
    let mut b: Vec<Ratio<i128>> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m == 0 {
            b.push(Ratio::from_integer(1));
            continue;
        }
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = Ratio::from_integer(0i128);
        let mut c: i128 = 1;
        for (j, bj) in b.iter().enumerate() {
            acc += *bj * c;
            c = c * (m as i128 + 1 - j as i128) / (j as i128 + 1);
        }
        b.push(-acc / (m as i128 + 1));
    }
    b.into_iter().map(|r| (*r.numer() as i64, *r.denom() as i64)).collect()
}

impl AlgebraShape {
    fn check_group<T>(&self, g: &GroupElement<T>) -> Result<()> {
        self.check_len(g.v.len(), "group element")
    }

    fn check_algebra<T>(&self, x: &AlgebraElement<T>) -> Result<()> {
        self.check_len(x.w.len(), "algebra element")
    }

    /// Group law `(t, v)(t', v') = (t + t', v + h(t) v')`.
    pub fn group_mul<T: Scalar>(&self, g: &GroupElement<T>, g2: &GroupElement<T>) -> Result<GroupElement<T>> {
        self.check_group(g)?;
        self.check_group(g2)?;
        let hv = self.apply_h(&g.t, &g2.v);
        Ok(GroupElement {
            t: g.t.clone() + g2.t.clone(),
            v: g.v.iter().zip(hv).map(|(a, b)| a.clone() + b).collect(),
        })
    }

    /// Inverse `(-t, -h(-t) v)`.
    pub fn group_inv<T: Scalar>(&self, g: &GroupElement<T>) -> Result<GroupElement<T>> {
        self.check_group(g)?;
        let mt = -g.t.clone();
        let hv = self.apply_h(&mt, &g.v);
        Ok(GroupElement { t: mt, v: hv.into_iter().map(|x| -x).collect() })
    }

    /// Exponential map, `exp(τ ξ + w) = (τ, Σ_j (τN)^j w / (j+1)!)`.
    ///
    /// This is the top-right block of the exponential of the nilpotent matrix
    /// `[[0, 0, τ], [0, τN, w], [0, 0, 0]]`; the series stops after `k` terms.
    pub fn exp<T: Scalar>(&self, x: &AlgebraElement<T>) -> Result<GroupElement<T>> {
        self.check_algebra(x)?;
        let mut term = x.w.clone();
        let mut acc = x.w.clone();
        for j in 1..self.k() {
            let nt = self.apply_n(&term);
            let denom = T::from_usize(j + 1).unwrap();
            term = nt.into_iter().map(|e| e * x.t.clone() / denom.clone()).collect();
            for (a, b) in acc.iter_mut().zip(&term) {
                *a = a.clone() + b.clone();
            }
        }
        Ok(GroupElement { t: x.t.clone(), v: acc })
    }

    /// Logarithm, inverse of [`AlgebraShape::exp`]: `w = Σ_j B_j (tN)^j v / j!`.
    pub fn log<T: Scalar>(&self, g: &GroupElement<T>) -> Result<AlgebraElement<T>> {
        self.check_group(g)?;
        let bern = bernoulli(self.k());
        let mut term = g.v.clone();
        let mut acc = g.v.clone();
        for (j, &(bn, bd)) in bern.iter().enumerate().take(self.k()).skip(1) {
            let nt = self.apply_n(&term);
            let denom = T::from_usize(j).unwrap();
            term = nt.into_iter().map(|e| e * g.t.clone() / denom.clone()).collect();
            if bn != 0 {
                let bj = T::from_ratio(bn, bd);
                for (a, b) in acc.iter_mut().zip(&term) {
                    *a = a.clone() + bj.clone() * b.clone();
                }
            }
        }
        Ok(AlgebraElement { t: g.t.clone(), w: acc })
    }

    /// Lie bracket `[(τ, w), (τ', w')] = (0, τ N w' - τ' N w)`.
    pub fn bracket<T: Scalar>(&self, x: &AlgebraElement<T>, y: &AlgebraElement<T>) -> Result<AlgebraElement<T>> {
        self.check_algebra(x)?;
        self.check_algebra(y)?;
        let a = self.apply_n(&y.w);
        let b = self.apply_n(&x.w);
        Ok(AlgebraElement {
            t: T::zero(),
            w: a.into_iter()
                .zip(b)
                .map(|(p, q)| x.t.clone() * p - y.t.clone() * q)
                .collect(),
        })
    }

    /// `ad(X)` applied to an element of the ideal, `τ N w`.
    pub fn ad_ideal<T: Scalar>(&self, x: &AlgebraElement<T>, w: &[T]) -> Vec<T> {
        self.apply_n(w).into_iter().map(|e| e * x.t.clone()).collect()
    }

    /// Canonical representative of `Γ g` with `t ∈ [0,1)` and `v ∈ [0,1)^a`.
    ///
    /// The time is reduced first with `(q, 0)`, `q = -⌊t⌋`; then `(0, m)` with
    /// `m = -⌊v⌋` reduces the fiber coordinates.
    pub fn reduce<T: Scalar>(&self, g: &GroupElement<T>) -> Result<GroupElement<T>> {
        Ok(self.reduce_with_witness(g)?.0)
    }

    /// As [`AlgebraShape::reduce`], also returning the lattice element `γ` with `γ g` reduced.
    pub fn reduce_with_witness<T: Scalar>(&self, g: &GroupElement<T>) -> Result<(GroupElement<T>, LatticePoint)> {
        self.check_group(g)?;
        let q = -g.t.floor();
        let t = g.t.clone() + q.clone();
        let hv = self.apply_h(&q, &g.v);
        let mut m = Vec::with_capacity(hv.len());
        let v: Vec<T> = hv
            .into_iter()
            .map(|x| {
                let f = x.floor();
                m.push(-f.to_f64() as i64);
                x - f
            })
            .collect();
        let qi = q.to_f64() as i64;
        Ok((GroupElement { t, v }, LatticePoint { q: qi, m }))
    }

    /// Left multiplication by a lattice point.
    pub fn lattice_mul<T: Scalar>(&self, gamma: &LatticePoint, g: &GroupElement<T>) -> Result<GroupElement<T>> {
        if gamma.m.len() != self.a() {
            return Err(Error::Shape("lattice point length".into()));
        }
        self.group_mul(&gamma.to_group(), g)
    }
}
