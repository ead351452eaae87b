use serde::{Deserialize, Serialize};

use super::group::AlgebraElement;
use super::shape::AlgebraShape;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Structural flag of an adapted basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisKind {
    /// `X ∉ 𝔞` and `Y` spans `𝔞`.
    Adapted,
    /// Adapted, with `Y_{n+1}, ..., Y_a` spanning the derived algebra.
    StronglyAdapted,
    /// `[X, Y_i] = Y_{i+1}` along each block, zero at block ends.
    Jordan,
    /// `[X, Y_i] = c_i Y_{i+1}` with positive structural constants.
    GeneralizedJordan,
}

/// Ordered basis `(X, Y_1, ..., Y_a)` of a quasi-Abelian algebra.
///
/// `Y` vectors are stored by their coordinates in the lattice basis `η̃` of the
/// ideal. `chains` lists, for Jordan-type bases, the positions in `Y` of each
/// chain `Y_1^{(m)}, ..., Y_{i_m}^{(m)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedBasis<T> {
    pub shape: AlgebraShape,
    pub x: AlgebraElement<T>,
    pub y: Vec<Vec<T>>,
    pub kind: BasisKind,
    pub chains: Vec<Vec<usize>>,
    /// `c_i^{(m)}` with `[X, Y_i^{(m)}] = c_i^{(m)} Y_{i+1}^{(m)}`, indexed like `chains`
    /// minus the last element of each chain; empty unless Jordan-type.
    pub structural: Vec<Vec<T>>,
}

/// Output of [`jordan_from_lattice_basis`].
#[derive(Clone, Debug)]
pub struct JordanData<T> {
    pub basis: AdaptedBasis<T>,
    /// Per block, `R` with `η_j = η̃_j + Σ_{i>j} R_{ij} η̃_i`.
    pub r: Vec<Matrix<T>>,
    /// Per block, `S` with `η̃_j = η_j + Σ_{i>j} S_{ij} η_i`.
    pub s: Vec<Matrix<T>>,
}

impl<T: Scalar> AdaptedBasis<T> {
    /// Validates and wraps a basis. `kind` is checked against the brackets.
    pub fn new(shape: AlgebraShape, x: AlgebraElement<T>, y: Vec<Vec<T>>, kind: BasisKind) -> Result<Self> {
        let a = shape.a();
        shape.check_len(x.w.len(), "X")?;
        if x.t.is_zero() {
            return Err(Error::Argument("X must not lie in the ideal (t-component is zero)".into()));
        }
        if y.len() != a {
            return Err(Error::Shape(format!("need {a} ideal vectors, got {}", y.len())));
        }
        for v in &y {
            shape.check_len(v.len(), "Y vector")?;
        }
        let b = Matrix::from_columns(&y);
        if b.rank() < a {
            return Err(Error::Argument("Y does not span the ideal".into()));
        }
        let mut basis = Self { shape, x, y, kind: BasisKind::Adapted, chains: Vec::new(), structural: Vec::new() };
        match kind {
            BasisKind::Adapted => {}
            BasisKind::StronglyAdapted => {
                if !basis.is_strongly_adapted() {
                    return Err(Error::Argument("basis is not strongly adapted".into()));
                }
                basis.kind = kind;
            }
            BasisKind::Jordan | BasisKind::GeneralizedJordan => {
                let (chains, consts) = basis
                    .detect_chains()
                    .ok_or_else(|| Error::Argument("basis is not of generalized Jordan type".into()))?;
                let unit = consts.iter().flatten().all(|c| *c == T::one());
                if kind == BasisKind::Jordan && !unit {
                    return Err(Error::Argument("structural constants differ from one".into()));
                }
                basis.chains = chains;
                basis.structural = consts;
                basis.kind = kind;
            }
        }
        Ok(basis)
    }

    /// The lattice basis `(ξ, η̃)`.
    pub fn lattice(shape: &AlgebraShape) -> Self {
        let a = shape.a();
        let y = (0..a).map(|j| AlgebraElement::<T>::eta_tilde(a, j).w).collect();
        let kind = if shape.n() == 1 { BasisKind::StronglyAdapted } else { BasisKind::Adapted };
        Self::new(shape.clone(), AlgebraElement::xi(a), y, kind).expect("lattice basis")
    }

    /// Coordinate matrix whose columns are the `Y_i` in the `η̃` basis.
    pub fn coordinate_matrix(&self) -> Matrix<T> {
        Matrix::from_columns(&self.y)
    }

    /// Coordinate volume `ω(X, Y_1, ..., Y_a) = |t_X| · |det B|`.
    pub fn volume(&self) -> T {
        self.x.t.abs() * self.coordinate_matrix().det().abs()
    }

    /// `Y_{n+1}, ..., Y_a` have no component along the first layer.
    pub fn is_strongly_adapted(&self) -> bool {
        let n = self.shape.n();
        let first = self.shape.first_layer();
        let gens = Matrix::from_rows(
            self.y[..n].iter().map(|v| first.iter().map(|&f| v[f].clone()).collect()).collect(),
        );
        gens.rank() == n && self.y[n..].iter().all(|v| first.iter().all(|&f| v[f].is_zero()))
    }

    /// The same vectors with a different `X`; kind is re-derived.
    pub fn with_x(&self, x: AlgebraElement<T>) -> Result<Self> {
        let mut b = Self::new(self.shape.clone(), x, self.y.clone(), BasisKind::Adapted)?;
        b.refresh_kind();
        Ok(b)
    }

    /// Reorders `Y` so that the chain heads come first, then the remaining
    /// vectors in their original order. Chains and constants are carried along.
    pub fn strongly_adapted_order(&self) -> Result<Self> {
        let n = self.shape.n();
        let first = self.shape.first_layer();
        let mut heads = Vec::new();
        let mut rest = Vec::new();
        for (p, v) in self.y.iter().enumerate() {
            if first.iter().any(|&f| !v[f].is_zero()) {
                heads.push(p);
            } else {
                rest.push(p);
            }
        }
        if heads.len() != n {
            return Err(Error::Argument("cannot reorder into a strongly adapted basis".into()));
        }
        let perm: Vec<usize> = heads.into_iter().chain(rest).collect();
        let y = perm.iter().map(|&p| self.y[p].clone()).collect();
        let mut inv = vec![0; perm.len()];
        for (newp, &oldp) in perm.iter().enumerate() {
            inv[oldp] = newp;
        }
        let mut b = Self::new(self.shape.clone(), self.x.clone(), y, BasisKind::StronglyAdapted)?;
        b.chains = self.chains.iter().map(|c| c.iter().map(|&p| inv[p]).collect()).collect();
        b.structural = self.structural.clone();
        Ok(b)
    }

    /// Matrix of `ad(X)|𝔞` in the `Y` coordinates, `B^{-1} (τN) B`.
    pub fn ad_matrix(&self) -> Matrix<T> {
        ad_matrix(&self.x, self)
    }

    /// Rescales `X` by `sx` and each `Y_i` by `sy[i]`, updating structural constants.
    pub fn scaled(&self, sx: &T, sy: &[T]) -> Self {
        let x = self.x.scale(sx);
        let y: Vec<Vec<T>> = self
            .y
            .iter()
            .zip(sy)
            .map(|(v, s)| v.iter().map(|e| e.clone() * s.clone()).collect())
            .collect();
        let structural = self
            .chains
            .iter()
            .zip(&self.structural)
            .map(|(chain, cs)| {
                cs.iter()
                    .enumerate()
                    .map(|(i, c)| c.clone() * sx.clone() * sy[chain[i]].clone() / sy[chain[i + 1]].clone())
                    .collect()
            })
            .collect();
        let mut kind = self.kind;
        if kind == BasisKind::Jordan {
            kind = BasisKind::GeneralizedJordan;
        }
        let mut out = Self { shape: self.shape.clone(), x, y, kind, chains: self.chains.clone(), structural };
        if out.kind == BasisKind::GeneralizedJordan && out.structural.iter().flatten().all(|c| *c == T::one()) {
            out.kind = BasisKind::Jordan;
        }
        out
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U + Copy) -> AdaptedBasis<U> {
        AdaptedBasis {
            shape: self.shape.clone(),
            x: self.x.map(f),
            y: self.y.iter().map(|v| v.iter().map(f).collect()).collect(),
            kind: self.kind,
            chains: self.chains.clone(),
            structural: self.structural.iter().map(|c| c.iter().map(f).collect()).collect(),
        }
    }

    fn refresh_kind(&mut self) {
        if let Some((chains, consts)) = self.detect_chains() {
            let unit = consts.iter().flatten().all(|c| *c == T::one());
            self.kind = if unit { BasisKind::Jordan } else { BasisKind::GeneralizedJordan };
            self.chains = chains;
            self.structural = consts;
        } else if self.is_strongly_adapted() {
            self.kind = BasisKind::StronglyAdapted;
        } else {
            self.kind = BasisKind::Adapted;
        }
    }

    /// Detects chains `Y_p -> c Y_q` of `ad(X)` with positive constants whose lengths match the shape.
    fn detect_chains(&self) -> Option<(Vec<Vec<usize>>, Vec<Vec<T>>)> {
        let a = self.shape.a();
        let ad = self.ad_matrix();
        // successor of p: the unique q with ad[q][p] != 0
        let mut succ: Vec<Option<(usize, T)>> = vec![None; a];
        let mut has_pred = vec![false; a];
        for p in 0..a {
            let nz: Vec<usize> = (0..a).filter(|&q| !ad[(q, p)].is_zero()).collect();
            match nz.len() {
                0 => {}
                1 => {
                    let q = nz[0];
                    let c = ad[(q, p)].clone();
                    if c <= T::zero() || has_pred[q] {
                        return None;
                    }
                    has_pred[q] = true;
                    succ[p] = Some((q, c));
                }
                _ => return None,
            }
        }
        let mut chains = Vec::new();
        let mut consts = Vec::new();
        for start in (0..a).filter(|&p| !has_pred[p]) {
            let mut chain = vec![start];
            let mut cs = Vec::new();
            let mut cur = start;
            while let Some((q, c)) = succ[cur].clone() {
                chain.push(q);
                cs.push(c);
                cur = q;
                if chain.len() > a {
                    return None;
                }
            }
            chains.push(chain);
            consts.push(cs);
        }
        let mut lens: Vec<usize> = chains.iter().map(|c| c.len()).collect();
        let mut want = self.shape.degrees().to_vec();
        lens.sort_unstable();
        want.sort_unstable();
        if lens != want {
            return None;
        }
        // Order chains to follow the block order of the shape (stable on ties).
        let mut order: Vec<usize> = (0..chains.len()).collect();
        let first = self.shape.first_layer();
        order.sort_by_key(|&c| {
            let head = &self.y[chains[c][0]];
            first.iter().position(|&f| !head[f].is_zero()).unwrap_or(usize::MAX)
        });
        Some((
            order.iter().map(|&c| chains[c].clone()).collect(),
            order.iter().map(|&c| consts[c].clone()).collect(),
        ))
    }
}

/// Matrix of `ad(X)` restricted to the ideal, in the coordinates of `basis.y`.
pub fn ad_matrix<T: Scalar>(x: &AlgebraElement<T>, basis: &AdaptedBasis<T>) -> Matrix<T> {
    let shape = &basis.shape;
    let b = basis.coordinate_matrix();
    let binv = b.inverse().expect("adapted basis spans the ideal");
    let cols: Vec<Vec<T>> = basis.y.iter().map(|v| binv.mul_vec(&shape.ad_ideal(x, v))).collect();
    Matrix::from_columns(&cols)
}

/// Jordan basis `η_1 = η̃_1`, `η_{i+1} = [ξ, η_i]` of each block, with the
/// rational change-of-basis matrices to and from the lattice basis.
pub fn jordan_from_lattice_basis<T: Scalar>(shape: &AlgebraShape) -> JordanData<T> {
    let a = shape.a();
    let mut y: Vec<Vec<T>> = Vec::with_capacity(a);
    let mut r_blocks = Vec::new();
    let mut s_blocks = Vec::new();
    for m in 0..shape.n() {
        let range = shape.block(m);
        let d = shape.degrees()[m];
        let mut cur = vec![T::zero(); a];
        cur[range.start] = T::one();
        let mut cols = Vec::with_capacity(d);
        for _ in 0..d {
            y.push(cur.clone());
            cols.push(cur[range.clone()].to_vec());
            cur = shape.apply_n(&cur);
        }
        let e = Matrix::from_columns(&cols);
        let id = Matrix::identity(d);
        let einv = e.inverse().expect("unitriangular");
        r_blocks.push(e.sub(&id));
        s_blocks.push(einv.sub(&id));
    }
    let basis = AdaptedBasis::new(shape.clone(), AlgebraElement::xi(a), y, BasisKind::Jordan)
        .expect("Jordan basis is valid");
    JordanData { basis, r: r_blocks, s: s_blocks }
}
