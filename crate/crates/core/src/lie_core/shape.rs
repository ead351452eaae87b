use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{binomials, Scalar};

/// Combinatorial skeleton of a quasi-Abelian algebra.
///
/// `degrees[m]` is the length `i_m` of the `m`-th Jordan block of `ad(ξ)` on
/// the Abelian ideal. Coordinates of the ideal are flattened block by block,
/// which is the lexicographic order on index pairs `(m, i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraShape {
    degrees: Vec<usize>,
    offsets: Vec<usize>,
}

impl AlgebraShape {
    pub fn new(degrees: Vec<usize>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::Argument("shape needs at least one block".into()));
        }
        if degrees.contains(&0) {
            return Err(Error::Argument("block degrees must be positive".into()));
        }
        let mut offsets = Vec::with_capacity(degrees.len());
        let mut acc = 0;
        for &d in &degrees {
            offsets.push(acc);
            acc += d;
        }
        Ok(Self { degrees, offsets })
    }

    /// Single block of length `k` (the two-generator case).
    pub fn filiform(k: usize) -> Self {
        Self::new(vec![k]).expect("positive degree")
    }

    /// Number of Abelian generators.
    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// Step of the algebra (longest block).
    pub fn k(&self) -> usize {
        *self.degrees.iter().max().unwrap()
    }

    /// Dimension of the Abelian ideal.
    pub fn a(&self) -> usize {
        self.degrees.iter().sum()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Flat index of the zero-based pair `(m, i)`.
    pub fn index(&self, m: usize, i: usize) -> usize {
        debug_assert!(i < self.degrees[m]);
        self.offsets[m] + i
    }

    /// Index range of block `m`.
    pub fn block(&self, m: usize) -> std::ops::Range<usize> {
        self.offsets[m]..self.offsets[m] + self.degrees[m]
    }

    /// Zero-based `(m, i)` of a flat index.
    pub fn pair(&self, idx: usize) -> (usize, usize) {
        let m = self.offsets.iter().rposition(|&o| o <= idx).unwrap();
        (m, idx - self.offsets[m])
    }

    /// The ordered index set J as one-based pairs.
    pub fn index_set(&self) -> Vec<(usize, usize)> {
        (0..self.a()).map(|idx| {
            let (m, i) = self.pair(idx);
            (m + 1, i + 1)
        })
        .collect()
    }

    /// Flat indices of the first coordinate of each block.
    pub fn first_layer(&self) -> Vec<usize> {
        self.offsets.clone()
    }

    /// Flat indices of the last coordinate of each block.
    pub fn top_layer(&self) -> Vec<usize> {
        (0..self.n()).map(|m| self.offsets[m] + self.degrees[m] - 1).collect()
    }

    pub fn is_first_layer(&self, idx: usize) -> bool {
        self.offsets.contains(&idx)
    }

    pub(crate) fn check_len(&self, len: usize, what: &str) -> Result<()> {
        if len != self.a() {
            return Err(Error::Shape(format!("{what} has length {len}, shape {self} needs {}", self.a())));
        }
        Ok(())
    }

    /// `h(t) v`, the block-wise action of `e^{tN}`.
    pub fn apply_h<T: Scalar>(&self, t: &T, v: &[T]) -> Vec<T> {
        let b = binomials(t, self.k());
        self.apply_lower_toeplitz(&b, v)
    }

    /// `N v` where `N = log h(1)` acts on each block by `(-1)^{d-1}/d` on the `d`-th subdiagonal.
    pub fn apply_n<T: Scalar>(&self, v: &[T]) -> Vec<T> {
        let mut c = vec![T::zero(); self.k()];
        for (d, cd) in c.iter_mut().enumerate().skip(1) {
            let sign = if d % 2 == 1 { 1 } else { -1 };
            *cd = T::from_ratio(sign, d as i64);
        }
        self.apply_lower_toeplitz(&c, v)
    }

    /// Applies the block lower-triangular Toeplitz matrix with diagonals `c`.
    pub(crate) fn apply_lower_toeplitz<T: Scalar>(&self, c: &[T], v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); v.len()];
        for m in 0..self.n() {
            let r = self.block(m);
            let base = r.start;
            for i in 0..self.degrees[m] {
                let mut acc = T::zero();
                for j in 0..=i {
                    let cij = &c[i - j];
                    if !cij.is_zero() {
                        acc = acc + cij.clone() * v[base + j].clone();
                    }
                }
                out[base + i] = acc;
            }
        }
        out
    }
}

impl fmt::Display for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let degs: Vec<String> = self.degrees.iter().map(|d| d.to_string()).collect();
        write!(f, "{}|{}", self.k(), degs.join(","))
    }
}

impl FromStr for AlgebraShape {
    type Err = Error;

    /// Parses the compact form `"k|i_1,...,i_n"`, e.g. `"3|3,2"`.
    fn from_str(s: &str) -> Result<Self> {
        let (k, rest) = s
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("shape '{s}' must look like k|i_1,...,i_n")))?;
        let k: usize = k.trim().parse().map_err(|_| Error::Parse(format!("bad step in shape '{s}'")))?;
        let degrees = rest
            .split(',')
            .map(|d| d.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad degree in shape '{s}'"))))
            .collect::<Result<Vec<_>>>()?;
        let shape = AlgebraShape::new(degrees)?;
        if shape.k() != k {
            return Err(Error::Parse(format!("shape '{s}': step {k} differs from max degree {}", shape.k())));
        }
        Ok(shape)
    }
}
