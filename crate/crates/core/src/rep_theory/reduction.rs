use serde::{Deserialize, Serialize};

use super::forms::{rep_coefficients, LinearForm};
use crate::error::{Error, Result};
use crate::lie_core::{AdaptedBasis, BasisKind};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Bounds accompanying a filiform reduction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionCertificate {
    /// `C_{F,Λ} = |Λ(Y'_{d+1})|^{-1} max_{i, 0 ≤ j ≤ d_i} |Λ_i^{(j)}(F)|`.
    pub c_const: f64,
    /// `K_F`; equal to one for Jordan inputs.
    pub k_const: f64,
    /// `max |c_j^{(i)}| / (C (1+C)^{d_i - j})`; at most one when the coefficient bounds hold.
    pub coefficient_ratio: f64,
    /// `max |C^{Y,Y'}_{ij}| / (K C (1+C)^d)`; at most one when the matrix bound holds.
    pub matrix_ratio: f64,
    pub holds: bool,
}

/// Basis adapted to a representation: an ad-chain followed by a basis of the kernel.
#[derive(Clone, Debug)]
pub struct FiliformReduction<T> {
    pub basis: AdaptedBasis<T>,
    /// Degree `d` of the representation.
    pub degree: usize,
    /// Position in the input basis of the maximal-degree element `Y_*`.
    pub pivot: usize,
    /// Positions in the input basis of the elements completed into the kernel.
    pub complement: Vec<usize>,
    /// `Y' = Y · C`: column `j` holds the coordinates of `Y'_j` in the input basis.
    pub change: Matrix<T>,
    /// `c_j^{(i)}` for each complement element, `0 ≤ j ≤ d_i`.
    pub coefficients: Vec<Vec<T>>,
    pub certificate: ReductionCertificate,
}

/// Reduces an adapted basis to a generalized filiform basis for `π_Λ`.
///
/// The first `d + 1` vectors are `Y_*, ad(X) Y_*, ..., ad^d(X) Y_*` for the
/// first element `Y_*` of maximal degree; the remaining vectors are
/// `Y_i - Σ_j c_j^{(i)} Y'_{d-j+1}` for a complementary subset of the input,
/// with the `c_j^{(i)}` solved back to front.
pub fn filiform_reduction<T: Scalar>(lambda: &LinearForm<T>, basis: &AdaptedBasis<T>) -> Result<FiliformReduction<T>> {
    let rc = rep_coefficients(lambda, basis)?;
    if !rc.is_nondegenerate() {
        return Err(Error::Domain("form vanishes on the derived algebra; no reduction exists".into()));
    }
    let shape = &basis.shape;
    let a = shape.a();
    let d = rc.degree();
    let pivot = rc.degrees.iter().position(|&x| x == d).unwrap();

    let mut chain: Vec<Vec<T>> = Vec::with_capacity(d + 1);
    let mut cur = basis.y[pivot].clone();
    for _ in 0..=d {
        chain.push(cur.clone());
        cur = shape.ad_ideal(&basis.x, &cur);
    }
    // Λ(Y'_{j+1}) = Λ_*^{(j)}
    let lam_chain: Vec<T> = rc.table[pivot].clone();
    let top = lam_chain[d].clone();

    // Complete the chain greedily from the input vectors.
    let mut span = chain.clone();
    let mut complement = Vec::new();
    for (p, y) in basis.y.iter().enumerate() {
        if span.len() == a {
            break;
        }
        let mut trial = span.clone();
        trial.push(y.clone());
        if Matrix::from_columns(&trial).rank() == trial.len() {
            span = trial;
            complement.push(p);
        }
    }
    if span.len() != a {
        return Err(Error::Argument("chain could not be completed to a basis".into()));
    }

    let mut coefficients = Vec::with_capacity(complement.len());
    let mut new_y = chain.clone();
    for &p in &complement {
        let di = rc.degrees[p];
        let row = &rc.table[p];
        let mut c = vec![T::zero(); di + 1];
        for l in (0..=di).rev() {
            let mut rhs = row[l].clone();
            for j in l + 1..=di {
                rhs = rhs - c[j].clone() * lam_chain[d - j + l].clone();
            }
            c[l] = rhs / top.clone();
        }
        let mut v = basis.y[p].clone();
        for (j, cj) in c.iter().enumerate() {
            for (e, w) in v.iter_mut().zip(&chain[d - j]) {
                *e = e.clone() - cj.clone() * w.clone();
            }
        }
        new_y.push(v);
        coefficients.push(c);
    }

    let b = basis.coordinate_matrix();
    let binv = b.inverse().expect("adapted basis spans the ideal");
    let change = Matrix::from_columns(&new_y.iter().map(|v| binv.mul_vec(v)).collect::<Vec<_>>());

    let certificate = certify(&rc.table, &rc.degrees, &top, d, &complement, &coefficients, &change);
    let reduced = AdaptedBasis::new(shape.clone(), basis.x.clone(), new_y, BasisKind::Adapted)?.with_x(basis.x.clone())?;
    Ok(FiliformReduction { basis: reduced, degree: d, pivot, complement, change, coefficients, certificate })
}

fn certify<T: Scalar>(
    table: &[Vec<T>],
    degrees: &[usize],
    top: &T,
    d: usize,
    complement: &[usize],
    coefficients: &[Vec<T>],
    change: &Matrix<T>,
) -> ReductionCertificate {
    let a = table.len();
    let max_lam = table.iter().flatten().map(|c| c.abs().to_f64()).fold(0.0, f64::max);
    let cc = max_lam / top.abs().to_f64();
    let mut coefficient_ratio: f64 = 0.0;
    for (&p, c) in complement.iter().zip(coefficients) {
        let di = degrees[p];
        for (j, cj) in c.iter().enumerate() {
            let bound = cc * (1.0 + cc).powi((di - j) as i32);
            coefficient_ratio = coefficient_ratio.max(cj.abs().to_f64() / bound);
        }
    }
    let mut k_const: f64 = 0.0;
    for row in 0..a {
        let chi = if complement.contains(&row) { 1.0 } else { 0.0 };
        let s: f64 = (0..=d).map(|col| change[(row, col)].abs().to_f64()).sum();
        k_const = k_const.max(chi + s);
    }
    let mut entry: f64 = 0.0;
    for i in 0..a {
        for j in 0..a {
            entry = entry.max(change[(i, j)].abs().to_f64());
        }
    }
    let matrix_ratio = entry / (k_const * cc * (1.0 + cc).powi(d as i32));
    let slack = 1.0 + 1e-12;
    ReductionCertificate {
        c_const: cc,
        k_const,
        coefficient_ratio,
        matrix_ratio,
        holds: coefficient_ratio <= slack && matrix_ratio <= slack,
    }
}
