//! Faithful unipotent matrix model of the group and its Lie algebra.
//!
//! A group element `(t, v)` is the `(a+2)×(a+2)` matrix
//! `[[1, 0, t], [0, h(t), v], [0, 0, 1]]` and an algebra element `(τ, w)` is
//! `[[0, 0, τ], [0, τN, w], [0, 0, 0]]`. The extra row carrying `t` keeps the
//! model faithful when `N` vanishes on a block. Exponential and logarithm are
//! the plain terminating power series of nilpotent matrices.

use super::group::{AlgebraElement, GroupElement};
use super::shape::AlgebraShape;
use crate::linalg::Matrix;
use crate::scalar::{binomials, Scalar};

fn dim(shape: &AlgebraShape) -> usize {
    shape.a() + 2
}

/// The matrix of `h(t)` on the ideal.
pub fn h_matrix<T: Scalar>(shape: &AlgebraShape, t: &T) -> Matrix<T> {
    let b = binomials(t, shape.k());
    let mut m = Matrix::zeros(shape.a(), shape.a());
    for blk in 0..shape.n() {
        let r = shape.block(blk);
        for i in r.clone() {
            for j in r.start..=i {
                m[(i, j)] = b[i - j].clone();
            }
        }
    }
    m
}

/// The matrix of `N = log h(1)` on the ideal.
pub fn n_matrix<T: Scalar>(shape: &AlgebraShape) -> Matrix<T> {
    let a = shape.a();
    let mut m = Matrix::zeros(a, a);
    for j in 0..a {
        let mut e = vec![T::zero(); a];
        e[j] = T::one();
        let col = shape.apply_n(&e);
        for (i, v) in col.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    m
}

pub fn group_to_matrix<T: Scalar>(shape: &AlgebraShape, g: &GroupElement<T>) -> Matrix<T> {
    let a = shape.a();
    let mut m = Matrix::identity(dim(shape));
    m[(0, a + 1)] = g.t.clone();
    let h = h_matrix(shape, &g.t);
    for i in 0..a {
        for j in 0..a {
            m[(i + 1, j + 1)] = h[(i, j)].clone();
        }
        m[(i + 1, a + 1)] = g.v[i].clone();
    }
    m
}

pub fn matrix_to_group<T: Scalar>(shape: &AlgebraShape, m: &Matrix<T>) -> GroupElement<T> {
    let a = shape.a();
    GroupElement { t: m[(0, a + 1)].clone(), v: (0..a).map(|i| m[(i + 1, a + 1)].clone()).collect() }
}

pub fn algebra_to_matrix<T: Scalar>(shape: &AlgebraShape, x: &AlgebraElement<T>) -> Matrix<T> {
    let a = shape.a();
    let mut m = Matrix::zeros(dim(shape), dim(shape));
    m[(0, a + 1)] = x.t.clone();
    let n = n_matrix::<T>(shape).scale(&x.t);
    for i in 0..a {
        for j in 0..a {
            m[(i + 1, j + 1)] = n[(i, j)].clone();
        }
        m[(i + 1, a + 1)] = x.w[i].clone();
    }
    m
}

pub fn matrix_to_algebra<T: Scalar>(shape: &AlgebraShape, m: &Matrix<T>) -> AlgebraElement<T> {
    let a = shape.a();
    AlgebraElement { t: m[(0, a + 1)].clone(), w: (0..a).map(|i| m[(i + 1, a + 1)].clone()).collect() }
}

/// `Σ_j M^j / j!` for nilpotent `M`, summed until the power vanishes.
pub fn exp_nilpotent<T: Scalar>(m: &Matrix<T>) -> Matrix<T> {
    let n = m.rows();
    let mut acc = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for j in 1..=n {
        term = term.mul(m).scale(&T::from_ratio(1, j as i64));
        if term.is_zero() {
            break;
        }
        acc = acc.add(&term);
    }
    acc
}

/// `log(I + M) = Σ_j (-1)^{j+1} M^j / j` for unipotent `I + M`.
pub fn log_unipotent<T: Scalar>(u: &Matrix<T>) -> Matrix<T> {
    let n = u.rows();
    let m = u.sub(&Matrix::identity(n));
    let mut acc = Matrix::zeros(n, n);
    let mut power = Matrix::identity(n);
    for j in 1..=n {
        power = power.mul(&m);
        if power.is_zero() {
            break;
        }
        let sign = if j % 2 == 1 { 1 } else { -1 };
        acc = acc.add(&power.scale(&T::from_ratio(sign, j as i64)));
    }
    acc
}

/// Group exponential through the matrix model.
pub fn exp_via_matrix<T: Scalar>(shape: &AlgebraShape, x: &AlgebraElement<T>) -> GroupElement<T> {
    matrix_to_group(shape, &exp_nilpotent(&algebra_to_matrix(shape, x)))
}

/// Group logarithm through the matrix model.
pub fn log_via_matrix<T: Scalar>(shape: &AlgebraShape, g: &GroupElement<T>) -> AlgebraElement<T> {
    matrix_to_algebra(shape, &log_unipotent(&group_to_matrix(shape, g)))
}

/// Group product through the matrix model.
pub fn mul_via_matrix<T: Scalar>(shape: &AlgebraShape, g: &GroupElement<T>, g2: &GroupElement<T>) -> GroupElement<T> {
    matrix_to_group(shape, &group_to_matrix(shape, g).mul(&group_to_matrix(shape, g2)))
}
