use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie_core::{AdaptedBasis, AlgebraShape};
use crate::scalar::Scalar;

/// Linear form `Λ` on the ideal, given by its values `Λ(η̃_j)` on the lattice basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearForm<T> {
    pub shape: AlgebraShape,
    pub values: Vec<T>,
    /// Set when every value is an integer multiple of `2π`.
    pub integral: bool,
}

impl<T: Scalar> LinearForm<T> {
    pub fn new(shape: AlgebraShape, values: Vec<T>) -> Result<Self> {
        shape.check_len(values.len(), "linear form")?;
        Ok(Self { shape, values, integral: false })
    }

    /// The form with prescribed values `Λ(Y_i)` on the vectors of a basis.
    pub fn from_basis_values(basis: &AdaptedBasis<T>, values: &[T]) -> Result<Self> {
        basis.shape.check_len(values.len(), "linear form")?;
        let binv = basis.coordinate_matrix().inverse().expect("adapted basis spans the ideal");
        let lam = binv.transpose().mul_vec(values);
        Ok(Self { shape: basis.shape.clone(), values: lam, integral: false })
    }

    /// `Λ(v)` for `v` in lattice coordinates.
    pub fn eval(&self, v: &[T]) -> T {
        self.values.iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LinearForm<U> {
        LinearForm { shape: self.shape.clone(), values: self.values.iter().map(f).collect(), integral: self.integral }
    }
}

impl LinearForm<f64> {
    /// Integral form `Λ(η̃_j) = 2π m_j`.
    pub fn integral(shape: AlgebraShape, m: &[i64]) -> Result<Self> {
        shape.check_len(m.len(), "linear form")?;
        let values = m.iter().map(|&x| std::f64::consts::TAU * x as f64).collect();
        Ok(Self { shape, values, integral: true })
    }
}

/// Coefficients `Λ_i^{(j)}(F) = Λ(ad^j(X) Y_i)` of a representation in a basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepCoefficients<T> {
    /// `table[i][j]` for `0 ≤ j ≤ d_i`.
    pub table: Vec<Vec<T>>,
    pub degrees: Vec<usize>,
}

/// `Λ(ad^j(X) Y_i)` for all `i` and `0 ≤ j < k`, with degrees read off the last nonzero entry.
pub fn rep_coefficients<T: Scalar>(lambda: &LinearForm<T>, basis: &AdaptedBasis<T>) -> Result<RepCoefficients<T>> {
    if lambda.shape != basis.shape {
        return Err(Error::Shape(format!("form on {} but basis on {}", lambda.shape, basis.shape)));
    }
    let shape = &basis.shape;
    let k = shape.k();
    let mut table = Vec::with_capacity(shape.a());
    let mut degrees = Vec::with_capacity(shape.a());
    for y in &basis.y {
        let mut row = Vec::with_capacity(k);
        let mut cur = y.clone();
        for _ in 0..k {
            row.push(lambda.eval(&cur));
            cur = shape.ad_ideal(&basis.x, &cur);
        }
        let d = row.iter().rposition(|c| !c.is_zero()).unwrap_or(0);
        row.truncate(d + 1);
        table.push(row);
        degrees.push(d);
    }
    Ok(RepCoefficients { table, degrees })
}

fn factorial<T: Scalar>(j: usize) -> T {
    (1..=j).fold(T::one(), |acc, i| acc * T::from_usize(i).unwrap())
}

impl<T: Scalar> RepCoefficients<T> {
    /// `Λ ∈ 𝔞*_0`, i.e. some degree is nonzero.
    pub fn is_nondegenerate(&self) -> bool {
        self.degrees.iter().any(|&d| d > 0)
    }

    /// Degree of the representation, `max_i d_i`.
    pub fn degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Coefficients of `P_{Λ,Y_i}(x) = Σ_j Λ_i^{(j)} x^j / j!`.
    pub fn polynomial(&self, i: usize) -> Vec<T> {
        self.table[i].iter().enumerate().map(|(j, c)| c.clone() / factorial::<T>(j)).collect()
    }

    /// `|Λ(F)| = sup_{i,j} |Λ_i^{(j)}/j!|`.
    pub fn sup_norm(&self) -> T {
        let mut best = T::zero();
        for i in 0..self.table.len() {
            for c in self.polynomial(i) {
                if c.abs() > best {
                    best = c.abs();
                }
            }
        }
        best
    }

    /// The even polynomial `Δ_{Λ,F} = Σ_i P_{Λ,Y_i}^2`.
    pub fn delta(&self) -> DeltaPolynomial<T> {
        let deg = 2 * self.degree();
        let mut coeffs = vec![T::zero(); deg + 1];
        for i in 0..self.table.len() {
            let p = self.polynomial(i);
            for (a, pa) in p.iter().enumerate() {
                for (b, pb) in p.iter().enumerate() {
                    coeffs[a + b] = coeffs[a + b].clone() + pa.clone() * pb.clone();
                }
            }
        }
        DeltaPolynomial { coeffs, polys: (0..self.table.len()).map(|i| self.polynomial(i)).collect() }
    }

    /// `w_F(Λ) = min_{d_i ≠ 0} |Λ_i^{(d_i)}/d_i!|^{-1/d_i}`.
    pub fn weight(&self) -> Result<f64> {
        let mut w = f64::INFINITY;
        for (row, &d) in self.table.iter().zip(&self.degrees) {
            if d == 0 {
                continue;
            }
            let top = (row[d].clone() / factorial::<T>(d)).abs().to_f64();
            w = w.min(top.powf(-1.0 / d as f64));
        }
        if w.is_finite() {
            Ok(w)
        } else {
            Err(Error::Domain("all degrees vanish; the form is not in 𝔞*_0".into()))
        }
    }

    /// `Λ̂_i^{(j)} = Λ_i^{(j)} w^j`.
    pub fn hat_coefficients(&self) -> Result<Vec<Vec<f64>>> {
        let w = self.weight()?;
        Ok(self
            .table
            .iter()
            .map(|row| row.iter().enumerate().map(|(j, c)| c.to_f64() * w.powi(j as i32)).collect())
            .collect())
    }

    /// `|Λ̂(F)| = sup_{i,j} |Λ̂_i^{(j)}/j!|`.
    pub fn hat_norm(&self) -> Result<f64> {
        let hat = self.hat_coefficients()?;
        let mut best: f64 = 0.0;
        for row in &hat {
            for (j, c) in row.iter().enumerate() {
                best = best.max((c / factorial::<f64>(j)).abs());
            }
        }
        Ok(best)
    }

    /// `‖Λ‖_F = |Λ(F)| max_{d_i ≠ 0} (1 + 1/|Λ_i^{(d_i)}|)`.
    pub fn weighted_norm(&self) -> Result<f64> {
        let mut factor = f64::NEG_INFINITY;
        for (row, &d) in self.table.iter().zip(&self.degrees) {
            if d > 0 {
                factor = factor.max(1.0 + 1.0 / row[d].abs().to_f64());
            }
        }
        if factor.is_finite() {
            Ok(self.sup_norm().to_f64() * factor)
        } else {
            Err(Error::Domain("all degrees vanish; the form is not in 𝔞*_0".into()))
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> RepCoefficients<U> {
        RepCoefficients {
            table: self.table.iter().map(|r| r.iter().map(&f).collect()).collect(),
            degrees: self.degrees.clone(),
        }
    }
}

/// `Δ_{Λ,F}(x) = Σ_i |P_{Λ,Y_i}(x)|^2`, kept both expanded and as its summands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaPolynomial<T> {
    /// Monomial coefficients of `Δ`.
    pub coeffs: Vec<T>,
    /// Monomial coefficients of each `P_{Λ,Y_i}`.
    pub polys: Vec<Vec<T>>,
}

impl<T: Scalar> DeltaPolynomial<T> {
    /// Builds `Δ` from explicit summands.
    pub fn from_polynomials(polys: Vec<Vec<T>>) -> Self {
        let deg = polys.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0);
        let mut coeffs = vec![T::zero(); 2 * deg + 1];
        for p in &polys {
            for (a, pa) in p.iter().enumerate() {
                for (b, pb) in p.iter().enumerate() {
                    coeffs[a + b] = coeffs[a + b].clone() + pa.clone() * pb.clone();
                }
            }
        }
        Self { coeffs, polys }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn to_f64(&self) -> DeltaPolynomial<f64> {
        DeltaPolynomial {
            coeffs: self.coeffs.iter().map(|c| c.to_f64()).collect(),
            polys: self.polys.iter().map(|p| p.iter().map(|c| c.to_f64()).collect()).collect(),
        }
    }
}

impl DeltaPolynomial<f64> {
    /// Evaluates `Δ` as a sum of squares, which keeps it nonnegative in floating point.
    pub fn eval(&self, x: f64) -> f64 {
        self.polys
            .iter()
            .map(|p| {
                let v = p.iter().rev().fold(0.0, |acc, c| acc * x + c);
                v * v
            })
            .sum()
    }

    /// `Δ(w x)` as a new polynomial.
    pub fn rescaled(&self, w: f64) -> Self {
        let polys = self
            .polys
            .iter()
            .map(|p| p.iter().enumerate().map(|(j, c)| c * w.powi(j as i32)).collect())
            .collect();
        Self::from_polynomials(polys)
    }
}
