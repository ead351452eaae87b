//! Numerical toolkit for quasi-Abelian nilflows.
//!
//! The core types are generic over the scalar: `f64`, `f32` and exact
//! rationals ([`Rational`]) all implement [`Scalar`]. Type aliases for the
//! common instantiations are provided at the crate root.

pub mod diophantine;
pub mod error;
pub mod lie_core;
pub mod linalg;
pub mod modmath;
pub mod nilflow;
pub mod quad;
pub mod renorm;
pub mod rep_theory;
pub mod scalar;
pub mod stats;
pub mod width;

pub use error::{Error, Result};
pub use scalar::{q, Rational, Scalar};

pub type AlgebraElementF64 = lie_core::AlgebraElement<f64>;
pub type AlgebraElementQ = lie_core::AlgebraElement<Rational>;
pub type GroupElementF64 = lie_core::GroupElement<f64>;
pub type GroupElementF32 = lie_core::GroupElement<f32>;
pub type GroupElementQ = lie_core::GroupElement<Rational>;
pub type AdaptedBasisF64 = lie_core::AdaptedBasis<f64>;
pub type AdaptedBasisQ = lie_core::AdaptedBasis<Rational>;
pub type FrequencyVectorF64 = nilflow::FrequencyVector<f64>;
pub type FrequencyVectorQ = nilflow::FrequencyVector<Rational>;
pub type MatrixF64 = linalg::Matrix<f64>;
pub type MatrixQ = linalg::Matrix<Rational>;
