//! Irreducible representations `π^X_Λ` in the model `L^2(ℝ)` and the analysis built on them.

pub mod forms;
pub mod integrals;
pub mod reduction;

pub use forms::{rep_coefficients, DeltaPolynomial, LinearForm, RepCoefficients};
pub use integrals::{
    green_apply, green_bound_check, integral_i, integral_j, invariant_distribution_norm, transverse_sobolev_norm,
    GreenBoundCheck, GreenConfig, GreenFunction,
};
pub use reduction::{filiform_reduction, FiliformReduction, ReductionCertificate};
