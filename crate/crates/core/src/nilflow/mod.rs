//! Nilflows on quasi-Abelian nilmanifolds, their return maps, Weyl polynomials and sums.

pub mod birkhoff;
pub mod flow;
pub mod weyl_poly;
pub mod weyl_sum;

pub use birkhoff::{
    birkhoff_average, orbit_integral, reduction_identity, Bump, EmbeddedFunction, OrbitQuadrature, ReductionCheck,
    SumRange,
};
pub use flow::{build_x_alpha, return_map_exact, FrequencyVector, Nilflow};
pub use weyl_poly::{coefficient_map, weyl_polynomial_mod1, weyl_polynomial_value, WeylPolynomial};
pub use weyl_sum::{weyl_sum, CompensatedSum, WeylSum, WeylSumConfig};
