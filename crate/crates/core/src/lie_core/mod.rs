//! Quasi-Abelian nilpotent Lie algebras and groups, their lattices and bases.

pub mod basis;
pub mod distance;
pub mod group;
pub mod matrix_model;
pub mod shape;

pub use basis::{ad_matrix, jordan_from_lattice_basis, AdaptedBasis, BasisKind, JordanData};
pub use distance::{coordinate_distance, injectivity_radius, DistanceConfig, IdealFrame, InjectivityRadius};
pub use group::{AlgebraElement, GroupElement, LatticePoint};
pub use shape::AlgebraShape;
