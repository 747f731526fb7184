//! Exact-arithmetic engine for monodromic filtered modules: graded models,
//! localization and gluing, Fourier transform, rescaling oracles, and the
//! induced filtrations at infinity.

pub mod corpus;
pub mod eigen;
pub mod filtops;
pub mod fourier;
pub mod gluing;
pub mod infinity;
pub mod matrix;
pub mod monomod;
pub mod rational;
pub mod rescale;
pub mod subspace;

pub use eigen::{char_poly, generalized_eigenspaces, rational_roots, EigenError};
pub use matrix::Matrix;
pub use monomod::{
    direct_sum, ExponentKey, Filtration, GradedPiece, MonodromicModule, RealizedPiece,
    ValidationIssue,
};
pub use rational::Rational;
pub use subspace::{QuotientSpace, Subspace};
