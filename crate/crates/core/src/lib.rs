//! Factoring orthogonal matrices into few Householder reflectors, and
//! recovering a single-reflector dictionary from binary-coefficient data.
//!
//! The building block is the reflector `H = I - 2uuᵀ` for a unit vector `u`.
//! [`HouseholderProduct`] stores `H₁H₂…Hₘ` as its directions and applies it
//! in `O(mn)` without ever forming the dense matrix.
//!
//! * [`decompose`] finds a product of few reflectors approximating a dense
//!   orthogonal matrix by repeatedly peeling off the reflector closest to the
//!   current remainder (a minimum eigenvector of its symmetric part).
//! * [`dictlearn`] recovers `u` and a binary `X` from `Y = (I - 2uuᵀ)X`.
//! * [`generate`] draws seeded random instances for experiments.

pub mod decompose;
pub mod dictlearn;
pub mod eigen;
mod error;
pub mod generate;
pub mod orthogonal;
pub mod reflector;
pub mod svd;

pub use nalgebra::{DMatrix, DVector};

pub use decompose::{
    error_bound, greedy_decompose, min_factors, nearest_reflector, qr_baseline,
    symmetric_decompose, DecompositionTrace, IterationRecord, Projection, QrBaseline, Termination,
};
pub use dictlearn::{
    enumerate_candidates, non_uniqueness_example, recover, solve_column, Candidate, CandidateSet,
    ColumnSolution, DataMatrix, NonUniqueExample, RecoveryResult,
};
pub use eigen::{symmetric_eigendecomposition, SymmetricSpectrum};
pub use error::{Error, Result};
pub use generate::{Distribution, GeneratorSpec, Instance};
pub use orthogonal::{eigenspace_one_dimension, symmetric_part, DenseOrthogonal};
pub use reflector::{make_reflector, HouseholderProduct, Reflector};
