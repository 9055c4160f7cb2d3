//! Numerical substrate: dense matrices over any [`Scalar`], Cholesky-based
//! routines for positive definite matrices, exact rank over a prime field,
//! and seeded sampling.

mod field;
mod linalg;
mod matrix;
mod random;

use thiserror::Error;

pub use field::{field_rank, Fp, PrimeFieldMatrix, MODULUS};
pub use linalg::{cholesky, log_det, spd_inverse, SpdMatrix};
pub use matrix::{DenseMatrix, Real, Scalar};
pub use random::{
    derive_seed, mix64, sample_standard_normal, sample_uniform_field, SeededRng, RNG_ALGORITHM,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("matrix has a non-finite entry")]
    NonFinite,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
}
