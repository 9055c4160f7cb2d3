//! Maximum likelihood thresholds of small graphs, the graphical lasso, and
//! a Monte Carlo study of how often the lasso-selected graph can be fitted
//! by maximum likelihood from the samples that selected it.
//!
//! Matrix code is generic over [`numerics::Scalar`] (floats and the prime
//! field) and [`numerics::Real`] (`f32`, `f64`); the aliases below fix the
//! double-precision types used by the experiment pipeline.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod experiments;
pub mod glasso;
pub mod graphs;
pub mod numerics;
pub mod plot;
pub mod rigidity;

pub use graphs::Graph;

/// Double-precision dense matrix.
pub type Matrix = numerics::DenseMatrix<f64>;
/// Single-precision dense matrix.
pub type Matrix32 = numerics::DenseMatrix<f32>;
/// Double-precision positive definite matrix.
pub type Spd = numerics::SpdMatrix<f64>;
/// Double-precision graphical lasso solution.
pub type GlassoSolution = glasso::GlassoSolution<f64>;
/// Rigidity matrix over the prime field.
pub type FieldRigidityMatrix = rigidity::RigidityMatrix<numerics::Fp>;
