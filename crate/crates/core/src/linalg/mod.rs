//! Dense complex linear algebra primitives.
//!
//! Everything in this crate runs on small dense matrices (dimension below
//! ~100), so the implementations favor robustness over asymptotic speed:
//! the eigensolver is a cyclic Jacobi iteration on the Hermitian matrix,
//! and all products are straightforward triple loops.

mod dims;
mod eig;
mod matrix;
mod ops;

pub use dims::{Part, Party, SystemDims};
pub use eig::{hermitian_eig, HermitianEig};
pub use matrix::ComplexMatrix;
pub use ops::{partial_trace, permute_systems, purify, support_projector, support_rank};

use thiserror::Error;

/// Errors raised by linear-algebra primitives.
#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix entries must be finite (found NaN or Inf at ({row}, {col}))")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("matrix is not square ({rows} x {cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("subsystem dimensions are invalid: {0}")]
    BadDims(String),
}
