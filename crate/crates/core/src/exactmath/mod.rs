//! Exact Gaussian-integer scalars and dense matrices.

mod gaussian;
mod hamiltonian;
mod matrix;

use thiserror::Error;

pub use gaussian::GaussianInteger;
pub use hamiltonian::{build_hamiltonian, commutes, HamiltonianParts};
pub use matrix::{matvec, GaussianMatrix, IntMatrix, Matrix, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactMathError {
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is empty")]
    Empty,
    #[error("row {row} has {len} entries, expected {expected}")]
    RaggedRow { row: usize, len: usize, expected: usize },
    #[error("not symmetric at ({row},{col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("not antisymmetric at ({row},{col})")]
    NotAntisymmetric { row: usize, col: usize },
}
