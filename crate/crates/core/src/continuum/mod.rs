//! Sinc reconstruction of automaton trajectories and the continuum laws the
//! reconstructed waves obey.
//!
//! Samples sit at `t_n = n·l` with bandwidth `ω_max = π/l`. The shifted
//! difference `½[ψ(t+l) − ψ(t−l)]` is always evaluated through the
//! reconstruction (or the analytic mode sum), never by finite-difference
//! stencils in `t`.

mod laws;
mod spectrum;
mod wave;

use nalgebra::{Complex, ComplexField, DMatrix};
use thiserror::Error;

use crate::scalar::Real;

pub use laws::{continuum_conservation_residual, sinh_residual, two_time};
pub use spectrum::{
    dispersion_energy, dispersion_series, marginal_secular_weights, spectrum, step_eigenphase, Mode, Spectrum,
    Stability, StepEigenphase,
};
pub use wave::{ModeSum, SampledWave, Wave, DEFAULT_GUARD};

/// Hermiticity tolerance on input matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// `|ε| ≤ 1 + BAND_TOL` counts as in band (clamped to ±1).
pub const BAND_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContinuumError {
    #[error("sample window is empty")]
    EmptyWindow,
    #[error("sample {index} has dimension {found}, expected {expected}")]
    RaggedSamples {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("scale l must be positive and finite, got {0}")]
    BadScale(f64),
    #[error("t/l = {position} is outside the guarded window [{lo}, {hi}]")]
    GuardBand { position: f64, lo: f64, hi: f64 },
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("dimension mismatch: matrix {matrix}, wave {wave}")]
    DimensionMismatch { matrix: usize, wave: usize },
    #[error("continuum bridge requires lapse c = 2, got {0}")]
    LapseNotTwo(String),
    #[error("integer at slice {n} has {bits} bits; conversion to f64 would lose precision")]
    PrecisionLoss { n: i64, bits: u64 },
    #[error("mode {0} is out of band and cannot be part of a bandlimited wave")]
    OutOfBand(usize),
}

/// Largest `|h_ij − conj(h_ji)|`.
pub fn hermitian_defect<F: Real>(h: &DMatrix<Complex<F>>) -> F {
    let mut worst = F::zero();
    for r in 0..h.nrows() {
        for c in 0..h.ncols() {
            let d = (h[(r, c)] - h[(c, r)].conj()).modulus();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Errors unless `h` is square and Hermitian within [`HERMITIAN_TOL`].
pub fn check_hermitian<F: Real>(h: &DMatrix<Complex<F>>) -> Result<(), ContinuumError> {
    if !h.is_square() {
        return Err(ContinuumError::NotHermitian(f64::INFINITY));
    }
    let d = hermitian_defect(h);
    if d > F::lit(HERMITIAN_TOL) {
        return Err(ContinuumError::NotHermitian(d.to_f64_lossy()));
    }
    Ok(())
}
