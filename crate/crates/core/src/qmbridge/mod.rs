//! Mapping a floating-point Hermitian Hamiltonian onto a Gaussian-integer
//! automaton and measuring how far the automaton strays from exact quantum
//! evolution.
//!
//! Units: the automaton runs with `l = 1` and lapse 2, so slice `n` sits at
//! automaton time `t = n`. The matching dimensionless quantum time is
//! `t′ = M·t`, since `Ĥ = round(M·ĥ)`.

mod compare;
mod quantize;

pub(crate) use quantize::to_complex;

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::automaton::AutomatonError;
use crate::continuum::{check_hermitian, ContinuumError};
use crate::scalar::Real;

pub use compare::{
    qm_evolve, seed_automaton, simulate_vs_exact, simulate_vs_exact_with, CompareOptions, ComparisonReport,
    DeviationRow, DEFAULT_PAD,
};
pub use quantize::{
    band_report, convergence_study, phase_error_per_step, quantize, quantize_matrix, BandReport, ConvergenceReport,
    ConvergenceRow, ModeBand, QuantizationReport,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QmBridgeError {
    #[error(transparent)]
    Continuum(#[from] ContinuumError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("invalid field {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("integer Hamiltonian is not self-adjoint")]
    NotSelfAdjoint,
    #[error("every mode is out of band (spectral radius {spectral_radius}); nothing to simulate")]
    AllOutOfBand { spectral_radius: f64 },
    #[error("amplitude scale Q = {q} rounds the seed to the zero vector")]
    SeedVanishes { q: u64 },
}

impl QmBridgeError {
    fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Self::Invalid {
            field,
            reason: reason.into(),
        }
    }
}

/// A dimensionless Hermitian `ĥ` with its energy and time scales.
///
/// `eps_phys` and `M′` only fix the physical bandwidth `ε_phys·M′/M`; the
/// comparison itself is dimensionless.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalProblem<F: Real> {
    h: DMatrix<Complex<F>>,
    eps_phys: F,
    scale_m: u64,
    time_scale_mprime: u64,
}

impl<F: Real> PhysicalProblem<F> {
    pub fn new(
        h: DMatrix<Complex<F>>,
        eps_phys: F,
        scale_m: u64,
        time_scale_mprime: u64,
    ) -> Result<Self, QmBridgeError> {
        check_hermitian(&h)?;
        if eps_phys <= F::zero() || !eps_phys.is_finite() {
            return Err(QmBridgeError::invalid(
                "eps_phys",
                format!("must be positive, got {eps_phys}"),
            ));
        }
        if scale_m < 1 {
            return Err(QmBridgeError::invalid("scale_m", "must be at least 1"));
        }
        if time_scale_mprime <= scale_m {
            return Err(QmBridgeError::invalid(
                "time_scale_mprime",
                format!("must exceed scale_m = {scale_m}, got {time_scale_mprime}"),
            ));
        }
        Ok(Self {
            h,
            eps_phys,
            scale_m,
            time_scale_mprime,
        })
    }

    pub fn h(&self) -> &DMatrix<Complex<F>> {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    pub fn eps_phys(&self) -> F {
        self.eps_phys
    }

    pub fn scale_m(&self) -> u64 {
        self.scale_m
    }

    pub fn time_scale_mprime(&self) -> u64 {
        self.time_scale_mprime
    }

    /// `ℏω_max/π = ε_phys·M′/M` in the units of `eps_phys`.
    pub fn physical_bandwidth(&self) -> F {
        self.eps_phys * F::lit(self.time_scale_mprime as f64) / F::lit(self.scale_m as f64)
    }

    /// Same `ĥ` at a different quantization scale.
    pub fn with_scale(&self, scale_m: u64) -> Result<Self, QmBridgeError> {
        let mprime = self.time_scale_mprime.max(scale_m.saturating_add(1));
        Self::new(self.h.clone(), self.eps_phys, scale_m, mprime)
    }
}

/// Random Hermitian matrix with entries uniform in `[−1, 1]` (diagonal real),
/// reproducible from `seed`.
pub fn random_hermitian(n: usize, seed: u64) -> DMatrix<Complex<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = DMatrix::zeros(n, n);
    for r in 0..n {
        h[(r, r)] = Complex::new(rng.gen_range(-1.0..=1.0), 0.0);
        for c in r + 1..n {
            let z = Complex::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            h[(r, c)] = z;
            h[(c, r)] = z.conj();
        }
    }
    h
}
