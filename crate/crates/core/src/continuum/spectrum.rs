use nalgebra::{Complex, ComplexField, DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::scalar::Real;

use super::{check_hermitian, ContinuumError, BAND_TOL};

/// One eigenmode of the integer Hamiltonian viewed in floating point.
#[derive(Clone, Debug, PartialEq)]
pub struct Mode<F: Real> {
    pub epsilon: F,
    /// `arcsin(ε)/l`, or `None` when `|ε| > 1`.
    pub energy: Option<F>,
    pub eigvec: DVector<Complex<F>>,
}

impl<F: Real> Mode<F> {
    pub fn in_band(&self) -> bool {
        self.energy.is_some()
    }
}

/// Eigenmodes sorted by ascending `ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<F: Real> {
    pub scale_l: F,
    pub modes: Vec<Mode<F>>,
}

impl<F: Real> Spectrum<F> {
    pub fn spectral_radius(&self) -> F {
        self.modes
            .iter()
            .map(|m| m.epsilon.abs())
            .fold(F::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn in_band(&self) -> Vec<usize> {
        (0..self.modes.len()).filter(|&k| self.modes[k].in_band()).collect()
    }

    pub fn out_of_band(&self) -> Vec<usize> {
        (0..self.modes.len()).filter(|&k| !self.modes[k].in_band()).collect()
    }

    pub fn eigenvalues(&self) -> Vec<F> {
        self.modes.iter().map(|m| m.epsilon).collect()
    }
}

/// `E = arcsin(ε)/l` on the principal branch; `None` beyond the band edge.
/// Values within `BAND_TOL` of ±1 are clamped onto the edge.
pub fn dispersion_energy<F: Real>(epsilon: F, scale_l: F) -> Option<F> {
    let one = F::one();
    let a = epsilon.abs();
    if a > one + F::lit(BAND_TOL) {
        return None;
    }
    let clamped = if a > one { one.copysign(epsilon) } else { epsilon };
    Some(clamped.asin() / scale_l)
}

/// Leading terms `ε(1 + ε²/6)/l` of the modified dispersion relation.
pub fn dispersion_series<F: Real>(epsilon: F, scale_l: F) -> F {
    epsilon * (F::one() + epsilon * epsilon / F::lit(6.0)) / scale_l
}

/// Diagonalises a Hermitian matrix and attaches modified-dispersion energies.
pub fn spectrum<F: Real>(h: &DMatrix<Complex<F>>, scale_l: F) -> Result<Spectrum<F>, ContinuumError> {
    check_hermitian(h)?;
    let sym = (h + h.adjoint()).map(|z| z * F::lit(0.5));
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let modes = order
        .into_iter()
        .map(|k| {
            let epsilon = eig.eigenvalues[k];
            Mode {
                epsilon,
                energy: dispersion_energy(epsilon, scale_l),
                eigvec: eig.eigenvectors.column(k).into_owned(),
            }
        })
        .collect();
    Ok(Spectrum { scale_l, modes })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Marginal,
    Unstable,
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::Marginal => "marginal",
            Stability::Unstable => "unstable",
        })
    }
}

/// Step multipliers `λ` of the scalar recursion `ψ_{n+1} = ψ_{n−1} − icεψ_n`,
/// i.e. the roots of `λ² + icελ − 1 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepEigenphase<F: Real> {
    pub epsilon: F,
    pub lapse_c: i64,
    /// `roots[0]` is the branch that tends to `+1` as `cε → 0` (the physical
    /// mode); `roots[1]` is the parasitic one.
    pub roots: [Complex<F>; 2],
    pub stability: Stability,
}

impl<F: Real> StepEigenphase<F> {
    /// `max |λ|`.
    pub fn growth(&self) -> F {
        let a = self.roots[0].modulus();
        let b = self.roots[1].modulus();
        if a > b {
            a
        } else {
            b
        }
    }
}

pub fn step_eigenphase<F: Real>(epsilon: F, lapse_c: i64) -> StepEigenphase<F> {
    let two = F::lit(2.0);
    let half = F::lit(0.5);
    let b = F::lit(lapse_c as f64) * epsilon;
    let gap = b.abs() - two;
    let zero = F::zero();
    let (roots, stability) = if gap.abs() <= F::lit(2.0 * BAND_TOL) {
        let r = Complex::new(zero, -F::one().copysign(b));
        ([r, r], Stability::Marginal)
    } else if gap < zero {
        let s = (F::lit(4.0) - b * b).sqrt();
        (
            [Complex::new(s * half, -b * half), Complex::new(-s * half, -b * half)],
            Stability::Stable,
        )
    } else {
        let r = (b * b - F::lit(4.0)).sqrt();
        (
            [Complex::new(zero, (r - b) * half), Complex::new(zero, -(r + b) * half)],
            Stability::Unstable,
        )
    };
    StepEigenphase {
        epsilon,
        lapse_c,
        roots,
        stability,
    }
}

/// For each marginal mode of `h` (double root), the relative size of the
/// secular `n·λ^n` component excited by the seed pair `(ψ₀, ψ₁)`.
///
/// Only seeds aligned with `λ` (weight ≈ 0) give a bounded, reconstructible
/// orbit; the others grow linearly in `n`.
pub fn marginal_secular_weights<F: Real>(
    h: &DMatrix<Complex<F>>,
    lapse_c: i64,
    psi0: &DVector<Complex<F>>,
    psi1: &DVector<Complex<F>>,
) -> Result<Vec<(usize, F)>, ContinuumError> {
    let spec = spectrum(h, F::one())?;
    let mut out = Vec::new();
    for (k, mode) in spec.modes.iter().enumerate() {
        let ph = step_eigenphase(mode.epsilon, lapse_c);
        if ph.stability != Stability::Marginal {
            continue;
        }
        let u0 = mode.eigvec.dotc(psi0);
        let u1 = mode.eigvec.dotc(psi1);
        let secular = u1 / ph.roots[0] - u0;
        let scale = u0.modulus() + u1.modulus();
        let w = if scale > F::zero() {
            secular.modulus() / scale
        } else {
            F::zero()
        };
        out.push((k, w));
    }
    Ok(out)
}
