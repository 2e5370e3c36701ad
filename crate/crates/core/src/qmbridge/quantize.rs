use nalgebra::{Complex, DMatrix};
use num_bigint::BigInt;
use num_traits::FromPrimitive;

use crate::continuum::{dispersion_energy, spectrum, step_eigenphase, Stability};
use crate::exactmath::{GaussianInteger, GaussianMatrix};
use crate::scalar::{ExactInt, Real};

use super::{PhysicalProblem, QmBridgeError};

fn round_to_int<F: Real>(v: F) -> (BigInt, F) {
    let r = v.round();
    let int = BigInt::from_f64(r.to_f64_lossy()).expect("finite matrix entry");
    (int, r)
}

fn component_err<F: Real>(rounded: F, scaled: F, m: F) -> F {
    ((rounded - scaled) / m).abs()
}

/// `Ĥ = round(M·ĥ)` on the upper triangle, mirrored so `Ĥ` is exactly
/// self-adjoint. Returns `(Ĥ, raw_err, err)`: the largest per-component
/// `|round(M·h)/M − h|` with every entry rounded independently, and the same
/// measure for the mirrored `Ĥ`.
pub fn quantize_matrix<F: Real>(h: &DMatrix<Complex<F>>, scale_m: u64) -> (GaussianMatrix<BigInt>, F, F) {
    let n = h.nrows();
    let m = F::lit(scale_m as f64);
    let mut raw = F::zero();
    for z in h.iter() {
        for part in [z.re, z.im] {
            let scaled = m * part;
            raw = raw.max(component_err(round_to_int(scaled).1, scaled, m));
        }
    }
    let mut out = GaussianMatrix::zeros(n, n);
    let mut err = F::zero();
    for r in 0..n {
        for c in r..n {
            let (re, re_f) = round_to_int(m * h[(r, c)].re);
            let (im, im_f) = if r == c {
                (BigInt::from(0), F::zero())
            } else {
                round_to_int(m * h[(r, c)].im)
            };
            let upper = Complex::new(re_f, im_f);
            for (rr, cc, val) in [(r, c, upper), (c, r, upper.conj())] {
                let target = h[(rr, cc)];
                err = err
                    .max(component_err(val.re, m * target.re, m))
                    .max(component_err(val.im, m * target.im, m));
            }
            let g = GaussianInteger::new(re, im);
            out.set(c, r, g.conj());
            out.set(r, c, g);
        }
    }
    (out, raw, err)
}

/// Floating-point image of an integer matrix (lossy above 2⁵³, which only
/// matters for eigenvalue diagnostics).
pub(crate) fn to_complex<T: ExactInt, F: Real>(m: &GaussianMatrix<T>) -> DMatrix<Complex<F>> {
    let conv = |v: &T| F::lit(v.to_f64().unwrap_or(f64::NAN));
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| {
        let z = m.get(r, c);
        Complex::new(conv(&z.re), conv(&z.im))
    })
}

/// Band status of one eigenmode of an integer Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeBand<F: Real> {
    pub epsilon: F,
    pub stability: Stability,
    /// `max |λ|` of the step multipliers.
    pub growth: F,
    /// `arcsin(cε/2)`, the phase advance per step; `None` out of band.
    pub phase_per_step: Option<F>,
}

impl<F: Real> ModeBand<F> {
    pub fn in_band(&self) -> bool {
        self.stability != Stability::Unstable
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BandReport<F: Real> {
    pub lapse_c: i64,
    /// Sorted by ascending `ε`.
    pub modes: Vec<ModeBand<F>>,
}

impl<F: Real> BandReport<F> {
    pub fn in_band(&self) -> Vec<usize> {
        (0..self.modes.len()).filter(|&k| self.modes[k].in_band()).collect()
    }

    pub fn out_of_band(&self) -> Vec<usize> {
        (0..self.modes.len()).filter(|&k| !self.modes[k].in_band()).collect()
    }

    pub fn growth_rates(&self) -> Vec<F> {
        self.modes.iter().map(|m| m.growth).collect()
    }

    pub fn max_growth(&self) -> F {
        self.modes.iter().fold(F::one(), |a, m| a.max(m.growth))
    }

    pub fn any_out_of_band(&self) -> bool {
        self.modes.iter().any(|m| !m.in_band())
    }

    pub fn all_out_of_band(&self) -> bool {
        !self.modes.is_empty() && self.modes.iter().all(|m| !m.in_band())
    }

    pub fn spectral_radius(&self) -> F {
        self.modes.iter().fold(F::zero(), |a, m| a.max(m.epsilon.abs()))
    }
}

/// Classifies every eigenmode of `h_int` under the step recursion with lapse `c`.
pub fn band_report<T: ExactInt, F: Real>(
    h_int: &GaussianMatrix<T>,
    lapse_c: i64,
) -> Result<BandReport<F>, QmBridgeError> {
    if !h_int.is_square() || !h_int.is_self_adjoint() {
        return Err(QmBridgeError::NotSelfAdjoint);
    }
    let sp = spectrum(&to_complex::<T, F>(h_int), F::one())?;
    let half_c = F::lit(lapse_c as f64) * F::lit(0.5);
    let modes = sp
        .modes
        .iter()
        .map(|mode| {
            let ph = step_eigenphase(mode.epsilon, lapse_c);
            let phase_per_step = match ph.stability {
                Stability::Unstable => None,
                _ => dispersion_energy(half_c * mode.epsilon, F::one()),
            };
            ModeBand {
                epsilon: mode.epsilon,
                stability: ph.stability,
                growth: ph.growth(),
                phase_per_step,
            }
        })
        .collect();
    Ok(BandReport { lapse_c, modes })
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantizationReport<F: Real> {
    pub scale_m: u64,
    pub h_int: GaussianMatrix<BigInt>,
    /// Per-component rounding error before mirroring, `≤ 1/(2M)`.
    pub raw_elem_err: F,
    /// Per-component `max |Ĥ/M − ĥ|` of the mirrored matrix.
    pub elem_err: F,
    pub spectral_radius: F,
    /// Band diagnostics at lapse 2.
    pub band: BandReport<F>,
}

impl<F: Real> QuantizationReport<F> {
    pub fn in_band_modes(&self) -> Vec<usize> {
        self.band.in_band()
    }

    pub fn out_band_modes(&self) -> Vec<usize> {
        self.band.out_of_band()
    }

    pub fn growth_rates(&self) -> Vec<F> {
        self.band.growth_rates()
    }
}

pub fn quantize<F: Real>(problem: &PhysicalProblem<F>) -> Result<QuantizationReport<F>, QmBridgeError> {
    let (h_int, raw_elem_err, elem_err) = quantize_matrix(problem.h(), problem.scale_m());
    let band = band_report(&h_int, 2)?;
    Ok(QuantizationReport {
        scale_m: problem.scale_m(),
        spectral_radius: band.spectral_radius(),
        h_int,
        raw_elem_err,
        elem_err,
        band,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow<F: Real> {
    pub scale_m: u64,
    pub raw_elem_err: F,
    pub elem_err: F,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport<F: Real> {
    pub rows: Vec<ConvergenceRow<F>>,
    /// Least-squares slope of `log elem_err` against `log M` over the nonzero
    /// errors; `None` with fewer than two of them.
    pub slope: Option<F>,
    /// Every error is exactly zero: `ĥ` is representable at all listed scales.
    pub exactly_representable: bool,
}

/// Quantization error of `h` at each scale in `scales` (at least three,
/// strictly increasing) and the fitted power law.
pub fn convergence_study<F: Real>(
    h: &DMatrix<Complex<F>>,
    scales: &[u64],
) -> Result<ConvergenceReport<F>, QmBridgeError> {
    crate::continuum::check_hermitian(h)?;
    if scales.len() < 3 {
        return Err(QmBridgeError::invalid("m_values", "need at least 3 scales"));
    }
    if scales[0] == 0 || scales.windows(2).any(|w| w[1] <= w[0]) {
        return Err(QmBridgeError::invalid(
            "m_values",
            "scales must be positive and strictly increasing",
        ));
    }
    let rows: Vec<_> = scales
        .iter()
        .map(|&m| {
            let (_, raw_elem_err, elem_err) = quantize_matrix(h, m);
            ConvergenceRow {
                scale_m: m,
                raw_elem_err,
                elem_err,
            }
        })
        .collect();
    let points: Vec<(F, F)> = rows
        .iter()
        .filter(|r| r.elem_err > F::zero())
        .map(|r| (F::lit(r.scale_m as f64).ln(), r.elem_err.ln()))
        .collect();
    Ok(ConvergenceReport {
        exactly_representable: points.is_empty(),
        slope: fit_slope(&points),
        rows,
    })
}

fn fit_slope<F: Real>(points: &[(F, F)]) -> Option<F> {
    if points.len() < 2 {
        return None;
    }
    let n = F::lit(points.len() as f64);
    let mx = points.iter().fold(F::zero(), |a, p| a + p.0) / n;
    let my = points.iter().fold(F::zero(), |a, p| a + p.1) / n;
    let sxy = points.iter().fold(F::zero(), |a, p| a + (p.0 - mx) * (p.1 - my));
    let sxx = points.iter().fold(F::zero(), |a, p| a + (p.0 - mx) * (p.0 - mx));
    (sxx > F::zero()).then(|| sxy / sxx)
}

/// Phase lag per step of a mode with eigenvalue `ε` relative to exact
/// evolution: `arcsin(ε) − ε`, about `ε³/6` for small `ε`.
pub fn phase_error_per_step<F: Real>(epsilon: F) -> Option<F> {
    dispersion_energy(epsilon, F::one()).map(|e| e - epsilon)
}
