use nalgebra::{Complex, ComplexField, DVector};

use crate::automaton::Trajectory;
use crate::scalar::{ExactInt, Real};

use super::{ContinuumError, Spectrum};

/// Samples kept clear of each window edge for shifted evaluations.
pub const DEFAULT_GUARD: usize = 10;

/// A vector-valued function of continuous time with time scale `l`.
pub trait Wave<F: Real> {
    fn scale(&self) -> F;
    fn dim(&self) -> usize;
    fn eval(&self, t: F) -> DVector<Complex<F>>;

    /// Whether `t` may be used for evaluations that also touch `t ± l`.
    fn check_time(&self, _t: F) -> Result<(), ContinuumError> {
        Ok(())
    }
}

/// Complex samples `ψ(t_n)` on the window `n_min ..= n_max`, `t_n = n·l`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledWave<F: Real> {
    scale_l: F,
    n_min: i64,
    samples: Vec<DVector<Complex<F>>>,
    guard: usize,
}

impl<F: Real> SampledWave<F> {
    pub fn new(scale_l: F, n_min: i64, samples: Vec<DVector<Complex<F>>>) -> Result<Self, ContinuumError> {
        if scale_l <= F::zero() || !scale_l.is_finite() {
            return Err(ContinuumError::BadScale(scale_l.to_f64_lossy()));
        }
        let dim = samples.first().ok_or(ContinuumError::EmptyWindow)?.len();
        for (index, s) in samples.iter().enumerate() {
            if s.len() != dim {
                return Err(ContinuumError::RaggedSamples {
                    index,
                    expected: dim,
                    found: s.len(),
                });
            }
        }
        Ok(Self {
            scale_l,
            n_min,
            samples,
            guard: DEFAULT_GUARD,
        })
    }

    /// Samples an arbitrary function on `n_min ..= n_max`.
    pub fn from_fn(
        scale_l: F,
        n_min: i64,
        n_max: i64,
        f: impl Fn(F) -> DVector<Complex<F>>,
    ) -> Result<Self, ContinuumError> {
        let samples = (n_min..=n_max).map(|n| f(F::lit(n as f64) * scale_l)).collect();
        Self::new(scale_l, n_min, samples)
    }

    /// `ψ_n = x_n + i p_n` from an automaton run. The run must use lapse 2
    /// and every integer must convert to `f64` exactly.
    pub fn from_trajectory<T: ExactInt>(traj: &Trajectory<T>, scale_l: F) -> Result<Self, ContinuumError> {
        let c = traj.spec().lapse();
        if *c != T::from_i64(2) {
            return Err(ContinuumError::LapseNotTwo(c.to_string()));
        }
        let first = traj.slices().first().ok_or(ContinuumError::EmptyWindow)?;
        let conv = |n: i64, v: &T| {
            v.to_f64_exact().map(F::lit).ok_or(ContinuumError::PrecisionLoss {
                n,
                bits: v.magnitude_bits(),
            })
        };
        let mut samples = Vec::with_capacity(traj.len());
        for s in traj.slices() {
            let mut v = DVector::zeros(s.dim());
            for (k, (x, p)) in s.x.iter().zip(&s.p).enumerate() {
                v[k] = Complex::new(conv(s.n, x)?, conv(s.n, p)?);
            }
            samples.push(v);
        }
        Self::new(scale_l, first.n, samples)
    }

    pub fn with_guard(mut self, guard: usize) -> Self {
        self.guard = guard.max(1);
        self
    }

    pub fn guard(&self) -> usize {
        self.guard
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.samples.len() as i64 - 1
    }

    pub fn samples(&self) -> &[DVector<Complex<F>>] {
        &self.samples
    }

    pub fn sample(&self, n: i64) -> Option<&DVector<Complex<F>>> {
        usize::try_from(n - self.n_min).ok().and_then(|k| self.samples.get(k))
    }

    /// Truncated sampling series `Σ_n ψ(t_n) sin[ω(t−t_n)]/[ω(t−t_n)]` over
    /// the window, `ω = π/l`.
    ///
    /// The kernel is evaluated as `(−1)^{k−n} sin(πf) / (π(s−n))` with
    /// `s = t/l = k + f`, so a single sine is needed and grid points
    /// (`f = 0`) return their sample verbatim.
    pub fn reconstruct(&self, t: F) -> DVector<Complex<F>> {
        let s = t / self.scale_l;
        let k = s.round();
        let frac = s - k;
        let dim = self.samples[0].len();
        let k_int = k.to_f64_lossy() as i64;
        // `n·l / l` can miss `n` by a few ulps; that is still the grid point
        let snap = F::default_epsilon() * F::lit(4.0) * k.abs().max(F::one());
        if frac.abs() <= snap {
            return self.sample(k_int).cloned().unwrap_or_else(|| DVector::zeros(dim));
        }
        let pi = F::pi();
        let sin_pf = (pi * frac).sin();
        let mut out = DVector::<Complex<F>>::zeros(dim);
        for (j, v) in self.samples.iter().enumerate() {
            let n = self.n_min + j as i64;
            let offset = k_int - n;
            let u = F::lit(offset as f64) + frac;
            let mut w = sin_pf / (pi * u);
            if offset.rem_euclid(2) == 1 {
                w = -w;
            }
            out.axpy(Complex::new(w, F::zero()), v, Complex::new(F::one(), F::zero()));
        }
        out
    }
}

impl<F: Real> Wave<F> for SampledWave<F> {
    fn scale(&self) -> F {
        self.scale_l
    }

    fn dim(&self) -> usize {
        self.samples[0].len()
    }

    fn eval(&self, t: F) -> DVector<Complex<F>> {
        self.reconstruct(t)
    }

    fn check_time(&self, t: F) -> Result<(), ContinuumError> {
        let s = t / self.scale_l;
        let lo = F::lit((self.n_min + self.guard as i64) as f64);
        let hi = F::lit((self.n_max() - self.guard as i64) as f64);
        if !(s >= lo && s <= hi) {
            return Err(ContinuumError::GuardBand {
                position: s.to_f64_lossy(),
                lo: lo.to_f64_lossy(),
                hi: hi.to_f64_lossy(),
            });
        }
        Ok(())
    }
}

/// Analytic superposition `ψ(t) = Σ_k e^{−iE_k t} v_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSum<F: Real> {
    scale_l: F,
    dim: usize,
    modes: Vec<(F, DVector<Complex<F>>)>,
}

impl<F: Real> ModeSum<F> {
    pub fn new(scale_l: F, dim: usize) -> Self {
        Self {
            scale_l,
            dim,
            modes: Vec::new(),
        }
    }

    pub fn with_mode(mut self, energy: F, amplitude: DVector<Complex<F>>) -> Self {
        assert_eq!(amplitude.len(), self.dim, "mode amplitude dimension");
        self.modes.push((energy, amplitude));
        self
    }

    /// Stationary states of the modified equation: mode `k` of `spectrum`
    /// weighted by `coeffs[k]`. Out-of-band modes must carry zero weight.
    pub fn from_spectrum(spectrum: &Spectrum<F>, coeffs: &[Complex<F>]) -> Result<Self, ContinuumError> {
        let dim = spectrum.modes.first().map_or(0, |m| m.eigvec.len());
        let mut out = Self::new(spectrum.scale_l, dim);
        for (k, (mode, c)) in spectrum.modes.iter().zip(coeffs).enumerate() {
            if *c == Complex::new(F::zero(), F::zero()) {
                continue;
            }
            let e = mode.energy.ok_or(ContinuumError::OutOfBand(k))?;
            out = out.with_mode(e, mode.eigvec.map(|z| z * *c));
        }
        Ok(out)
    }

    pub fn modes(&self) -> &[(F, DVector<Complex<F>>)] {
        &self.modes
    }
}

impl<F: Real> Wave<F> for ModeSum<F> {
    fn scale(&self) -> F {
        self.scale_l
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: F) -> DVector<Complex<F>> {
        let mut out = DVector::<Complex<F>>::zeros(self.dim);
        for (e, v) in &self.modes {
            let phase = Complex::new(F::zero(), -(*e * t)).exp();
            out.axpy(phase, v, Complex::new(F::one(), F::zero()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{AutomatonSpec, Slice, StatePair};
    use crate::exactmath::{HamiltonianParts, IntMatrix};
    use num_bigint::BigInt;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn scalar_wave(n_min: i64, vals: Vec<Complex<f64>>) -> SampledWave<f64> {
        SampledWave::new(
            1.0,
            n_min,
            vals.into_iter().map(|z| DVector::from_element(1, z)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn grid_points_are_exact() {
        let vals: Vec<_> = (0..21).map(|k| c((k as f64).sin(), 1.0 / (k as f64 + 1.0))).collect();
        let w = scalar_wave(-10, vals.clone());
        for (j, v) in vals.iter().enumerate() {
            assert_eq!(w.reconstruct(j as f64 - 10.0)[0], *v);
        }
        // off-window grid point
        assert_eq!(w.reconstruct(40.0)[0], c(0.0, 0.0));
    }

    #[test]
    fn single_sample_half_step() {
        let mut vals = vec![c(0.0, 0.0); 11];
        vals[5] = c(1.0, 0.0);
        let w = scalar_wave(-5, vals);
        let v = w.reconstruct(0.5)[0];
        assert!((v.re - 2.0 / std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn scale_is_respected() {
        let mut vals = vec![c(0.0, 0.0); 11];
        vals[5] = c(1.0, 0.0);
        let w = SampledWave::new(
            0.25,
            -5,
            vals.into_iter().map(|z| DVector::from_element(1, z)).collect(),
        )
        .unwrap();
        let v = w.reconstruct(0.125)[0];
        assert!((v.re - 2.0 / std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn grid_points_snap_at_inexact_scale() {
        let vals: Vec<_> = (0..41).map(|k| c((k as f64 * 0.9).cos(), (k as f64).sqrt())).collect();
        let w = SampledWave::new(0.7, -20, vals.iter().map(|z| DVector::from_element(1, *z)).collect()).unwrap();
        for (j, v) in vals.iter().enumerate() {
            assert_eq!(w.reconstruct((j as f64 - 20.0) * 0.7)[0], *v);
        }
        assert_ne!(w.reconstruct(0.7 * 1e-6)[0], vals[20]);
    }

    #[test]
    fn all_ones_truncation() {
        let w = scalar_wave(-200, vec![c(1.0, 0.0); 401]);
        let v = w.reconstruct(0.37)[0];
        assert!((v.re - 1.0).abs() < 5e-3, "{v}");
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            SampledWave::<f64>::new(1.0, 0, vec![]).unwrap_err(),
            ContinuumError::EmptyWindow
        );
        assert!(matches!(
            SampledWave::new(0.0, 0, vec![DVector::from_element(1, c(1.0, 0.0))]),
            Err(ContinuumError::BadScale(_))
        ));
        let ragged = vec![
            DVector::from_element(1, c(1.0, 0.0)),
            DVector::from_element(2, c(1.0, 0.0)),
        ];
        assert!(matches!(
            SampledWave::new(1.0, 0, ragged),
            Err(ContinuumError::RaggedSamples { index: 1, .. })
        ));
    }

    #[test]
    fn guard_band() {
        let w = scalar_wave(0, vec![c(1.0, 0.0); 41]);
        assert!(w.check_time(10.0).is_ok());
        assert!(w.check_time(30.0).is_ok());
        assert!(w.check_time(9.5).is_err());
        assert!(w.check_time(30.5).is_err());
    }

    #[test]
    fn trajectory_conversion_requires_lapse_two() {
        let parts = HamiltonianParts::new(
            IntMatrix::<i64>::from_i64_rows(&[vec![1]]).unwrap(),
            IntMatrix::zeros(1, 1),
        )
        .unwrap();
        let init = StatePair::new(
            Slice::from_ints(0, &[1], &[0], 0, 0),
            Slice::from_ints(1, &[0], &[-1], 1, 0),
        )
        .unwrap();
        let traj = AutomatonSpec::new(parts.clone(), 1i64).evolve(&init, 3).unwrap();
        assert!(matches!(
            SampledWave::<f64>::from_trajectory(&traj, 1.0),
            Err(ContinuumError::LapseNotTwo(_))
        ));
        let traj = AutomatonSpec::new(parts.clone(), 2i64).evolve(&init, 3).unwrap();
        let w = SampledWave::<f64>::from_trajectory(&traj, 1.0).unwrap();
        assert_eq!(w.sample(1).unwrap()[0], c(0.0, -1.0));

        let big = StatePair::new(
            Slice::<BigInt>::from_ints(0, &[1 << 54], &[0], 0, 0),
            Slice::from_ints(1, &[0], &[0], 1, 0),
        )
        .unwrap();
        let parts = HamiltonianParts::new(
            IntMatrix::<BigInt>::from_i64_rows(&[vec![1]]).unwrap(),
            IntMatrix::zeros(1, 1),
        )
        .unwrap();
        let traj = AutomatonSpec::new(parts, BigInt::from(2)).evolve(&big, 0).unwrap();
        assert!(matches!(
            SampledWave::<f64>::from_trajectory(&traj, 1.0),
            Err(ContinuumError::PrecisionLoss { n: 0, .. })
        ));
    }

    #[test]
    fn single_precision_reconstruction() {
        let vals: Vec<DVector<Complex<f32>>> = (0..101)
            .map(|_| DVector::from_element(1, Complex::new(1.0f32, 0.0)))
            .collect();
        let w = SampledWave::new(1.0f32, -50, vals).unwrap();
        assert_eq!(w.reconstruct(3.0)[0], Complex::new(1.0, 0.0));
        assert!((w.reconstruct(0.5)[0].re - 1.0).abs() < 1e-3);
    }
}
