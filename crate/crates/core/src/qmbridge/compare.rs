use nalgebra::{Complex, DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::FromPrimitive;

use crate::automaton::{AutomatonSpec, Slice, StatePair, Trajectory, DEFAULT_BUDGET_DIGITS};
use crate::continuum::{marginal_secular_weights, spectrum, SampledWave, Wave, DEFAULT_GUARD};
use crate::exactmath::{GaussianMatrix, HamiltonianParts};
use crate::scalar::Real;

use super::quantize::{band_report, quantize, to_complex, QuantizationReport};
use super::{PhysicalProblem, QmBridgeError};

/// Steps evolved beyond each end of the comparison range so the sinc window
/// stays centred on the times of interest.
pub const DEFAULT_PAD: usize = 200;

/// `e^{−iθ}`.
fn phase<F: Real>(theta: F) -> Complex<F> {
    Complex::new(theta.cos(), -theta.sin())
}

/// Phase per unit time, coefficient and eigenvector of one kept mode.
type KeptMode<F> = (F, Complex<F>, DVector<Complex<F>>);

/// `Σ_k e^{−iθ_k t} c_k v_k`.
fn mode_sum<F: Real>(modes: &[KeptMode<F>], dim: usize, t: F) -> DVector<Complex<F>> {
    let mut out = DVector::zeros(dim);
    for (theta, coeff, v) in modes {
        let w = phase(*theta * t) * coeff;
        out += v.map(|z| z * w);
    }
    out
}

/// Eigendecomposition propagator for `e^{−iht}`.
struct Propagator<F: Real> {
    modes: Vec<(F, DVector<Complex<F>>)>,
}

impl<F: Real> Propagator<F> {
    fn new(h: &DMatrix<Complex<F>>) -> Result<Self, QmBridgeError> {
        let sp = spectrum(h, F::one())?;
        Ok(Self {
            modes: sp.modes.into_iter().map(|m| (m.epsilon, m.eigvec)).collect(),
        })
    }

    fn apply(&self, psi: &DVector<Complex<F>>, t: F) -> DVector<Complex<F>> {
        let modes: Vec<_> = self.modes.iter().map(|(e, v)| (*e, v.dotc(psi), v.clone())).collect();
        mode_sum(&modes, psi.len(), t)
    }
}

/// Exact quantum evolution `e^{−iht}ψ₀` by eigendecomposition.
pub fn qm_evolve<F: Real>(
    h: &DMatrix<Complex<F>>,
    psi0: &DVector<Complex<F>>,
    t: F,
) -> Result<DVector<Complex<F>>, QmBridgeError> {
    if psi0.len() != h.nrows() {
        return Err(QmBridgeError::invalid(
            "psi0",
            format!("length {} for a {}-dimensional h", psi0.len(), h.nrows()),
        ));
    }
    Ok(Propagator::new(h)?.apply(psi0, t))
}

/// In-band part of `ψ₀` in the eigenbasis of the integer Hamiltonian.
struct Projection<F: Real> {
    /// `(ε, u = v†ψ₀, v)` for every kept mode.
    kept: Vec<KeptMode<F>>,
    kept_idx: Vec<usize>,
    discarded_idx: Vec<usize>,
    projected: DVector<Complex<F>>,
}

fn project<F: Real>(
    h_int: &GaussianMatrix<BigInt>,
    psi0: &DVector<Complex<F>>,
) -> Result<Projection<F>, QmBridgeError> {
    let band = band_report::<BigInt, F>(h_int, 2)?;
    if band.all_out_of_band() {
        return Err(QmBridgeError::AllOutOfBand {
            spectral_radius: band.spectral_radius().to_f64_lossy(),
        });
    }
    let sp = spectrum(&to_complex::<BigInt, F>(h_int), F::one())?;
    let mut kept = Vec::new();
    let mut kept_idx = Vec::new();
    let mut discarded_idx = Vec::new();
    let mut projected = DVector::zeros(psi0.len());
    for (k, (mode, info)) in sp.modes.iter().zip(&band.modes).enumerate() {
        if info.in_band() {
            let u = mode.eigvec.dotc(psi0);
            projected += mode.eigvec.map(|z| z * u);
            kept.push((mode.epsilon, u, mode.eigvec.clone()));
            kept_idx.push(k);
        } else {
            discarded_idx.push(k);
        }
    }
    Ok(Projection {
        kept,
        kept_idx,
        discarded_idx,
        projected,
    })
}

fn normalized<F: Real>(psi0: &DVector<Complex<F>>, dim: usize) -> Result<DVector<Complex<F>>, QmBridgeError> {
    if psi0.len() != dim {
        return Err(QmBridgeError::invalid(
            "psi0",
            format!("length {}, expected {dim}", psi0.len()),
        ));
    }
    let n = psi0.norm();
    if n <= F::zero() || !n.is_finite() {
        return Err(QmBridgeError::invalid("psi0", "must be a nonzero finite vector"));
    }
    Ok(psi0.map(|z| z / n))
}

fn round_slice<F: Real>(n: i64, v: &DVector<Complex<F>>, q: F, tau: i64) -> Slice<BigInt> {
    let conv = |x: F| BigInt::from_f64((q * x).round().to_f64_lossy()).expect("finite seed");
    let x = v.iter().map(|z| conv(z.re)).collect();
    let p = v.iter().map(|z| conv(z.im)).collect();
    Slice::new(n, x, p, BigInt::from(tau), BigInt::from(0))
}

fn seed_from_projection<F: Real>(
    spec: &AutomatonSpec<BigInt>,
    proj: &Projection<F>,
    q: u64,
) -> Result<StatePair<BigInt>, QmBridgeError> {
    let qf = F::lit(q as f64);
    let dim = proj.projected.len();
    let step_modes: Vec<_> = proj
        .kept
        .iter()
        .map(|(e, u, v)| (arcsin_clamped(*e), *u, v.clone()))
        .collect();
    let mut s0 = round_slice(0, &proj.projected, qf, 0);
    let mut s1 = round_slice(1, &mode_sum(&step_modes, dim, F::one()), qf, 1);
    if s0.x.iter().chain(&s0.p).all(|v| v == &BigInt::from(0)) {
        return Err(QmBridgeError::SeedVanishes { q });
    }
    s0.two_pi = spec.hamiltonian_doubled(&s0);
    s1.two_pi = spec.hamiltonian_doubled(&s1);
    Ok(StatePair::new(s0, s1)?)
}

fn arcsin_clamped<F: Real>(e: F) -> F {
    e.clamp(-F::one(), F::one()).asin()
}

fn automaton_for(h_int: &GaussianMatrix<BigInt>, budget: u64) -> Result<AutomatonSpec<BigInt>, QmBridgeError> {
    let parts = HamiltonianParts::from_hamiltonian(h_int).map_err(crate::automaton::AutomatonError::from)?;
    Ok(AutomatonSpec::new(parts, BigInt::from(2)).with_budget(budget))
}

/// Integer seed pair for `ψ₀` under `h_int` at amplitude `Q`.
///
/// `ψ₀` is normalised and projected onto the in-band and marginal modes.
/// Slice 0 is `round(Q·Pψ₀)` and slice 1 advances each kept mode by its exact
/// step phase `e^{−i·arcsin ε}`, so the parasitic branch of the three-term
/// recursion starts at rounding level. `τ₀ = 0`, `τ₁ = 1` and `2π = 2H`.
pub fn seed_automaton<F: Real>(
    h_int: &GaussianMatrix<BigInt>,
    psi0: &DVector<Complex<F>>,
    q: u64,
) -> Result<StatePair<BigInt>, QmBridgeError> {
    let psi0 = normalized(psi0, h_int.rows())?;
    let proj = project(h_int, &psi0)?;
    seed_from_projection(&automaton_for(h_int, DEFAULT_BUDGET_DIGITS)?, &proj, q)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareOptions<F: Real> {
    pub pad: usize,
    /// Automaton times to compare at (units of `l`); `None` means the grid
    /// points `0, 1, …, steps`.
    pub times: Option<Vec<F>>,
    pub budget_digits: u64,
}

impl<F: Real> Default for CompareOptions<F> {
    fn default() -> Self {
        Self {
            pad: DEFAULT_PAD,
            times: None,
            budget_digits: DEFAULT_BUDGET_DIGITS,
        }
    }
}

/// Deviation at one time, split along the chain
/// automaton → ideal modified wave → exact evolution under `Ĥ/M` → exact
/// evolution under `ĥ`. The total is bounded by the sum of the parts.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviationRow<F: Real> {
    /// Automaton time in units of `l`.
    pub t: F,
    /// Matching quantum time `M·t`.
    pub qm_time: F,
    pub total: F,
    /// Integer seeding and its propagation (both sides reconstructed).
    pub rounding: F,
    /// Finite sinc window, measured on the ideal modified wave.
    pub truncation: F,
    /// `arcsin ε` versus `ε` phase advance.
    pub dispersion: F,
    /// `Ĥ/M` versus `ĥ`.
    pub quantization: F,
    /// Weight of `ψ₀` that was projected away.
    pub out_of_band: F,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport<F: Real> {
    pub amplitude_q: u64,
    pub quantization: QuantizationReport<F>,
    pub kept_modes: Vec<usize>,
    pub discarded_modes: Vec<usize>,
    /// `‖ψ₀ − Pψ₀‖`.
    pub out_of_band_weight: F,
    /// `max |arcsin ε − ε|` over the kept modes.
    pub dispersion_phase_per_step: F,
    /// Largest step multiplier over all modes; above 1 the rounding noise in
    /// discarded directions grows geometrically.
    pub max_growth: F,
    /// Secular weight of each marginal mode under the rounded seeds.
    pub secular_weights: Vec<(usize, F)>,
    pub rows: Vec<DeviationRow<F>>,
    pub trajectory: Trajectory<BigInt>,
}

impl<F: Real> ComparisonReport<F> {
    pub fn max_total(&self) -> F {
        self.rows.iter().fold(F::zero(), |a, r| a.max(r.total))
    }

    pub fn max_rounding(&self) -> F {
        self.rows.iter().fold(F::zero(), |a, r| a.max(r.rounding))
    }
}

pub fn simulate_vs_exact<F: Real>(
    problem: &PhysicalProblem<F>,
    psi0: &DVector<Complex<F>>,
    q: u64,
    steps: usize,
) -> Result<ComparisonReport<F>, QmBridgeError> {
    simulate_vs_exact_with(problem, psi0, q, steps, &CompareOptions::default())
}

pub fn simulate_vs_exact_with<F: Real>(
    problem: &PhysicalProblem<F>,
    psi0: &DVector<Complex<F>>,
    q: u64,
    steps: usize,
    opts: &CompareOptions<F>,
) -> Result<ComparisonReport<F>, QmBridgeError> {
    if q == 0 {
        return Err(QmBridgeError::SeedVanishes { q });
    }
    if opts.pad <= DEFAULT_GUARD {
        return Err(QmBridgeError::invalid(
            "pad",
            format!("must exceed the guard band of {DEFAULT_GUARD}"),
        ));
    }
    let dim = problem.dim();
    let psi0 = normalized(psi0, dim)?;
    let quant = quantize(problem)?;
    let proj = project(&quant.h_int, &psi0)?;
    let spec = automaton_for(&quant.h_int, opts.budget_digits)?;
    let pair = seed_from_projection(&spec, &proj, q)?;
    let traj = spec.evolve_window(&pair, opts.pad, steps + opts.pad)?;

    let qf = F::lit(q as f64);
    let one = F::one();
    let raw = SampledWave::<F>::from_trajectory(&traj, one)?;
    let ca = SampledWave::new(
        one,
        raw.n_min(),
        raw.samples().iter().map(|s| s.map(|z| z / qf)).collect(),
    )?;

    let step_modes: Vec<_> = proj
        .kept
        .iter()
        .map(|(e, u, v)| (arcsin_clamped(*e), *u, v.clone()))
        .collect();
    let int_modes: Vec<_> = proj.kept.iter().map(|(e, u, v)| (*e, *u, v.clone())).collect();
    let ideal = SampledWave::from_fn(one, ca.n_min(), ca.n_max(), |t| mode_sum(&step_modes, dim, t))?;
    let exact = Propagator::new(problem.h())?;
    let m = F::lit(problem.scale_m() as f64);

    let times = opts
        .times
        .clone()
        .unwrap_or_else(|| (0..=steps).map(|k| F::lit(k as f64)).collect());
    let mut rows = Vec::with_capacity(times.len());
    for t in times {
        ca.check_time(t)?;
        let ca_t = ca.eval(t);
        let ideal_rec = ideal.eval(t);
        let ideal_t = mode_sum(&step_modes, dim, t);
        let int_t = mode_sum(&int_modes, dim, t);
        let qm_proj = exact.apply(&proj.projected, m * t);
        let qm = exact.apply(&psi0, m * t);
        rows.push(DeviationRow {
            t,
            qm_time: m * t,
            total: (&ca_t - &qm).norm(),
            rounding: (&ca_t - &ideal_rec).norm(),
            truncation: (&ideal_rec - &ideal_t).norm(),
            dispersion: (&ideal_t - &int_t).norm(),
            quantization: (&int_t - &qm_proj).norm(),
            out_of_band: (&qm_proj - &qm).norm(),
        });
    }

    let seeds: Vec<DVector<Complex<F>>> = [pair.prev(), pair.curr()]
        .iter()
        .map(|s| ca.sample(s.n).expect("seed inside window").clone())
        .collect();
    let secular_weights = marginal_secular_weights(&to_complex(&quant.h_int), 2, &seeds[0], &seeds[1])?;
    let dispersion_phase_per_step = proj
        .kept
        .iter()
        .fold(F::zero(), |a, (e, _, _)| a.max((arcsin_clamped(*e) - *e).abs()));

    Ok(ComparisonReport {
        amplitude_q: q,
        kept_modes: proj.kept_idx,
        discarded_modes: proj.discarded_idx,
        out_of_band_weight: (&psi0 - &proj.projected).norm(),
        dispersion_phase_per_step,
        max_growth: quant.band.max_growth(),
        secular_weights,
        rows,
        trajectory: traj,
        quantization: quant,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::super::random_hermitian;
    use super::*;
    use crate::exactmath::GaussianInteger;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn pauli_x() -> DMatrix<Complex<f64>> {
        DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    fn problem(h: DMatrix<Complex<f64>>, m: u64) -> PhysicalProblem<f64> {
        PhysicalProblem::new(h, 1.0, m, 1000 * m).unwrap()
    }

    #[test]
    fn oracle_matches_closed_form() {
        let psi = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let t = 0.7;
        let out = qm_evolve(&pauli_x(), &psi, t).unwrap();
        // e^{−iσx t} = cos t − i sin t σx
        assert!((out[0] - c(t.cos(), 0.0)).norm() < 1e-14);
        assert!((out[1] - c(0.0, -t.sin())).norm() < 1e-14);
    }

    #[test]
    fn pauli_x_dispersion_dominates() {
        let psi = DVector::from_vec(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]);
        let rep = simulate_vs_exact(&problem(pauli_x(), 1), &psi, 1000, 8).unwrap();
        // frozen: |arcsin(1) − 1|
        assert!((rep.dispersion_phase_per_step - 0.570_796_326_794_896_6).abs() < 1e-12);
        assert!(rep.discarded_modes.is_empty());
        // aligned integer seeds: ψ₁ = −iψ₀ exactly, so no secular growth
        assert!(rep.secular_weights.iter().all(|&(_, w)| w < 1e-15));
        for r in &rep.rows {
            let expected = 2.0 * (0.5 * 0.570_796_326_794_896_6 * r.t).sin().abs();
            assert!((r.dispersion - expected).abs() < 1e-12);
            assert!(r.rounding <= 2.0 / (2.0 * 1000.0));
            assert!(r.truncation < 1e-12 && r.quantization < 1e-12);
            assert!(r.total <= r.dispersion + 2e-3);
        }
    }

    #[test]
    fn null_hamiltonian_is_pure_rounding() {
        let h = DMatrix::zeros(3, 3);
        let psi = DVector::from_vec(vec![c(0.3, -0.2), c(0.5, 0.1), c(-0.4, 0.67)]);
        let q = 1000;
        let rep = simulate_vs_exact(&problem(h, 2), &psi, q, 5).unwrap();
        let bound = (6.0f64).sqrt() / (2.0 * q as f64);
        let first = rep.rows[0].total;
        for r in &rep.rows {
            assert!(r.total <= bound);
            assert!((r.total - first).abs() < 1e-15);
            assert!(r.dispersion == 0.0 && r.out_of_band == 0.0);
        }
        let s = rep.trajectory.slices();
        assert!(s.windows(2).all(|w| w[0].x == w[1].x && w[0].p == w[1].p));
    }

    #[test]
    fn rounding_shrinks_tenfold() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let h = DMatrix::zeros(2, 2);
        let (mut lo, mut hi) = (0.0, 0.0);
        for _ in 0..30 {
            let psi = DVector::from_fn(2, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            lo += simulate_vs_exact(&problem(h.clone(), 1), &psi, 1000, 2)
                .unwrap()
                .max_rounding();
            hi += simulate_vs_exact(&problem(h.clone(), 1), &psi, 10_000, 2)
                .unwrap()
                .max_rounding();
        }
        let ratio = lo / hi;
        assert!((7.0..=14.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn out_of_band_part_is_projected_and_reported() {
        // Ĥ = [[1,1],[1,0]] has ε = −0.618 (stable) and 1.618 (out of band)
        let h = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let psi = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let opts = CompareOptions {
            pad: 12,
            ..CompareOptions::default()
        };
        let rep = simulate_vs_exact_with(&problem(h, 1), &psi, 1_000_000, 1, &opts).unwrap();
        assert_eq!(rep.kept_modes, vec![0]);
        assert_eq!(rep.discarded_modes, vec![1]);
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        // weight of (1,0) on the golden-ratio eigenvector
        let w = golden / (1.0 + golden * golden).sqrt();
        assert!((rep.out_of_band_weight - w).abs() < 1e-12);
        assert!(rep.max_growth > 2.8);
        for r in &rep.rows {
            assert!((r.out_of_band - w).abs() < 1e-12);
        }
    }

    #[test]
    fn refusals() {
        let psi = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            simulate_vs_exact(&problem(pauli_x(), 3), &psi, 1000, 4),
            Err(QmBridgeError::AllOutOfBand { .. })
        ));
        // every component of the normalised state is 1/√5 < 1/2
        let flat = DVector::from_element(5, c(1.0, 0.0));
        assert!(matches!(
            simulate_vs_exact(&problem(DMatrix::zeros(5, 5), 1), &flat, 1, 4),
            Err(QmBridgeError::SeedVanishes { q: 1 })
        ));
        assert!(simulate_vs_exact(&problem(pauli_x(), 1), &DVector::zeros(2), 10, 4).is_err());
    }

    #[test]
    fn seeds_and_evolution_are_exact() {
        let h = random_hermitian(3, 5);
        let p = problem(h, 1);
        let quant = quantize(&p).unwrap();
        let psi = DVector::from_vec(vec![c(0.2, 0.1), c(-0.5, 0.3), c(0.4, -0.6)]);
        let rep = match simulate_vs_exact_with(
            &p,
            &psi,
            100,
            0,
            &CompareOptions {
                pad: 11,
                ..Default::default()
            },
        ) {
            Ok(r) => r,
            Err(QmBridgeError::AllOutOfBand { .. }) => return,
            Err(e) => panic!("{e}"),
        };
        let traj = &rep.trajectory;
        assert!(traj.pi_integral_holds());
        let h_int = traj.spec().hamiltonian();
        assert_eq!(h_int, quant.h_int);
        for g in [GaussianMatrix::identity(3), h_int.clone(), h_int.pow(2).unwrap()] {
            for n in 1..traj.len() - 1 {
                assert!(traj.conservation_residual(&g, n).unwrap().is_zero());
            }
        }
        let pair = seed_automaton(&quant.h_int, &psi, 100).unwrap();
        assert_eq!(pair.prev().tau, BigInt::from(0));
        assert_eq!(pair.curr().tau, BigInt::from(1));
        assert!(pair.prev().psi().iter().any(|z| *z != GaussianInteger::zero()));
    }
}
