//! Acceptance run: one PASS/FAIL line per criterion, with wall time against
//! its limit.
//!
//! A wrong value makes the process fail. A timing overrun is printed as FAIL
//! but only fails the process when `HAMCA_ACCEPTANCE_STRICT=1`. Criterion 1
//! stops at its time limit; `HAMCA_ACCEPTANCE_FULL=1` runs it to the end.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::time::{Duration, Instant};

use hamca::automaton::{
    conservation_residual_at, leibniz_defect, AutomatonSpec, Slice, StatePair, Trajectory, Variable,
};
use hamca::continuum::{
    continuum_conservation_residual, dispersion_energy, sinh_residual, spectrum, step_eigenphase, two_time, ModeSum,
    SampledWave,
};
use hamca::exactmath::{GaussianInteger, GaussianMatrix, HamiltonianParts, IntMatrix};
use hamca::qmbridge::{band_report, convergence_study, random_hermitian};
use hamca::BigInt;
use nalgebra::{Complex, DMatrix, DVector};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
}

struct Outcome {
    values_ok: bool,
    detail: String,
}

struct Line {
    id: u32,
    name: &'static str,
    values_ok: bool,
    on_time: bool,
    elapsed: Duration,
    limit: Duration,
    detail: String,
}

fn run(id: u32, name: &'static str, limit_s: u64, f: impl FnOnce() -> Outcome) -> Line {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit_s);
    let line = Line {
        id,
        name,
        values_ok: out.values_ok,
        on_time: elapsed <= limit,
        elapsed,
        limit,
        detail: out.detail,
    };
    let verdict = if line.values_ok && line.on_time { "PASS" } else { "FAIL" };
    let timing = if line.on_time { "" } else { " [over time limit]" };
    println!(
        "{verdict} criterion {}: {} ({:.2} s / {} s){timing} {}",
        line.id,
        line.name,
        line.elapsed.as_secs_f64(),
        line.limit.as_secs(),
        line.detail
    );
    line
}

fn random_parts(rng: &mut ChaCha8Rng, n: usize, k: i64) -> HamiltonianParts<BigInt> {
    let mut s = vec![vec![0i64; n]; n];
    let mut a = vec![vec![0i64; n]; n];
    for i in 0..n {
        s[i][i] = rng.gen_range(-k..=k);
        for j in i + 1..n {
            s[i][j] = rng.gen_range(-k..=k);
            s[j][i] = s[i][j];
            a[i][j] = rng.gen_range(-k..=k);
            a[j][i] = -a[i][j];
        }
    }
    HamiltonianParts::new(
        IntMatrix::from_i64_rows(&s).unwrap(),
        IntMatrix::from_i64_rows(&a).unwrap(),
    )
    .unwrap()
}

fn random_pair(rng: &mut ChaCha8Rng, n: usize, k: i64) -> StatePair<BigInt> {
    let mut v = || (0..n).map(|_| rng.gen_range(-k..=k)).collect::<Vec<i64>>();
    let (x0, p0, x1, p1) = (v(), v(), v(), v());
    let (tau0, pi0) = (rng.gen_range(-k..=k), rng.gen_range(-k..=k));
    StatePair::new(
        Slice::from_ints(0, &x0, &p0, tau0, 2 * pi0),
        Slice::from_ints(1, &x1, &p1, tau0 + 1, 2 * pi0),
    )
    .unwrap()
}

fn criterion_1(limit: Duration, full: bool) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let start = Instant::now();
    let (mut specs_done, mut checks, mut nonzero) = (0usize, 0u64, 0u64);
    let mut max_bits = 0;
    'specs: for _ in 0..100 {
        let n = rng.gen_range(1..=4);
        let parts = random_parts(&mut rng, n, 3);
        let h = parts.hamiltonian();
        let gs = [GaussianMatrix::identity(n), h.clone(), h.mul(&h).unwrap()];
        let spec = AutomatonSpec::new(parts, BigInt::from(2));
        let mut pair = random_pair(&mut rng, n, 3);
        let mut before = pair.prev().clone();
        for step in 0..10_000 {
            if !full && step % 64 == 0 && start.elapsed() > limit {
                break 'specs;
            }
            let next = spec.step_forward(&pair);
            for g in &gs {
                checks += 1;
                if !conservation_residual_at(g, &before, next.prev(), next.curr())
                    .unwrap()
                    .is_zero()
                {
                    nonzero += 1;
                }
            }
            before = next.prev().clone();
            pair = next;
        }
        max_bits = max_bits.max(pair.curr().magnitude_bits());
        specs_done += 1;
    }
    Outcome {
        values_ok: nonzero == 0,
        detail: format!(
            "specs completed {specs_done}/100, residuals checked {checks}, nonzero {nonzero}, largest final slice {max_bits} bits"
        ),
    }
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut restored = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=4);
        let c = rng.gen_range(1..=3);
        let spec = AutomatonSpec::new(random_parts(&mut rng, n, 3), BigInt::from(c));
        let init = random_pair(&mut rng, n, 3);
        let mut pair = init.clone();
        for _ in 0..50 {
            pair = spec.step_forward(&pair);
        }
        for _ in 0..50 {
            pair = spec.step_backward(&pair);
        }
        restored += usize::from(pair == init);
    }
    Outcome {
        values_ok: restored == 500,
        detail: format!("{restored}/500 seed pairs restored"),
    }
}

fn corrupt(rng: &mut ChaCha8Rng, traj: &mut Trajectory<BigInt>) -> String {
    let dim = traj.spec().dim();
    let len = traj.len();
    let k = rng.gen_range(0..len);
    let d = BigInt::from(rng.gen_range(1..=3) * if rng.gen() { 1 } else { -1 });
    let s = &mut traj.slices_mut()[k];
    match rng.gen_range(0..4) {
        0 => {
            let a = rng.gen_range(0..dim);
            s.x[a] += &d;
            format!("{:?}@{k}", Variable::X(a))
        }
        1 => {
            let a = rng.gen_range(0..dim);
            s.p[a] += &d;
            format!("{:?}@{k}", Variable::P(a))
        }
        2 => {
            s.tau += &d;
            format!("Tau@{k}")
        }
        _ => {
            s.two_pi += &d * 2;
            format!("Pi@{k}")
        }
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let deltas: Vec<BigInt> = (-3..=3).filter(|d| *d != 0).map(BigInt::from).collect();
    let (mut clean, mut caught, mut missed) = (0, 0, Vec::new());
    for _ in 0..50 {
        let n = rng.gen_range(1..=4);
        let c = rng.gen_range(1..=3);
        let spec = AutomatonSpec::new(random_parts(&mut rng, n, 3), BigInt::from(c));
        let mut traj = spec.evolve(&random_pair(&mut rng, n, 3), 12).unwrap();
        // δ = 0 is trivially stationary; the rest must vanish too
        clean += usize::from(traj.first_nonstationary(&deltas).is_none());
        let what = corrupt(&mut rng, &mut traj);
        if traj.first_nonstationary(&deltas).is_some() {
            caught += 1;
        } else {
            missed.push(what);
        }
    }
    Outcome {
        values_ok: clean == 50 && caught == 50,
        detail: format!("stationary {clean}/50, corruptions detected {caught}/50 {missed:?}"),
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let eps: f64 = rng.gen_range(-0.999..0.999);
        // λ = −iε ± √(1 − ε²); the stable branch has positive real part
        let disc = C::new(1.0 - eps * eps, 0.0).sqrt();
        let lambda = C::new(0.0, -eps) + disc;
        let lib = step_eigenphase(eps, 2).roots[0];
        let e = dispersion_energy(eps, 1.0).unwrap();
        for v in [lambda.arg(), lib.arg(), -e] {
            worst = worst.max((v + eps.asin()).abs());
        }
    }
    let unit = DMatrix::from_element(1, 1, C::new(1.0, 0.0));
    let edge = spectrum(&unit, 1.0).unwrap().modes[0].energy.unwrap();
    let edge_err = (edge - FRAC_PI_2).abs();
    Outcome {
        values_ok: worst <= 1e-9 && edge_err <= 1e-12,
        detail: format!("max |arg λ + arcsin ε| {worst:.1e}, |E l − π/2| {edge_err:.1e}"),
    }
}

fn period_four_wave(window: usize) -> (SampledWave<f64>, DMatrix<C>) {
    let parts = HamiltonianParts::new(IntMatrix::from_i64_rows(&[vec![1]]).unwrap(), IntMatrix::zeros(1, 1)).unwrap();
    let spec = AutomatonSpec::new(parts, BigInt::from(2));
    let pair = StatePair::new(
        Slice::from_ints(0, &[1], &[0], 0, 0),
        Slice::from_ints(1, &[0], &[-1], 1, 0),
    )
    .unwrap();
    let traj = spec.evolve_window(&pair, window, window).unwrap();
    let h = DMatrix::from_element(1, 1, C::new(1.0, 0.0));
    (SampledWave::from_trajectory(&traj, 1.0).unwrap(), h)
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut grid_err: f64 = 0.0;
    for l in [1.0, 0.7] {
        let samples: Vec<DVector<C>> = (0..121)
            .map(|_| DVector::from_fn(3, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        let wave = SampledWave::new(l, -60, samples).unwrap();
        for n in -50..=50i64 {
            let want = wave.sample(n).unwrap();
            let got = wave.reconstruct(n as f64 * l);
            grid_err = grid_err.max((got - want).norm() / want.norm());
        }
    }

    let trunc: Vec<f64> = [50i64, 100, 200, 400]
        .iter()
        .map(|&w| {
            let wave = SampledWave::from_fn(1.0, -w, w, |_| DVector::from_element(1, C::new(1.0, 0.0))).unwrap();
            (wave.reconstruct(0.5)[0] - C::new(1.0, 0.0)).norm()
        })
        .collect();
    let monotone = trunc.windows(2).all(|p| p[1] <= 1.1 * p[0]);

    let (wave, h) = period_four_wave(200);
    let worst_sinh = (1..=9)
        .map(|k| sinh_residual(&wave, &h, k as f64 / 10.0).unwrap())
        .fold(0.0, f64::max);
    Outcome {
        values_ok: grid_err <= 1e-15 && monotone && worst_sinh <= 1e-3,
        detail: format!(
            "grid rel err {grid_err:.1e}, all-ones truncation [{}], period-4 sinh residual {worst_sinh:.1e}",
            sci(&trunc)
        ),
    }
}

fn pauli_x() -> DMatrix<C> {
    DMatrix::from_row_slice(
        2,
        2,
        &[C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0)],
    )
}

fn criterion_6() -> Outcome {
    let h = pauli_x();
    let plus = DVector::from_vec(vec![C::new(FRAC_1_SQRT_2, 0.0), C::new(FRAC_1_SQRT_2, 0.0)]);
    let minus = DVector::from_vec(vec![C::new(FRAC_1_SQRT_2, 0.0), C::new(-FRAC_1_SQRT_2, 0.0)]);
    let analytic = ModeSum::new(1.0, 2)
        .with_mode(FRAC_PI_2, plus * C::new(0.6, 0.0))
        .with_mode(-FRAC_PI_2, minus * C::new(0.0, 0.8));
    let identity = DMatrix::<C>::identity(2, 2);
    let sweep: Vec<f64> = (0..20).map(|k| -4.75 + 0.5 * k as f64).collect();

    let mut analytic_res: f64 = 0.0;
    let mut translation: f64 = 0.0;
    for &t in &sweep {
        for g in [&identity, &h] {
            analytic_res = analytic_res.max(continuum_conservation_residual(&analytic, g, t).unwrap().abs());
        }
        let back = two_time(&analytic, &h, t - 1.0, t).unwrap();
        let fwd = two_time(&analytic, &h, t, t + 1.0).unwrap();
        translation = translation.max((back - fwd).abs());
    }

    // aligned integer seeds: ψ1 = −iĤψ0 with ψ0 = (1, 0)
    let parts = HamiltonianParts::new(
        IntMatrix::from_i64_rows(&[vec![0, 1], vec![1, 0]]).unwrap(),
        IntMatrix::zeros(2, 2),
    )
    .unwrap();
    let spec = AutomatonSpec::new(parts, BigInt::from(2));
    let pair = StatePair::new(
        Slice::from_ints(0, &[1, 0], &[0, 0], 0, 0),
        Slice::from_ints(1, &[0, 0], &[0, -1], 1, 0),
    )
    .unwrap();
    let sampled = SampledWave::from_trajectory(&spec.evolve_window(&pair, 200, 200).unwrap(), 1.0).unwrap();
    let mut recon_res: f64 = 0.0;
    for k in 1..=9 {
        for g in [&identity, &h] {
            recon_res = recon_res.max(
                continuum_conservation_residual(&sampled, g, k as f64 / 10.0)
                    .unwrap()
                    .abs(),
            );
        }
    }

    let mut cos_err: f64 = 0.0;
    let mut defects = Vec::new();
    for eps in [0.5, 0.25, 0.125] {
        let sp = spectrum(&DMatrix::from_element(1, 1, C::new(eps, 0.0)), 1.0).unwrap();
        let mode = ModeSum::from_spectrum(&sp, &[C::new(1.0, 0.0)]).unwrap();
        let c1 = two_time(&mode, &DMatrix::identity(1, 1), 0.3, 1.3).unwrap();
        // cos(arcsin ε) = √(1 − ε²)
        cos_err = cos_err.max((c1 - (1.0 - eps * eps).sqrt()).abs());
        defects.push(1.0 - c1);
    }
    let ratios: Vec<f64> = defects.windows(2).map(|d| d[0] / d[1]).collect();
    let quartic = ratios.iter().all(|r| (3.5..=4.5).contains(r));

    Outcome {
        values_ok: analytic_res <= 1e-9 && recon_res <= 1e-3 && translation <= 1e-6 && cos_err <= 1e-9 && quartic,
        detail: format!(
            "analytic residual {analytic_res:.1e}, reconstructed {recon_res:.1e}, translation {translation:.1e}, \
             |C_1 − cos El| {cos_err:.1e}, defect ratios {ratios:.2?}"
        ),
    }
}

fn criterion_7() -> Outcome {
    let h = random_hermitian(4, 20260101);
    let report = convergence_study(&h, &[4, 8, 16, 32]).unwrap();
    let bounded = report.rows.iter().all(|r| r.raw_elem_err <= 0.5 / r.scale_m as f64);
    let slope = report.slope.unwrap_or(f64::NAN);
    Outcome {
        values_ok: bounded && (-1.3..=-0.7).contains(&slope),
        detail: format!(
            "raw errors [{}], slope {slope:.3}",
            sci(&report.rows.iter().map(|r| r.raw_elem_err).collect::<Vec<_>>())
        ),
    }
}

fn criterion_8() -> Outcome {
    let three = GaussianInteger::from_ints(3, 0);
    let zero = GaussianInteger::zero();
    let h = GaussianMatrix::<BigInt>::from_rows(vec![vec![zero.clone(), three.clone()], vec![three, zero]]).unwrap();
    let band = band_report::<BigInt, f64>(&h, 2).unwrap();
    let expected = 3.0 + 2.0 * 2f64.sqrt();
    let growth_err = band
        .growth_rates()
        .iter()
        .fold(0.0f64, |a, g| a.max((g - expected).abs()));
    let classified = band.all_out_of_band();

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("px3.json");
    std::fs::write(&cfg, r#"{"h_re": [[0, 3], [3, 0]], "scale_m": 1, "psi0_re": [1, 1]}"#).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = hamca::cli::run_cli(
        ["hamca", "map-qm", "--config", cfg.to_str().unwrap()],
        &mut out,
        &mut err,
    );

    Outcome {
        values_ok: classified && growth_err <= 1e-9 && code == 7,
        detail: format!("all out of band {classified}, growth error {growth_err:.1e}, map-qm exit {code}"),
    }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut nonzero = 0;
    for _ in 0..1000 {
        let mut seq = || {
            (0..20)
                .map(|_| BigInt::from(rng.gen_range(-1_000_000i64..=1_000_000)))
                .collect::<Vec<_>>()
        };
        let (o, o2) = (seq(), seq());
        nonzero += (1..19).filter(|&n| !leibniz_defect(&o, &o2, n).is_zero()).count();
    }
    Outcome {
        values_ok: nonzero == 0,
        detail: format!("nonzero defects {nonzero} over 18000 interior points"),
    }
}

fn flag(name: &str) -> bool {
    std::env::var(name).is_ok_and(|v| v == "1")
}

fn main() {
    let full = flag("HAMCA_ACCEPTANCE_FULL");
    let strict = flag("HAMCA_ACCEPTANCE_STRICT");
    let lines = [
        run(1, "exact conservation for G in {I, H, H^2}", 60, || {
            criterion_1(Duration::from_secs(60), full)
        }),
        run(2, "reversibility", 10, criterion_2),
        run(3, "action principle and equations of motion", 30, criterion_3),
        run(4, "dispersion relation", 1, criterion_4),
        run(5, "sinc reconstruction", 5, criterion_5),
        run(6, "continuum conservation and two-time function", 5, criterion_6),
        run(7, "quantization scaling", 1, criterion_7),
        run(8, "band diagnostics", 1, criterion_8),
        run(9, "modified Leibniz identity", 1, criterion_9),
    ];
    let wrong: Vec<u32> = lines.iter().filter(|l| !l.values_ok).map(|l| l.id).collect();
    let late: Vec<u32> = lines.iter().filter(|l| !l.on_time).map(|l| l.id).collect();
    println!("summary: wrong values {wrong:?}, over time {late:?}");
    if !wrong.is_empty() || (strict && !late.is_empty()) {
        std::process::exit(1);
    }
}
