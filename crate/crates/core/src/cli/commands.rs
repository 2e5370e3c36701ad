use nalgebra::{Complex, DMatrix};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::automaton::{leibniz_defect, AutomatonError, AutomatonSpec, Slice, Trajectory};
use crate::continuum::{marginal_secular_weights, sinh_residual, ContinuumError, SampledWave, Wave};
use crate::exactmath::GaussianMatrix;
use crate::qmbridge::{
    band_report, convergence_study, quantize, simulate_vs_exact_with, to_complex, CompareOptions, ComparisonReport,
    ConvergenceReport, PhysicalProblem, QmBridgeError, QuantizationReport,
};

use super::config::{ProblemConfig, RunConfig};
use super::io::{float_json, int_json, parse_t_grid, read_trajectory_csv, trajectory_csv, trajectory_json, Table};
use super::{CliError, Format};

/// Seed pairs whose marginal secular weight exceeds this are flagged.
const SECULAR_FLAG: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CommandOutput {
    /// The data file (or stdout) contents.
    pub data: String,
    /// Extra keys for the metadata sidecar.
    pub meta: Value,
    /// Printed to stderr, never mixed into `data`.
    pub warnings: Vec<String>,
    /// Set when the data was produced but the command must still fail.
    pub failure: Option<CliError>,
}

impl CommandOutput {
    fn new(data: String, meta: Value) -> Self {
        Self {
            data,
            meta,
            ..Self::default()
        }
    }
}

fn growth_of(spec: &AutomatonSpec<BigInt>) -> Option<f64> {
    let c = spec.lapse().to_i64()?;
    band_report::<BigInt, f64>(&spec.hamiltonian(), c)
        .ok()
        .map(|b| b.max_growth())
}

fn automaton_err(e: AutomatonError, spec: &AutomatonSpec<BigInt>) -> CliError {
    match e {
        AutomatonError::BudgetExceeded { step, digits, budget } => CliError::Budget {
            step,
            digits,
            budget,
            growth: growth_of(spec),
        },
        other => CliError::semantic("config", other.to_string()),
    }
}

fn spec_with_budget(cfg: &RunConfig, budget: Option<u64>) -> AutomatonSpec<BigInt> {
    let spec = cfg.automaton();
    match budget {
        Some(b) => spec.with_budget(b),
        None => spec,
    }
}

fn lapse_i64(cfg: &RunConfig) -> Result<i64, CliError> {
    cfg.lapse
        .to_i64()
        .ok_or_else(|| CliError::semantic("c", "lapse too large for spectral diagnostics"))
}

pub fn cmd_run(cfg: &RunConfig, budget: Option<u64>, format: Format) -> Result<CommandOutput, CliError> {
    let spec = spec_with_budget(cfg, budget);
    let traj = spec.evolve(&cfg.seed, cfg.steps).map_err(|e| automaton_err(e, &spec))?;
    let data = match format {
        Format::Csv => trajectory_csv(&traj),
        Format::Json => serde_json::to_string_pretty(&trajectory_json(&traj)).expect("json") + "\n",
    };
    let max_digits = traj.slices().iter().map(Slice::max_digits).max().unwrap_or(0);
    let meta = json!({
        "dim": cfg.dim,
        "steps": cfg.steps,
        "slices": traj.len(),
        "budget_digits": spec.budget_digits(),
        "max_digits": max_digits,
    });
    Ok(CommandOutput::new(data, meta))
}

struct Check {
    name: String,
    pass: bool,
    detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

fn verify_trajectory(traj: &Trajectory<BigInt>) -> Vec<Check> {
    let spec = traj.spec();
    let slices = traj.slices();
    let k = slices.len();
    let mut out = Vec::new();

    // run the recorded end pair backwards and compare every slice
    let last = traj.last_pair().expect("at least the seed pair");
    let back = spec.step_back_n(&last, k - 2);
    let mismatch = back.iter().zip(slices.iter().rev()).find(|(a, b)| a != b);
    out.push(match mismatch {
        None => check(
            "reversibility",
            true,
            format!("{k} slices recovered bit-exactly from the final pair"),
        ),
        Some((_, s)) => check("reversibility", false, format!("backward run disagrees at n = {}", s.n)),
    });

    let deltas: Vec<BigInt> = (-3..=3).filter(|d| *d != 0).map(BigInt::from).collect();
    let sites = traj.interior_sites().count();
    out.push(match traj.first_nonstationary(&deltas) {
        None => check(
            "variation",
            true,
            format!("{sites} interior sites x {} deltas stationary", deltas.len()),
        ),
        Some((site, delta, value)) => check(
            "variation",
            false,
            format!(
                "slice {} {:?}, delta {delta}: variation {value}",
                slices[site.slice].n, site.var
            ),
        ),
    });

    let h = spec.hamiltonian();
    let h2 = h.pow(2).expect("square");
    for (label, g) in [("I", GaussianMatrix::identity(spec.dim())), ("H", h), ("H^2", h2)] {
        let bad = (1..k.saturating_sub(1)).find(|&i| !traj.conservation_residual(&g, i).expect("interior").is_zero());
        out.push(match bad {
            None => check(
                format!("conservation[{label}]"),
                true,
                format!("{} interior residuals exactly zero", k.saturating_sub(2)),
            ),
            Some(i) => check(
                format!("conservation[{label}]"),
                false,
                format!(
                    "residual {} at n = {}",
                    traj.conservation_residual(&g, i).expect("interior"),
                    slices[i].n
                ),
            ),
        });
    }

    let two_h: Vec<BigInt> = (0..k).map(|i| traj.two_h(i)).collect();
    let mut series: Vec<(String, Vec<BigInt>)> = vec![("2H".into(), two_h)];
    for a in 0..spec.dim() {
        series.push((format!("x{a}"), slices.iter().map(|s| s.x[a].clone()).collect()));
        series.push((format!("p{a}"), slices.iter().map(|s| s.p[a].clone()).collect()));
    }
    let mut leibniz_bad = None;
    let mut count = 0usize;
    'outer: for (i, (na, a)) in series.iter().enumerate() {
        for (nb, b) in &series[i..] {
            for (n, s) in slices.iter().enumerate().take(k.saturating_sub(1)).skip(1) {
                count += 1;
                let d = leibniz_defect(a, b, n);
                if d != BigInt::from(0) {
                    leibniz_bad = Some(format!("{na}*{nb} at n = {}: defect {d}", s.n));
                    break 'outer;
                }
            }
        }
    }
    out.push(match leibniz_bad {
        None => check("leibniz", true, format!("{count} product-rule spot checks exact")),
        Some(msg) => check("leibniz", false, msg),
    });

    out.push(check(
        "pi-integral",
        traj.pi_integral_holds(),
        "2pi - 2H constant on each parity chain",
    ));
    out
}

/// Runs the invariant suite on the configured trajectory. With `supplied`
/// CSV text, the config's seed pair is kept and slices `n ≥ 2` come from
/// the file, so a seed that disagrees with the file shows up as a failure.
pub fn cmd_verify(cfg: &RunConfig, budget: Option<u64>, supplied: Option<&str>) -> Result<CommandOutput, CliError> {
    let spec = spec_with_budget(cfg, budget);
    let traj = match supplied {
        None => spec.evolve(&cfg.seed, cfg.steps).map_err(|e| automaton_err(e, &spec))?,
        Some(text) => {
            let file = read_trajectory_csv(text, cfg.dim)?;
            let mut slices = vec![cfg.seed.prev().clone(), cfg.seed.curr().clone()];
            slices.extend(file.into_iter().filter(|s| s.n >= 2));
            Trajectory::new(spec.clone(), slices).map_err(|e| CliError::semantic("trajectory", e.to_string()))?
        }
    };
    let checks = verify_trajectory(&traj);
    let failed = checks.iter().filter(|c| !c.pass).count();
    let mut data = String::new();
    for c in &checks {
        data += &format!("{} {}: {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let meta = json!({
        "slices": traj.len(),
        "checks": checks.iter().map(|c| json!({"name": c.name, "pass": c.pass})).collect::<Vec<_>>(),
    });
    let mut out = CommandOutput::new(data, meta);
    if failed > 0 {
        out.failure = Some(CliError::VerifyFailed { failed });
    }
    Ok(out)
}

pub fn cmd_spectrum(cfg: &RunConfig, format: Format) -> Result<CommandOutput, CliError> {
    let c = lapse_i64(cfg)?;
    let band =
        band_report::<BigInt, f64>(&cfg.parts.hamiltonian(), c).map_err(|e| CliError::semantic("S", e.to_string()))?;
    let l = cfg.scale_l;
    let data = match format {
        Format::Csv => {
            let header: Vec<String> = ["mode", "epsilon", "E_l", "E", "stability", "growth"]
                .iter()
                .map(|s| s.to_string())
                .collect();
            let mut t = Table::new(&header);
            for (k, m) in band.modes.iter().enumerate() {
                let (el, e) = match m.phase_per_step {
                    Some(p) => (p.to_string(), (p / l).to_string()),
                    None => ("OUT_OF_BAND".to_string(), "OUT_OF_BAND".to_string()),
                };
                t.row(&[
                    k.to_string(),
                    m.epsilon.to_string(),
                    el,
                    e,
                    m.stability.to_string(),
                    m.growth.to_string(),
                ]);
            }
            t.finish()
        }
        Format::Json => {
            let modes: Vec<Value> = band
                .modes
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    json!({
                        "mode": k,
                        "epsilon": float_json(m.epsilon),
                        "E_l": m.phase_per_step.map(float_json),
                        "E": m.phase_per_step.map(|p| float_json(p / l)),
                        "stability": m.stability,
                        "growth": float_json(m.growth),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&json!({"c": c, "scale_l": l, "modes": modes})).expect("json") + "\n"
        }
    };
    let meta = json!({"modes": band.modes.len(), "out_of_band": band.out_of_band()});
    Ok(CommandOutput::new(data, meta))
}

fn bridge_err(e: ContinuumError) -> CliError {
    match e {
        ContinuumError::GuardBand { .. } => CliError::semantic("--t-grid", e.to_string()),
        ContinuumError::LapseNotTwo(_) | ContinuumError::PrecisionLoss { .. } => CliError::Bridge(e.to_string()),
        other => CliError::semantic("config", other.to_string()),
    }
}

pub fn cmd_reconstruct(
    cfg: &RunConfig,
    t_grid: Option<&str>,
    window: usize,
    budget: Option<u64>,
    format: Format,
) -> Result<CommandOutput, CliError> {
    if cfg.lapse != BigInt::from(2) {
        return Err(CliError::Bridge(format!(
            "reconstruction requires c = 2, got {}",
            cfg.lapse
        )));
    }
    let spec = spec_with_budget(cfg, budget);
    let traj = spec
        .evolve_window(&cfg.seed, window, window)
        .map_err(|e| automaton_err(e, &spec))?;
    let l = cfg.scale_l;
    let wave = SampledWave::<f64>::from_trajectory(&traj, l).map_err(bridge_err)?;
    let h: DMatrix<Complex<f64>> = to_complex(&spec.hamiltonian());
    let grid = match t_grid {
        Some(s) => parse_t_grid(s)?,
        None => parse_t_grid("0:1:5")?,
    };

    let mut warnings = Vec::new();
    let seeds = (wave.sample(0).expect("seed"), wave.sample(1).expect("seed"));
    let weights = marginal_secular_weights(&h, 2, seeds.0, seeds.1).map_err(bridge_err)?;
    for &(mode, w) in &weights {
        if w > SECULAR_FLAG {
            warnings.push(format!(
                "marginal mode {mode} is not aligned with the seed pair (secular weight {w}); \
                 the orbit grows linearly and is not bandlimited"
            ));
        }
    }

    let dim = cfg.dim;
    let mut rows = Vec::with_capacity(grid.len());
    for &s in &grid {
        let t = s * l;
        let r = sinh_residual(&wave, &h, t).map_err(bridge_err)?;
        rows.push((t, wave.eval(t), r));
    }
    let data = match format {
        Format::Csv => {
            let mut header = vec!["t".to_string()];
            header.extend((0..dim).map(|a| format!("re{a}")));
            header.extend((0..dim).map(|a| format!("im{a}")));
            header.push("sinh_residual".into());
            let mut table = Table::new(&header);
            for (t, psi, r) in &rows {
                let mut row = vec![t.to_string()];
                row.extend(psi.iter().map(|z| z.re.to_string()));
                row.extend(psi.iter().map(|z| z.im.to_string()));
                row.push(r.to_string());
                table.row(&row);
            }
            table.finish()
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|(t, psi, r)| {
                    json!({
                        "t": float_json(*t),
                        "re": psi.iter().map(|z| float_json(z.re)).collect::<Vec<_>>(),
                        "im": psi.iter().map(|z| float_json(z.im)).collect::<Vec<_>>(),
                        "sinh_residual": float_json(*r),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&json!({"scale_l": l, "window": window, "rows": rows})).expect("json") + "\n"
        }
    };
    let meta = json!({
        "window": [wave.n_min(), wave.n_max()],
        "guard": wave.guard(),
        "marginal_secular_weights": weights.iter().map(|(m, w)| json!({"mode": m, "weight": w})).collect::<Vec<_>>(),
    });
    Ok(CommandOutput {
        warnings,
        ..CommandOutput::new(data, meta)
    })
}

fn qm_err(e: QmBridgeError) -> CliError {
    match e {
        QmBridgeError::Continuum(c) => bridge_err(c),
        QmBridgeError::Automaton(AutomatonError::BudgetExceeded { step, digits, budget }) => CliError::Budget {
            step,
            digits,
            budget,
            growth: None,
        },
        QmBridgeError::Automaton(other) => CliError::semantic("h_re", other.to_string()),
        QmBridgeError::Invalid { field, reason } => CliError::semantic(field, reason),
        QmBridgeError::NotSelfAdjoint => CliError::semantic("h_re", e.to_string()),
        QmBridgeError::AllOutOfBand { .. } => CliError::BandRefusal(e.to_string()),
        QmBridgeError::SeedVanishes { .. } => CliError::semantic("amplitude_q", e.to_string()),
    }
}

fn quant_summary(q: &QuantizationReport<f64>) -> Vec<(String, String)> {
    let list = |v: Vec<usize>| v.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ");
    let floats = |v: Vec<f64>| v.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ");
    vec![
        ("scale_m".into(), q.scale_m.to_string()),
        ("raw_elem_err".into(), q.raw_elem_err.to_string()),
        ("elem_err".into(), q.elem_err.to_string()),
        ("spectral_radius".into(), q.spectral_radius.to_string()),
        ("in_band_modes".into(), list(q.in_band_modes())),
        ("out_band_modes".into(), list(q.out_band_modes())),
        ("growth_rates".into(), floats(q.growth_rates())),
    ]
}

fn quant_json(q: &QuantizationReport<f64>) -> Value {
    let h_int: Vec<Vec<Value>> = (0..q.h_int.rows())
        .map(|r| {
            q.h_int
                .row(r)
                .iter()
                .map(|z| json!([int_json(&z.re), int_json(&z.im)]))
                .collect()
        })
        .collect();
    json!({
        "scale_m": q.scale_m,
        "h_int": h_int,
        "raw_elem_err": float_json(q.raw_elem_err),
        "elem_err": float_json(q.elem_err),
        "spectral_radius": float_json(q.spectral_radius),
        "in_band_modes": q.in_band_modes(),
        "out_band_modes": q.out_band_modes(),
        "growth_rates": q.growth_rates().into_iter().map(float_json).collect::<Vec<_>>(),
    })
}

fn convergence_lines(c: &ConvergenceReport<f64>) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = c
        .rows
        .iter()
        .map(|r| (format!("elem_err[M={}]", r.scale_m), r.elem_err.to_string()))
        .collect();
    out.push(("slope".into(), c.slope.map_or("none".into(), |s| s.to_string())));
    out.push(("exactly_representable".into(), c.exactly_representable.to_string()));
    out
}

fn convergence_json(c: &ConvergenceReport<f64>) -> Value {
    json!({
        "rows": c.rows.iter().map(|r| json!({
            "M": r.scale_m,
            "elem_err": float_json(r.elem_err),
            "raw_elem_err": float_json(r.raw_elem_err),
        })).collect::<Vec<_>>(),
        "slope": c.slope.map(float_json),
        "exactly_representable": c.exactly_representable,
    })
}

fn comments(pairs: &[(String, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
}

const DEVIATION_COLUMNS: [&str; 8] = [
    "t",
    "qm_time",
    "total",
    "rounding",
    "truncation",
    "dispersion",
    "quantization",
    "out_of_band",
];

fn comparison_summary(rep: &ComparisonReport<f64>) -> Vec<(String, String)> {
    vec![
        ("amplitude_q".into(), rep.amplitude_q.to_string()),
        ("out_of_band_weight".into(), rep.out_of_band_weight.to_string()),
        (
            "dispersion_phase_per_step".into(),
            rep.dispersion_phase_per_step.to_string(),
        ),
        ("max_growth".into(), rep.max_growth.to_string()),
    ]
}

/// Quantizes, optionally tabulates convergence over `m_values`, then
/// compares automaton and exact evolution.
pub fn cmd_mapqm(
    cfg: &ProblemConfig,
    t_grid: Option<&str>,
    window: usize,
    budget: Option<u64>,
    format: Format,
) -> Result<CommandOutput, CliError> {
    let m = cfg
        .scale_m
        .ok_or_else(|| CliError::semantic("scale_m", "missing required field"))?;
    let psi0 = cfg
        .psi0
        .as_ref()
        .ok_or_else(|| CliError::semantic("psi0_re", "missing required field"))?;
    let mprime = cfg
        .time_scale_mprime
        .unwrap_or_else(|| m.saturating_mul(1000).max(m + 1));
    let problem = PhysicalProblem::new(cfg.h.clone(), cfg.eps_phys, m, mprime).map_err(qm_err)?;
    let quant = quantize(&problem).map_err(qm_err)?;
    let conv = cfg
        .m_values
        .as_ref()
        .map(|ms| convergence_study(&cfg.h, ms))
        .transpose()
        .map_err(qm_err)?;

    if quant.band.all_out_of_band() {
        let mut msg = format!(
            "all {} modes of round(M h) are out of band at M = {m} (spectral radius {}, growth rates {:?})",
            quant.band.modes.len(),
            quant.spectral_radius,
            quant.growth_rates()
        );
        if let Some(c) = &conv {
            msg += &format!("; convergence: {}", comments(&convergence_lines(c)).replace('\n', " "));
        }
        return Err(CliError::BandRefusal(msg));
    }

    let opts = CompareOptions {
        pad: window,
        times: t_grid.map(parse_t_grid).transpose()?,
        budget_digits: budget.unwrap_or(crate::automaton::DEFAULT_BUDGET_DIGITS),
    };
    let rep = simulate_vs_exact_with(&problem, psi0, cfg.amplitude_q, cfg.steps, &opts).map_err(qm_err)?;
    let mut warnings = Vec::new();
    if !rep.discarded_modes.is_empty() {
        warnings.push(format!(
            "modes {:?} are out of band; weight {} of psi0 was projected away and rounding noise in those \
             directions grows by up to {} per step",
            rep.discarded_modes, rep.out_of_band_weight, rep.max_growth
        ));
    }
    let row_values = |r: &crate::qmbridge::DeviationRow<f64>| {
        [
            r.t,
            r.qm_time,
            r.total,
            r.rounding,
            r.truncation,
            r.dispersion,
            r.quantization,
            r.out_of_band,
        ]
    };
    let data = match format {
        Format::Csv => {
            let mut head = quant_summary(&quant);
            head.extend(comparison_summary(&rep));
            if let Some(c) = &conv {
                head.extend(convergence_lines(c));
            }
            let header: Vec<String> = DEVIATION_COLUMNS.iter().map(|s| s.to_string()).collect();
            let mut table = Table::new(&header);
            for r in &rep.rows {
                table.row(&row_values(r).map(|v| v.to_string()));
            }
            comments(&head) + &table.finish()
        }
        Format::Json => {
            let rows: Vec<Value> = rep
                .rows
                .iter()
                .map(|r| {
                    let vals = row_values(r);
                    Value::Object(
                        DEVIATION_COLUMNS
                            .iter()
                            .zip(vals)
                            .map(|(k, v)| (k.to_string(), float_json(v)))
                            .collect(),
                    )
                })
                .collect();
            let summary: serde_json::Map<String, Value> = comparison_summary(&rep)
                .into_iter()
                .map(|(k, v)| (k, v.parse::<f64>().map_or(Value::String(v), float_json)))
                .collect();
            let doc = json!({
                "quantization": quant_json(&quant),
                "comparison": summary,
                "kept_modes": rep.kept_modes,
                "discarded_modes": rep.discarded_modes,
                "convergence": conv.as_ref().map(convergence_json),
                "rows": rows,
            });
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
    };
    let meta = json!({
        "scale_m": m,
        "time_scale_mprime": mprime,
        "physical_bandwidth": problem.physical_bandwidth(),
        "window": window,
        "steps": cfg.steps,
    });
    Ok(CommandOutput {
        warnings,
        ..CommandOutput::new(data, meta)
    })
}

pub fn cmd_convergence(cfg: &ProblemConfig, format: Format) -> Result<CommandOutput, CliError> {
    let ms = cfg
        .m_values
        .as_ref()
        .ok_or_else(|| CliError::semantic("m_values", "missing required field"))?;
    let rep = convergence_study(&cfg.h, ms).map_err(qm_err)?;
    let data = match format {
        Format::Csv => {
            let header: Vec<String> = ["M", "elem_err", "raw_elem_err", "half_over_M"]
                .iter()
                .map(|s| s.to_string())
                .collect();
            let mut t = Table::new(&header);
            for r in &rep.rows {
                t.row(&[
                    r.scale_m.to_string(),
                    r.elem_err.to_string(),
                    r.raw_elem_err.to_string(),
                    (0.5 / r.scale_m as f64).to_string(),
                ]);
            }
            let head = vec![
                ("slope".to_string(), rep.slope.map_or("none".into(), |s| s.to_string())),
                (
                    "exactly_representable".to_string(),
                    rep.exactly_representable.to_string(),
                ),
            ];
            comments(&head) + &t.finish()
        }
        Format::Json => serde_json::to_string_pretty(&convergence_json(&rep)).expect("json") + "\n",
    };
    Ok(CommandOutput::new(data, json!({"m_values": ms})))
}
