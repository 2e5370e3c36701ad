//! JSON configuration documents. Parsing is two-stage: `serde_json` for
//! syntax (exit 2), then a hand walk over the value tree so every semantic
//! complaint can name the offending field (exit 3).

use std::path::PathBuf;

use nalgebra::{Complex, DMatrix, DVector};
use num_bigint::BigInt;
use serde_json::{Map, Value};

use crate::automaton::{AutomatonSpec, Slice, StatePair, DEFAULT_BUDGET_DIGITS};
use crate::exactmath::{ExactMathError, HamiltonianParts, IntMatrix};
use crate::qmbridge::random_hermitian;

use super::{CliError, Format};

fn parse_document(text: &str) -> Result<Map<String, Value>, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Syntax(e.to_string()))?;
    match value {
        Value::Object(map) => Ok(map),
        _ => Err(CliError::semantic("<root>", "config must be a JSON object")),
    }
}

fn reject_unknown(map: &Map<String, Value>, allowed: &[&str]) -> Result<(), CliError> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(CliError::semantic(k.clone(), "unknown field")),
        None => Ok(()),
    }
}

fn required<'a>(map: &'a Map<String, Value>, key: &str) -> Result<&'a Value, CliError> {
    map.get(key)
        .ok_or_else(|| CliError::semantic(key, "missing required field"))
}

/// Integers may be JSON numbers or decimal strings (for anything too wide
/// for a double).
fn int_at(v: &Value, path: &str) -> Result<BigInt, CliError> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(CliError::semantic(
                    path,
                    format!("expected an integer, got {n} (write large integers as strings)"),
                ))
            }
        }
        Value::String(s) => s
            .trim()
            .parse::<BigInt>()
            .map_err(|_| CliError::semantic(path, format!("`{s}` is not a decimal integer"))),
        other => Err(CliError::semantic(path, format!("expected an integer, got {other}"))),
    }
}

fn u64_at(v: &Value, path: &str) -> Result<u64, CliError> {
    v.as_u64()
        .ok_or_else(|| CliError::semantic(path, format!("expected a non-negative integer, got {v}")))
}

fn real_at(v: &Value, path: &str) -> Result<f64, CliError> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::semantic(path, format!("expected a finite number, got {v}")))
}

fn array_at<'a>(v: &'a Value, path: &str, len: Option<usize>) -> Result<&'a Vec<Value>, CliError> {
    let arr = v
        .as_array()
        .ok_or_else(|| CliError::semantic(path, "expected an array"))?;
    if let Some(len) = len {
        if arr.len() != len {
            return Err(CliError::semantic(
                path,
                format!("expected {len} entries, got {}", arr.len()),
            ));
        }
    }
    Ok(arr)
}

fn int_vec(v: &Value, path: &str, len: usize) -> Result<Vec<BigInt>, CliError> {
    array_at(v, path, Some(len))?
        .iter()
        .enumerate()
        .map(|(i, e)| int_at(e, &format!("{path}[{i}]")))
        .collect()
}

fn real_vec(v: &Value, path: &str, len: Option<usize>) -> Result<Vec<f64>, CliError> {
    array_at(v, path, len)?
        .iter()
        .enumerate()
        .map(|(i, e)| real_at(e, &format!("{path}[{i}]")))
        .collect()
}

fn int_matrix(v: &Value, path: &str, dim: usize) -> Result<IntMatrix<BigInt>, CliError> {
    let rows = array_at(v, path, Some(dim))?
        .iter()
        .enumerate()
        .map(|(r, row)| int_vec(row, &format!("{path}[{r}]"), dim))
        .collect::<Result<Vec<_>, _>>()?;
    IntMatrix::from_rows(rows).map_err(|e| CliError::semantic(path, e.to_string()))
}

fn real_matrix(v: &Value, path: &str, dim: usize) -> Result<Vec<Vec<f64>>, CliError> {
    array_at(v, path, Some(dim))?
        .iter()
        .enumerate()
        .map(|(r, row)| real_vec(row, &format!("{path}[{r}]"), Some(dim)))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outputs {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

fn parse_outputs(v: Option<&Value>) -> Result<Outputs, CliError> {
    let Some(v) = v else {
        return Ok(Outputs::default());
    };
    let map = v
        .as_object()
        .ok_or_else(|| CliError::semantic("outputs", "expected an object"))?;
    for k in map.keys() {
        if k != "path" && k != "format" {
            return Err(CliError::semantic(format!("outputs.{k}"), "unknown field"));
        }
    }
    let path = match map.get("path") {
        None => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(_) => return Err(CliError::semantic("outputs.path", "expected a string")),
    };
    let format = match map.get("format") {
        None => None,
        Some(Value::String(s)) => Some(match s.as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            _ => return Err(CliError::semantic("outputs.format", format!("unknown format `{s}`"))),
        }),
        Some(_) => return Err(CliError::semantic("outputs.format", "expected a string")),
    };
    Ok(Outputs { path, format })
}

/// A validated automaton run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub parts: HamiltonianParts<BigInt>,
    pub lapse: BigInt,
    pub seed: StatePair<BigInt>,
    pub steps: usize,
    pub scale_l: f64,
    pub budget_digits: u64,
    pub outputs: Outputs,
}

impl RunConfig {
    pub fn automaton(&self) -> AutomatonSpec<BigInt> {
        AutomatonSpec::new(self.parts.clone(), self.lapse.clone()).with_budget(self.budget_digits)
    }
}

const RUN_FIELDS: &[&str] = &[
    "dim",
    "S",
    "A",
    "c",
    "x0",
    "p0",
    "tau0",
    "two_pi0",
    "x1",
    "p1",
    "tau1",
    "two_pi1",
    "steps",
    "scale_l",
    "budget_digits",
    "outputs",
];

/// Parses and validates a run configuration.
///
/// `tau0` and `two_pi0` default to 0, `tau1` to `tau0 + ⌊c/2⌋`, and
/// `two_pi1` to `two_pi0 + 2H₁ − 2H₀` so that `π − H` starts equal on both
/// parity chains. `steps` defaults to 0.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let map = parse_document(text)?;
    reject_unknown(&map, RUN_FIELDS)?;
    let dim = u64_at(required(&map, "dim")?, "dim")? as usize;
    if dim == 0 {
        return Err(CliError::semantic("dim", "must be at least 1"));
    }
    let s = int_matrix(required(&map, "S")?, "S", dim)?;
    let a = int_matrix(required(&map, "A")?, "A", dim)?;
    let parts = HamiltonianParts::new(s, a).map_err(|e| match e {
        ExactMathError::NotSymmetric { row, col } => {
            CliError::semantic("S", format!("not symmetric: S[{row}][{col}] != S[{col}][{row}]"))
        }
        ExactMathError::NotAntisymmetric { row, col } => {
            CliError::semantic("A", format!("not antisymmetric: A[{row}][{col}] != -A[{col}][{row}]"))
        }
        other => CliError::semantic("S", other.to_string()),
    })?;
    let lapse = int_at(required(&map, "c")?, "c")?;

    let opt_int = |key: &str| map.get(key).map(|v| int_at(v, key)).transpose();
    let x0 = int_vec(required(&map, "x0")?, "x0", dim)?;
    let p0 = int_vec(required(&map, "p0")?, "p0", dim)?;
    let x1 = int_vec(required(&map, "x1")?, "x1", dim)?;
    let p1 = int_vec(required(&map, "p1")?, "p1", dim)?;
    let tau0 = opt_int("tau0")?.unwrap_or_default();
    let two_pi0 = opt_int("two_pi0")?.unwrap_or_default();
    let tau1 = match opt_int("tau1")? {
        Some(t) => t,
        None => &tau0 + num_integer::Integer::div_floor(&lapse, &BigInt::from(2)),
    };

    let spec = AutomatonSpec::new(parts.clone(), lapse.clone());
    let s0 = Slice::new(0, x0, p0, tau0, two_pi0);
    let mut s1 = Slice::new(1, x1, p1, tau1, BigInt::from(0));
    s1.two_pi = match opt_int("two_pi1")? {
        Some(v) => v,
        None => &s0.two_pi + spec.hamiltonian_doubled(&s1) - spec.hamiltonian_doubled(&s0),
    };
    let seed = StatePair::new(s0, s1).map_err(|e| CliError::semantic("x0", e.to_string()))?;

    let steps = match map.get("steps") {
        Some(v) => u64_at(v, "steps")? as usize,
        None => 0,
    };
    let scale_l = match map.get("scale_l") {
        Some(v) => real_at(v, "scale_l")?,
        None => 1.0,
    };
    if scale_l <= 0.0 {
        return Err(CliError::semantic("scale_l", "must be positive"));
    }
    let budget_digits = match map.get("budget_digits") {
        Some(v) => u64_at(v, "budget_digits")?,
        None => DEFAULT_BUDGET_DIGITS,
    };
    Ok(RunConfig {
        dim,
        parts,
        lapse,
        seed,
        steps,
        scale_l,
        budget_digits,
        outputs: parse_outputs(map.get("outputs"))?,
    })
}

/// Inputs for `map-qm` and `convergence`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemConfig {
    pub h: DMatrix<Complex<f64>>,
    pub eps_phys: f64,
    pub scale_m: Option<u64>,
    pub time_scale_mprime: Option<u64>,
    pub psi0: Option<DVector<Complex<f64>>>,
    pub amplitude_q: u64,
    pub steps: usize,
    pub m_values: Option<Vec<u64>>,
    pub outputs: Outputs,
}

const PROBLEM_FIELDS: &[&str] = &[
    "h_re",
    "h_im",
    "random_h",
    "eps_phys",
    "scale_m",
    "time_scale_mprime",
    "psi0_re",
    "psi0_im",
    "amplitude_q",
    "steps",
    "m_values",
    "outputs",
];

/// `h` comes either from `h_re` (+ optional `h_im`) rows or from
/// `random_h: {dim, seed}`.
pub fn parse_problem(text: &str) -> Result<ProblemConfig, CliError> {
    let map = parse_document(text)?;
    reject_unknown(&map, PROBLEM_FIELDS)?;
    let h = match (map.get("h_re"), map.get("random_h")) {
        (Some(_), Some(_)) => return Err(CliError::semantic("random_h", "give either h_re or random_h, not both")),
        (None, None) => return Err(CliError::semantic("h_re", "missing required field")),
        (Some(re), None) => {
            let dim = array_at(re, "h_re", None)?.len();
            if dim == 0 {
                return Err(CliError::semantic("h_re", "matrix is empty"));
            }
            let re = real_matrix(re, "h_re", dim)?;
            let im = match map.get("h_im") {
                Some(v) => real_matrix(v, "h_im", dim)?,
                None => vec![vec![0.0; dim]; dim],
            };
            DMatrix::from_fn(dim, dim, |r, c| Complex::new(re[r][c], im[r][c]))
        }
        (None, Some(v)) => {
            let obj = v
                .as_object()
                .ok_or_else(|| CliError::semantic("random_h", "expected {\"dim\": N, \"seed\": S}"))?;
            let dim = u64_at(obj.get("dim").unwrap_or(&Value::Null), "random_h.dim")? as usize;
            let seed = u64_at(obj.get("seed").unwrap_or(&Value::Null), "random_h.seed")?;
            if dim == 0 {
                return Err(CliError::semantic("random_h.dim", "must be at least 1"));
            }
            random_hermitian(dim, seed)
        }
    };
    let dim = h.nrows();
    if let Err(e) = crate::continuum::check_hermitian(&h) {
        return Err(CliError::semantic("h_re", e.to_string()));
    }
    let eps_phys = match map.get("eps_phys") {
        Some(v) => real_at(v, "eps_phys")?,
        None => 1.0,
    };
    let opt_u64 = |key: &str| map.get(key).map(|v| u64_at(v, key)).transpose();
    let psi0 = match map.get("psi0_re") {
        None => None,
        Some(v) => {
            let re = real_vec(v, "psi0_re", Some(dim))?;
            let im = match map.get("psi0_im") {
                Some(v) => real_vec(v, "psi0_im", Some(dim))?,
                None => vec![0.0; dim],
            };
            Some(DVector::from_fn(dim, |k, _| Complex::new(re[k], im[k])))
        }
    };
    let m_values = match map.get("m_values") {
        None => None,
        Some(v) => Some(
            array_at(v, "m_values", None)?
                .iter()
                .enumerate()
                .map(|(i, e)| u64_at(e, &format!("m_values[{i}]")))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    Ok(ProblemConfig {
        h,
        eps_phys,
        scale_m: opt_u64("scale_m")?,
        time_scale_mprime: opt_u64("time_scale_mprime")?,
        psi0,
        amplitude_q: opt_u64("amplitude_q")?.unwrap_or(1000),
        steps: opt_u64("steps")?.unwrap_or(10) as usize,
        m_values,
        outputs: parse_outputs(map.get("outputs"))?,
    })
}
