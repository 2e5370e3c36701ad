use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::Value;

use crate::automaton::{Slice, Trajectory};

use super::CliError;

/// JSON digits beyond which integers are written as strings.
const JSON_SAFE_DIGITS: usize = 15;

pub(crate) fn int_json(v: &BigInt) -> Value {
    let s = v.to_string();
    let digits = s.trim_start_matches('-').len();
    match (digits <= JSON_SAFE_DIGITS).then(|| s.parse::<i64>().ok()).flatten() {
        Some(i) => Value::from(i),
        None => Value::String(s),
    }
}

pub(crate) fn float_json(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub(crate) struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub(crate) fn new(header: &[String]) -> Self {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self { writer }
    }

    pub(crate) fn row(&mut self, fields: &[String]) {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub(crate) fn finish(self) -> String {
        let bytes = self.writer.into_inner().expect("in-memory flush");
        String::from_utf8(bytes).expect("csv output is utf-8")
    }
}

pub(crate) fn trajectory_header(dim: usize) -> Vec<String> {
    let mut h: Vec<String> = ["n", "tau", "two_pi", "two_H"].iter().map(|s| s.to_string()).collect();
    h.extend((0..dim).map(|k| format!("x{k}")));
    h.extend((0..dim).map(|k| format!("p{k}")));
    h
}

pub(crate) fn trajectory_csv(traj: &Trajectory<BigInt>) -> String {
    let mut t = Table::new(&trajectory_header(traj.spec().dim()));
    for (i, s) in traj.slices().iter().enumerate() {
        let mut row = vec![
            s.n.to_string(),
            s.tau.to_string(),
            s.two_pi.to_string(),
            traj.two_h(i).to_string(),
        ];
        row.extend(s.x.iter().chain(&s.p).map(|v| v.to_string()));
        t.row(&row);
    }
    t.finish()
}

pub(crate) fn trajectory_json(traj: &Trajectory<BigInt>) -> Value {
    let slices: Vec<Value> = traj
        .slices()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            serde_json::json!({
                "n": s.n,
                "tau": int_json(&s.tau),
                "two_pi": int_json(&s.two_pi),
                "two_H": int_json(&traj.two_h(i)),
                "x": s.x.iter().map(int_json).collect::<Vec<_>>(),
                "p": s.p.iter().map(int_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    serde_json::json!({
        "dim": traj.spec().dim(),
        "c": int_json(traj.spec().lapse()),
        "slices": slices,
    })
}

/// Reads a trajectory CSV in the `run` format. The `two_H` column is
/// recomputed by consumers and not trusted here.
pub fn read_trajectory_csv(text: &str, dim: usize) -> Result<Vec<Slice<BigInt>>, CliError> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| CliError::semantic("trajectory", e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect::<Vec<_>>();
    if header != trajectory_header(dim) {
        return Err(CliError::semantic(
            "trajectory",
            format!("header does not match a {dim}-dimensional trajectory"),
        ));
    }
    let mut out = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::semantic("trajectory", e.to_string()))?;
        let field = |k: usize| -> Result<BigInt, CliError> {
            rec[k].trim().parse::<BigInt>().map_err(|_| {
                CliError::semantic(
                    format!("trajectory row {}", line + 1),
                    format!("column `{}` is not an integer", header[k]),
                )
            })
        };
        let n = field(0)?
            .to_i64()
            .ok_or_else(|| CliError::semantic(format!("trajectory row {}", line + 1), "n out of range"))?;
        let x = (0..dim).map(|k| field(4 + k)).collect::<Result<_, _>>()?;
        let p = (0..dim).map(|k| field(4 + dim + k)).collect::<Result<_, _>>()?;
        out.push(Slice::new(n, x, p, field(1)?, field(2)?));
    }
    Ok(out)
}

/// `a:b:k` gives `k ≥ 2` evenly spaced points from `a` to `b` inclusive (or
/// just `a` for `k = 1`); otherwise a comma-separated list.
pub fn parse_t_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |msg: String| CliError::semantic("--t-grid", msg);
    let num = |s: &str| -> Result<f64, CliError> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad(format!("`{s}` is not a finite number")))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [a, b, k] => {
            let (a, b) = (num(a)?, num(b)?);
            let k: usize = k
                .trim()
                .parse()
                .map_err(|_| bad(format!("`{k}` is not a point count")))?;
            match k {
                0 => Err(bad("point count must be positive".into())),
                1 => Ok(vec![a]),
                _ => Ok((0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()),
            }
        }
        [_] => spec.split(',').map(num).collect(),
        _ => Err(bad(format!("`{spec}` is neither a:b:k nor a comma list"))),
    }
}
