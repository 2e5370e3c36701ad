//! Batch front end: `run`, `verify`, `spectrum`, `reconstruct`, `map-qm` and
//! `convergence`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 syntax (command line or JSON),
//! 3 semantic (names the offending field), 4 magnitude budget exceeded,
//! 5 verification failed, 6 continuum precondition (lapse or precision),
//! 7 every mode out of band.
//!
//! Data files are byte-deterministic. Run metadata, when an `--out` path is
//! given, goes to `<out>.meta.json` next to it.

mod commands;
mod config;
mod io;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::{cmd_convergence, cmd_mapqm, cmd_reconstruct, cmd_run, cmd_spectrum, cmd_verify, CommandOutput};
pub use config::{parse_config, parse_problem, Outputs, ProblemConfig, RunConfig};
pub use io::{parse_t_grid, read_trajectory_csv};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("i/o error: {0}")]
    Io(String),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("invalid field `{field}`: {message}")]
    Semantic { field: String, message: String },
    #[error("slice magnitude budget exceeded at step {step}: {digits} digits > {budget}{}", growth_note(*.growth))]
    Budget {
        step: i64,
        digits: u64,
        budget: u64,
        growth: Option<f64>,
    },
    #[error("verification failed: {failed} check(s) FAIL")]
    VerifyFailed { failed: usize },
    #[error("continuum precondition: {0}")]
    Bridge(String),
    #[error("band refusal: {0}")]
    BandRefusal(String),
}

fn growth_note(growth: Option<f64>) -> String {
    match growth {
        Some(g) if g > 1.0 => format!(" (largest step multiplier {g}; out-of-band modes grow geometrically)"),
        _ => String::new(),
    }
}

impl CliError {
    pub fn semantic(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Semantic {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => 1,
            Self::Syntax(_) => 2,
            Self::Semantic { .. } => 3,
            Self::Budget { .. } => 4,
            Self::VerifyFailed { .. } => 5,
            Self::Bridge(_) => 6,
            Self::BandRefusal(_) => 7,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hamca",
    version,
    about = "Exact integer Hamiltonian automata and their continuum limit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON configuration file.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output file (default: stdout, or `outputs.path` from the config).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve the seed pair and write the trajectory.
    Run {
        #[command(flatten)]
        common: Common,
        /// Slice magnitude budget in decimal digits.
        #[arg(long, value_name = "DIGITS")]
        budget: Option<u64>,
    },
    /// Check reversibility, the action principle and conservation laws.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "DIGITS")]
        budget: Option<u64>,
        /// Precomputed trajectory CSV; slices from n = 2 on replace the run.
        #[arg(long, value_name = "PATH")]
        trajectory: Option<PathBuf>,
    },
    /// Eigenvalues, dispersion energies and step stability of the Hamiltonian.
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
    /// Sinc-reconstruct the run and evaluate the continuum equation residual.
    Reconstruct {
        #[command(flatten)]
        common: Common,
        /// Times in units of l: `a:b:k` (k points) or a comma list.
        #[arg(long = "t-grid", value_name = "SPEC")]
        t_grid: Option<String>,
        /// Sample half-width evolved on each side of the seed pair.
        #[arg(long, value_name = "HALFWIDTH", default_value_t = 200)]
        window: usize,
        #[arg(long, value_name = "DIGITS")]
        budget: Option<u64>,
    },
    /// Quantize a physical Hamiltonian and compare against exact evolution.
    MapQm {
        #[command(flatten)]
        common: Common,
        /// Automaton times in units of l (default: grid points 0..=steps).
        #[arg(long = "t-grid", value_name = "SPEC")]
        t_grid: Option<String>,
        /// Extra steps evolved on each side for reconstruction.
        #[arg(long, value_name = "HALFWIDTH", default_value_t = crate::qmbridge::DEFAULT_PAD)]
        window: usize,
        #[arg(long, value_name = "DIGITS")]
        budget: Option<u64>,
    },
    /// Quantization error against M and its fitted power law.
    Convergence {
        #[command(flatten)]
        common: Common,
    },
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn execute<'a>(
    cmd: &'a Command,
    stderr: &mut dyn Write,
) -> Result<(CommandOutput, Option<PathBuf>, &'a Common), CliError> {
    let (output, common, cfg_out) = match cmd {
        Command::Run { common, budget } => {
            let cfg = parse_config(&read_text(&common.config)?)?;
            let fmt = common.format.or(cfg.outputs.format).unwrap_or(Format::Csv);
            (cmd_run(&cfg, *budget, fmt)?, common, cfg.outputs.path)
        }
        Command::Verify {
            common,
            budget,
            trajectory,
        } => {
            let cfg = parse_config(&read_text(&common.config)?)?;
            let supplied = trajectory.as_deref().map(read_text).transpose()?;
            (
                cmd_verify(&cfg, *budget, supplied.as_deref())?,
                common,
                cfg.outputs.path,
            )
        }
        Command::Spectrum { common } => {
            let cfg = parse_config(&read_text(&common.config)?)?;
            let fmt = common.format.or(cfg.outputs.format).unwrap_or(Format::Csv);
            (cmd_spectrum(&cfg, fmt)?, common, cfg.outputs.path)
        }
        Command::Reconstruct {
            common,
            t_grid,
            window,
            budget,
        } => {
            let cfg = parse_config(&read_text(&common.config)?)?;
            let fmt = common.format.or(cfg.outputs.format).unwrap_or(Format::Csv);
            let out = cmd_reconstruct(&cfg, t_grid.as_deref(), *window, *budget, fmt)?;
            (out, common, cfg.outputs.path)
        }
        Command::MapQm {
            common,
            t_grid,
            window,
            budget,
        } => {
            let cfg = parse_problem(&read_text(&common.config)?)?;
            let fmt = common.format.or(cfg.outputs.format).unwrap_or(Format::Csv);
            let out = cmd_mapqm(&cfg, t_grid.as_deref(), *window, *budget, fmt)?;
            (out, common, cfg.outputs.path)
        }
        Command::Convergence { common } => {
            let cfg = parse_problem(&read_text(&common.config)?)?;
            let fmt = common.format.or(cfg.outputs.format).unwrap_or(Format::Csv);
            (cmd_convergence(&cfg, fmt)?, common, cfg.outputs.path)
        }
    };
    for w in &output.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let dest = common.out.clone().or(cfg_out);
    Ok((output, dest, common))
}

fn verb(cmd: &Command) -> &'static str {
    match cmd {
        Command::Run { .. } => "run",
        Command::Verify { .. } => "verify",
        Command::Spectrum { .. } => "spectrum",
        Command::Reconstruct { .. } => "reconstruct",
        Command::MapQm { .. } => "map-qm",
        Command::Convergence { .. } => "convergence",
    }
}

fn emit(
    cmd: &Command,
    output: &CommandOutput,
    dest: Option<&Path>,
    common: &Common,
    started: Instant,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    match dest {
        None => stdout
            .write_all(output.data.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
        Some(path) => {
            std::fs::write(path, &output.data).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut meta = serde_json::json!({
                "command": verb(cmd),
                "config": common.config.display().to_string(),
                "output": path.display().to_string(),
                "version": env!("CARGO_PKG_VERSION"),
                "elapsed_seconds": started.elapsed().as_secs_f64(),
            });
            if let (Some(m), serde_json::Value::Object(extra)) = (meta.as_object_mut(), &output.meta) {
                m.extend(extra.clone());
            }
            let side = sidecar_path(path);
            let text = serde_json::to_string_pretty(&meta).expect("json value serializes");
            std::fs::write(&side, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", side.display())))
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let started = Instant::now();
    let result = execute(&cli.command, stderr).and_then(|(output, dest, common)| {
        emit(&cli.command, &output, dest.as_deref(), common, started, stdout)?;
        output.failure.clone().map_or(Ok(()), Err)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
