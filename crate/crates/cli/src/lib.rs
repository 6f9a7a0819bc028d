//! Command implementations behind the `reslocus` binary.

pub mod output;
pub mod spec;
pub mod svg;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use output::Format;
use reslocus::bench::{default_config, run_bench};
use reslocus::{
    exact_contour, exact_locus, trace_contour, trace_locus, Locus, TraceConfig, TraceError, Velocity,
};
use spec::{ParamModelSpec, PlantSpec};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn trace_err(e: TraceError<f64>) -> CliError {
    match e {
        TraceError::EmptyRange | TraceError::InvalidStep { .. } | TraceError::InvalidConfig(_) => {
            CliError::Usage(e.to_string())
        }
        other => CliError::Numeric(other.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(name = "reslocus", version, about = "Pole velocities from residues, and residue-driven root loci")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-loop poles, residues and velocities at one gain.
    Residues {
        /// Plant file (JSON).
        plant: PathBuf,
        /// Feedback gain.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        k: f64,
        /// Round printed values to this many significant digits.
        #[arg(long)]
        digits: Option<usize>,
    },
    /// Root locus over a gain grid.
    Trace {
        /// Plant file (JSON).
        plant: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Contour locus over one parameter of a model.
    Contour {
        /// Parameter model file (JSON).
        model: PathBuf,
        /// Parameter to sweep; the default grid is 0.5 to 1.5 times its
        /// nominal value in 200 steps.
        #[arg(long)]
        param: String,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Pole velocities with respect to every model parameter.
    Paramvel {
        /// Parameter model file (JSON).
        model: PathBuf,
        /// Round printed values to this many significant digits.
        #[arg(long)]
        digits: Option<usize>,
    },
    /// Tracer versus exact per-step solver over the built-in plants.
    Bench {
        /// Timed repetitions per case, after one discarded warm-up.
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[command(flatten)]
        grid: GridArgs,
        /// JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Tracer,
    Exact,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Start of the grid (gain, or parameter value for contours).
    #[arg(long, allow_negative_numbers = true)]
    pub kmin: Option<f64>,
    /// End of the grid, included when it lies on it.
    #[arg(long, allow_negative_numbers = true)]
    pub kmax: Option<f64>,
    /// Step size (default 0.01 for gains).
    #[arg(long)]
    pub dk: Option<f64>,
    #[arg(long, value_enum, default_value_t = Method::Tracer)]
    pub method: Method,
    /// Drop the stabilizing term from the tracer update.
    #[arg(long)]
    pub no_stabilizer: bool,
    /// Exact re-solve every N steps (0 = never).
    #[arg(long, default_value_t = 0)]
    pub reanchor: usize,
}

impl GridArgs {
    fn config(&self, kmin: f64, kmax: f64, dk: f64) -> TraceConfig<f64> {
        TraceConfig::new(self.kmin.unwrap_or(kmin), self.kmax.unwrap_or(kmax), self.dk.unwrap_or(dk))
            .with_stabilizer(!self.no_stabilizer)
            .with_reanchor(self.reanchor)
    }
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// CSV path; events go to `<stem>.events.json` next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write `<stem>.svg` (requires --out).
    #[arg(long)]
    pub svg: bool,
    /// Round CSV values to this many significant digits.
    #[arg(long)]
    pub digits: Option<usize>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Residues { plant, k, digits } => cmd_residues(&plant, k, Format { digits }),
        Command::Trace { plant, grid, out } => {
            let g = PlantSpec::load(&plant)?.build()?;
            let d = default_config();
            let cfg = grid.config(d.k_start, d.k_end, d.dk);
            check_out(&out)?;
            let result = match grid.method {
                Method::Tracer => trace_locus(&g, &cfg),
                Method::Exact => exact_locus(&g, &cfg),
            };
            emit(result, &out, &format!("root locus of {}", plant.display()))
        }
        Command::Contour { model, param, grid, out } => {
            let m = ParamModelSpec::load(&model)?.build()?;
            let i = m
                .index_of(&param)
                .ok_or_else(|| CliError::Usage(format!("unknown parameter {param}")))?;
            let h = m.params()[i].value;
            let (lo, hi) = (0.5 * h, 1.5 * h);
            let cfg = grid.config(lo, hi, (hi - lo).abs() / 200.0);
            check_out(&out)?;
            let result = match grid.method {
                Method::Tracer => trace_contour(&m, i, &cfg),
                Method::Exact => exact_contour(&m, i, &cfg),
            };
            emit(result, &out, &format!("contour locus over {param}"))
        }
        Command::Paramvel { model, digits } => cmd_paramvel(&model, Format { digits }),
        Command::Bench { reps, grid, out } => {
            let d = default_config();
            let cfg = grid.config(d.k_start, d.k_end, d.dk);
            cfg.validate().map_err(trace_err)?;
            let report = run_bench(reps, &cfg).map_err(|e| CliError::Usage(e.to_string()))?;
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write!(w, "{}", report.table())?;
            writeln!(
                w,
                "tracer faster on {} of {} cases (baseline: {})",
                report.tracer_wins(),
                report.rows.len(),
                report.baseline
            )?;
            if let Some(path) = out {
                std::fs::write(path, report.to_json())?;
            }
            Ok(())
        }
    }
}

fn check_out(out: &OutArgs) -> Result<(), CliError> {
    if out.svg && out.out.is_none() {
        return Err(CliError::Usage("--svg requires --out".into()));
    }
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map_or_else(|| "locus".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}{suffix}"))
}

/// Writes whatever locus is available (a partial one on interruption) and
/// reports the failure afterwards.
fn emit(result: Result<Locus<f64>, TraceError<f64>>, out: &OutArgs, title: &str) -> Result<(), CliError> {
    let (locus, failure) = match result {
        Ok(l) => (l, None),
        Err(TraceError::Interrupted { k, partial, source }) => {
            (*partial, Some(CliError::Numeric(format!("trace interrupted at k = {k}: {source}"))))
        }
        Err(e) => return Err(trace_err(e)),
    };
    let fmt = Format { digits: out.digits };
    match &out.out {
        Some(path) => {
            output::write_locus_csv(&locus, fmt, BufWriter::new(File::create(path)?))?;
            output::write_events(&locus.events, BufWriter::new(File::create(sibling(path, ".events.json"))?))?;
            if out.svg {
                std::fs::write(sibling(path, ".svg"), svg::render(&locus, title))?;
            }
        }
        None => {
            output::write_locus_csv(&locus, fmt, io::stdout().lock())?;
            for e in &locus.events {
                eprintln!("event k={} {}: {}", e.k, e.kind, e.detail);
            }
        }
    }
    match failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn cmd_residues(plant: &Path, k: f64, fmt: Format) -> Result<(), CliError> {
    let g = PlantSpec::load(plant)?.build()?;
    let set = g.closed_loop_residues(k).map_err(|e| CliError::Numeric(e.to_string()))?;
    let stdout = io::stdout();
    let mut w = stdout.lock();
    writeln!(w, "pole,multiplicity,residue,velocity")?;
    for e in &set.entries {
        let velocity = if e.multiplicity == 1 {
            fmt.complex(-e.residue)
        } else {
            "inf".to_string()
        };
        writeln!(
            w,
            "{},{},{},{}",
            fmt.complex(e.pole),
            e.multiplicity,
            fmt.complex(e.residue),
            velocity
        )?;
    }
    Ok(())
}

fn cmd_paramvel(model: &Path, fmt: Format) -> Result<(), CliError> {
    let m = ParamModelSpec::load(model)?.build()?;
    let fields = m.all_velocities().map_err(|e| CliError::Numeric(e.to_string()))?;
    let stdout = io::stdout();
    let mut w = stdout.lock();
    let mut header = vec!["pole".to_string()];
    header.extend(m.params().iter().map(|p| format!("d/d{}", p.name)));
    writeln!(w, "{}", header.join(","))?;
    let Some(first) = fields.first() else {
        return Ok(());
    };
    for entry in &first.entries {
        let mut row = vec![fmt.complex(entry.pole)];
        for field in &fields {
            let nearest = field
                .entries
                .iter()
                .min_by(|a, b| (a.pole - entry.pole).norm().total_cmp(&(b.pole - entry.pole).norm()))
                .expect("fields share the pole set");
            row.push(match nearest.velocity {
                Velocity::Finite(v) => fmt.complex(v),
                Velocity::Infinite { .. } => "inf".into(),
            });
        }
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Parses a complex number printed by [`Format::complex`].
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse().ok().map(|re| Complex64::new(re, 0.0));
    };
    // the imaginary sign is the last +/- not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'e' && bytes[i - 1] != b'E')?;
    let re: f64 = body[..split].parse().ok()?;
    let im: f64 = body[split..].parse().ok()?;
    Some(Complex64::new(re, im))
}
