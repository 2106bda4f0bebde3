//! The `siegel` command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::boundary::{run_table_case, trace_csv, CaseId, CaseReport, RunOptions, FORM_TOL};
use crate::contraction::{
    admissible_interval, mainformula_gap, mu_star, psi_apply, psi_blocks, ContractionReport,
    DEFAULT_DELTA_G,
};
use crate::error::Error;
use crate::sampling::{random_point, sub_rng};
use crate::siegel::SiegelPoint;
use crate::verify::{run_all, VerifyReport};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "siegel",
    version,
    about = "Midpoint contraction and boundary limits on the Siegel half-space of degree 2"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Contraction ratio of a pair of points.
    Mu(MuArgs),
    /// Contraction ratios of rotated sample pairs over a lambda grid.
    Sweep(SweepArgs),
    /// Witness or falsifier run for a boundary case.
    Boundary(BoundaryArgs),
    /// Run every property suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct MuArgs {
    /// JSON file holding {"X": [[..],[..]], "Y": [[..],[..]]}.
    #[arg(long)]
    pub z1: PathBuf,
    #[arg(long)]
    pub z2: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Repeat for several exponents.
    #[arg(long = "p", default_values_t = [1.0])]
    pub p: Vec<f64>,
    /// Defaults to the lower end of the admissible interval.
    #[arg(long)]
    pub lambda_min: Option<f64>,
    /// Defaults to the upper end of the admissible interval.
    #[arg(long)]
    pub lambda_max: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub lambda_steps: usize,
    #[arg(long, env = "SIEGEL_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Sample pairs per grid point.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    /// Pair of sign patterns such as "++,+-".
    #[arg(long)]
    pub case: String,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Seed of the falsifier sample for impossible cases.
    #[arg(long, env = "SIEGEL_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Tolerance of the limit-form tests.
    #[arg(long, default_value_t = FORM_TOL)]
    pub tol: f64,
    /// Writes the report here and the trace next to it with a .csv extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, env = "SIEGEL_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Plain text when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Failure of a command, mapped onto the exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Numeric(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        2
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Reads and validates a point.
pub fn parse_point(text: &str) -> crate::Result<SiegelPoint> {
    SiegelPoint::from_json(text)
}

fn read_point(path: &Path) -> Result<SiegelPoint, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_point(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn check_p(p: f64) -> Result<(), CliError> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "--p must be positive and finite, got {p}"
        )))
    }
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(io_err(path)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(io_err(Path::new("<stdout>"))),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Numeric(Error::Internal(e.to_string()));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Numeric(Error::Internal(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv of ascii fields"))
}

pub fn mu_csv(r: &ContractionReport) -> Result<String, CliError> {
    let header = [
        "p",
        "mu_star",
        "mu_raw",
        "wp1",
        "wp2",
        "r1",
        "r2",
        "mu_polar",
        "range_residual",
        "eq_residual",
    ];
    let row = vec![
        num(r.p),
        num(r.mu_star),
        num(r.mu_raw),
        num(r.wp1),
        num(r.wp2),
        num(r.r1),
        num(r.r2),
        r.mu_polar.map_or(String::new(), num),
        num(r.range_residual),
        num(r.eq_residual),
    ];
    csv_text(&header, &[row])
}

/// One row of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub p: f64,
    pub mu_star_mean: f64,
    pub mu_star_max: f64,
    /// Largest `|lhs - rhs|` of the midpoint formula at `t = 0`.
    pub gap_max: f64,
}

/// `mu*` of `Psi_lambda`-rotated copies of seeded pairs, the same pairs at every grid point.
pub fn sweep(args: &SweepArgs) -> Result<Vec<SweepRow>, CliError> {
    for &p in &args.p {
        check_p(p)?;
    }
    if args.samples == 0 || args.lambda_steps == 0 {
        return Err(CliError::Config(
            "--samples and --lambda-steps must be positive".into(),
        ));
    }
    let (lo, hi) = admissible_interval(&DEFAULT_DELTA_G);
    let a = args.lambda_min.unwrap_or(lo);
    let b = args.lambda_max.unwrap_or(hi);
    for (name, v) in [("--lambda-min", a), ("--lambda-max", b)] {
        if !(lo..=hi).contains(&v) {
            return Err(CliError::Config(format!(
                "{name} {v} is outside the admissible interval [{lo}, {hi}]"
            )));
        }
    }
    if a > b {
        return Err(CliError::Config(format!(
            "--lambda-min {a} exceeds --lambda-max {b}"
        )));
    }
    let grid: Vec<f64> = if args.lambda_steps == 1 {
        vec![a]
    } else {
        let n = args.lambda_steps - 1;
        (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
    };
    let mut rng = sub_rng(args.seed, 60);
    let pairs: Vec<(SiegelPoint, SiegelPoint)> = (0..args.samples)
        .map(|_| (random_point(&mut rng), random_point(&mut rng)))
        .collect();
    let mut rows = Vec::new();
    for &lambda in &grid {
        let rot = psi_blocks(lambda, &DEFAULT_DELTA_G)?;
        let moved: Vec<(SiegelPoint, SiegelPoint)> = pairs
            .iter()
            .map(|(z1, z2)| Ok((psi_apply(&rot, z1)?, psi_apply(&rot, z2)?)))
            .collect::<crate::Result<_>>()?;
        for &p in &args.p {
            let (mut sum, mut max, mut gap) = (0.0, f64::NEG_INFINITY, 0.0f64);
            for ((z1, z2), (m1, m2)) in pairs.iter().zip(&moved) {
                let mu = mu_star(m1, m2, p)?.mu_star;
                sum += mu;
                max = max.max(mu);
                let (l, r) = mainformula_gap(z1, z2, &rot, p, 0.0)?;
                gap = gap.max((l - r).abs());
            }
            rows.push(SweepRow {
                lambda,
                p,
                mu_star_mean: sum / args.samples as f64,
                mu_star_max: max,
                gap_max: gap,
            });
        }
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String, CliError> {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                num(r.lambda),
                num(r.p),
                num(r.mu_star_mean),
                num(r.mu_star_max),
                num(r.gap_max),
            ]
        })
        .collect();
    csv_text(
        &["lambda", "p", "mu_star_mean", "mu_star_max", "gap_max"],
        &body,
    )
}

/// Witness run for a feasible case, falsifier sample `seed` otherwise.
pub fn boundary_report(args: &BoundaryArgs) -> Result<CaseReport, CliError> {
    check_p(args.p)?;
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(CliError::Config(format!(
            "--tol must be positive, got {}",
            args.tol
        )));
    }
    let case: CaseId = args
        .case
        .parse()
        .map_err(|e: Error| CliError::Config(e.to_string()))?;
    Ok(run_table_case(
        case,
        args.seed,
        args.p,
        &RunOptions { form_tol: args.tol },
    )?)
}

fn verify_csv(report: &VerifyReport) -> Result<String, CliError> {
    let mut rows = Vec::new();
    for s in &report.suites {
        for c in &s.checks {
            let status = match (c.diagnostic, c.passed()) {
                (true, _) => "DIAG",
                (false, true) => "PASS",
                (false, false) => "FAIL",
            };
            rows.push(vec![
                s.name.to_string(),
                c.name.clone(),
                status.to_string(),
                num(c.worst),
                num(c.limit),
                c.samples.to_string(),
                c.errors.to_string(),
            ]);
        }
    }
    csv_text(
        &[
            "suite", "check", "status", "worst", "limit", "samples", "errors",
        ],
        &rows,
    )
}

/// Runs a parsed command; `Ok` carries the exit code.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<u8, CliError> {
    match &cli.command {
        Command::Mu(a) => {
            check_p(a.p)?;
            let (z1, z2) = (read_point(&a.z1)?, read_point(&a.z2)?);
            let report = mu_star(&z1, &z2, a.p)?;
            let text = match a.format {
                Format::Json => to_json(&report),
                Format::Csv => mu_csv(&report)?,
            };
            emit(&a.out, &text, stdout)?;
            Ok(0)
        }
        Command::Sweep(a) => {
            let rows = sweep(a)?;
            emit(&a.out, &sweep_csv(&rows)?, stdout)?;
            Ok(0)
        }
        Command::Boundary(a) => {
            let report = boundary_report(a)?;
            match &a.out {
                Some(path) => {
                    let csv_path = if path.extension().is_some_and(|e| e == "csv") {
                        path.with_extension("trace.csv")
                    } else {
                        path.with_extension("csv")
                    };
                    fs::write(path, to_json(&report)).map_err(io_err(path))?;
                    fs::write(&csv_path, trace_csv(&report)?).map_err(io_err(&csv_path))?;
                }
                None => {
                    let text = match a.format {
                        Format::Json => to_json(&report),
                        Format::Csv => trace_csv(&report)?,
                    };
                    emit(&None, &text, stdout)?;
                }
            }
            Ok(0)
        }
        Command::Verify(a) => {
            if a.samples == 0 {
                return Err(CliError::Config("--samples must be positive".into()));
            }
            let report = run_all(a.seed, a.samples);
            let text = match a.format {
                None => report.render(),
                Some(Format::Json) => to_json(&report),
                Some(Format::Csv) => verify_csv(&report)?,
            };
            emit(&a.out, &text, stdout)?;
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}
