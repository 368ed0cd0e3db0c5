//! `rasa` command-line driver.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage or certification error.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::rational::BigRational;
use serde::Serialize;

use crate::basis::OperatorKind;
use crate::catalog::FunctionSpec;
use crate::decomposition::{decomposition_weights, weight_truncation, WeightVector};
use crate::error::{Error, Result};
use crate::functional::EvalOptions;
use crate::numerics::{Field, GrowthEnvelope, Mode, Scalar, Tolerance, TruncationCertificate};
use crate::report::{default_mode, grid, scan, verify, Number, Scan, VerificationReport, VerifyRequest};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const CSV_HEADER: &str = "x,y,lhs,min_weight,status";

#[derive(Debug, Parser)]
#[command(
    name = "rasa",
    version,
    about = "Verify the quadratic convexity functional of Bernstein, Szász and Baskakov operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare the direct, grouped and decomposed values at one point.
    Verify(VerifyArgs),
    /// Print the decomposition weights w_k.
    Weights(WeightsArgs),
    /// Evaluate the functional on an (x, y) grid.
    Scan(ScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Bernstein,
    Szasz,
    Baskakov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Operator order (Bernstein and Baskakov).
    #[arg(long)]
    pub n: Option<u32>,
    /// Arithmetic mode; defaults to exact when the family and function allow it.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Absolute tolerance for residuals and truncation.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Sample f at k/s instead of k (Szász and Baskakov).
    #[arg(long)]
    pub node_rescale: Option<u32>,
    /// Growth bound on |f| replacing the default of --f:
    /// poly:degree=D,constant=C or exp:rate=R,constant=C.
    #[arg(long)]
    pub envelope: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Function: square, power:p=P, abs:c=C, hinge:c=C, exp:lambda=L, entropy, seq:a0,a1,...
    #[arg(long)]
    pub f: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
    /// Last index printed (Szász and Baskakov). Defaults to the index past
    /// which the remaining weights sum below the tolerance.
    #[arg(long)]
    pub k_max: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub grid_step: String,
    /// Upper end of the grid for Szász and Baskakov.
    #[arg(long, default_value = "4")]
    pub x_max: String,
}

fn operator(kind: KindArg, n: Option<u32>) -> Result<OperatorKind> {
    let need_n = |name: &str| n.ok_or_else(|| Error::Parse(format!("--n is required for --kind {name}")));
    match kind {
        KindArg::Bernstein => OperatorKind::bernstein(need_n("bernstein")?),
        KindArg::Baskakov => OperatorKind::baskakov(need_n("baskakov")?),
        KindArg::Szasz => Ok(OperatorKind::Szasz),
    }
}

fn function(text: &str, common: &Common) -> Result<FunctionSpec> {
    let f: FunctionSpec = text.parse()?;
    match &common.envelope {
        Some(env) => f.with_envelope(env.parse()?),
        None => Ok(f),
    }
}

fn options(common: &Common) -> Result<EvalOptions> {
    if common.node_rescale == Some(0) {
        return Err(Error::Parse("--node-rescale must be positive".into()));
    }
    Ok(EvalOptions {
        tol: Tolerance::absolute(common.tol)?,
        node_rescale: common.node_rescale,
    })
}

fn sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> io::Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()
}

fn opt_to_string(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn write_rows(out: &Option<PathBuf>, rows: impl Iterator<Item = [String; 5]>) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    w.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()
}

fn report_row(r: &VerificationReport) -> [String; 5] {
    let show = |n: &Number| n.exact.clone().unwrap_or_else(|| n.decimal.clone());
    [
        show(&r.x),
        show(&r.y),
        opt_to_string(r.lhs()),
        opt_to_string(r.min_weight.as_ref().map(|w| w.value)),
        r.status.to_string(),
    ]
}

fn run_verify(a: &VerifyArgs) -> Result<i32> {
    let kind = operator(a.common.kind, a.common.n)?;
    let f = function(&a.f, &a.common)?;
    let mode = a.common.mode.map(Mode::from).unwrap_or_else(|| default_mode(kind, &f));
    let report = verify(&VerifyRequest {
        kind,
        f,
        x: a.x.clone(),
        y: a.y.clone(),
        mode,
        opts: options(&a.common)?,
    })?;
    match a.common.format {
        Format::Json => write_json(&a.common.out, &report),
        Format::Csv => write_rows(&a.common.out, std::iter::once(report_row(&report))),
    }
    .map_err(io_error)?;
    Ok(if let Some(e) = &report.error {
        eprintln!("rasa: {e}");
        EXIT_USAGE
    } else if report.status.is_pass() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}

#[derive(Debug, Serialize)]
struct WeightRow {
    k: usize,
    w: String,
    provenance: crate::decomposition::Provenance,
}

#[derive(Debug, Serialize)]
struct WeightTable {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<u32>,
    mode: Mode,
    x: Number,
    y: Number,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation: Option<TruncationCertificate>,
    error_bound: f64,
    rows: Vec<WeightRow>,
}

fn table<T: Field>(
    w: WeightVector<T>,
    mode: Mode,
    x: Number,
    y: Number,
    cert: Option<TruncationCertificate>,
) -> WeightTable {
    WeightTable {
        kind: w.kind.name().to_string(),
        n: w.kind.order(),
        mode,
        x,
        y,
        truncation: cert,
        error_bound: w.error_bound,
        rows: w
            .weights
            .iter()
            .enumerate()
            .map(|(k, v)| WeightRow {
                k,
                w: v.to_string(),
                provenance: w.provenance,
            })
            .collect(),
    }
}

fn run_weights(a: &WeightsArgs) -> Result<i32> {
    let kind = operator(a.common.kind, a.common.n)?;
    let mode = a.common.mode.map(Mode::from).unwrap_or(if kind == OperatorKind::Szasz {
        Mode::Float
    } else {
        Mode::Exact
    });
    let tol = Tolerance::absolute(a.common.tol)?;
    let xs = Scalar::parse(&a.x, mode)?;
    let ys = Scalar::parse(&a.y, mode)?;
    kind.check_point("x", &xs.to_f64())?;
    kind.check_point("y", &ys.to_f64())?;
    let cert = match (kind, a.k_max) {
        (OperatorKind::Bernstein { .. }, _) => None,
        (_, Some(k)) => Some(TruncationCertificate {
            index: k,
            tail_bound: f64::NAN,
        }),
        _ => weight_truncation(kind, xs.to_f64(), ys.to_f64(), &GrowthEnvelope::default(), tol)?,
    };
    let len = cert.map_or(0, |c| c.index + 1);
    let cert = cert.filter(|c| !c.tail_bound.is_nan());
    let (xn, yn) = (Number::input(&a.x, &xs), Number::input(&a.y, &ys));
    let t = match mode {
        Mode::Exact => {
            let (x, y) = (BigRational::try_from_scalar(&xs)?, BigRational::try_from_scalar(&ys)?);
            table(decomposition_weights(kind, &x, &y, len, tol)?, mode, xn, yn, cert)
        }
        Mode::Float => {
            let (x, y) = (f64::try_from_scalar(&xs)?, f64::try_from_scalar(&ys)?);
            table(decomposition_weights(kind, &x, &y, len, tol)?, mode, xn, yn, cert)
        }
    };
    match a.common.format {
        Format::Json => write_json(&a.common.out, &t),
        Format::Csv => (|| -> csv::Result<()> {
            let mut w = csv::Writer::from_writer(sink(&a.common.out)?);
            for r in &t.rows {
                w.serialize(r)?;
            }
            Ok(w.flush()?)
        })()
        .map_err(|e: csv::Error| io::Error::other(e.to_string())),
    }
    .map_err(io_error)?;
    Ok(EXIT_PASS)
}

fn run_scan(a: &ScanArgs) -> Result<i32> {
    let kind = operator(a.common.kind, a.common.n)?;
    let f = function(&a.f, &a.common)?;
    let mode = a.common.mode.map(Mode::from).unwrap_or_else(|| default_mode(kind, &f));
    let max = if kind.is_finite() { "1" } else { a.x_max.as_str() };
    let axis = grid(&a.grid_step, max, mode)?;
    let Scan { summary, rows } = scan(kind, &f, mode, options(&a.common)?, &axis)?;
    match a.common.format {
        Format::Json => write_json(
            &a.common.out,
            &Scan {
                summary: summary.clone(),
                rows,
            },
        ),
        Format::Csv => {
            let written = write_rows(
                &a.common.out,
                rows.iter().map(|r| {
                    [
                        r.x.clone(),
                        r.y.clone(),
                        opt_to_string(r.lhs),
                        opt_to_string(r.min_weight),
                        r.status.to_string(),
                    ]
                }),
            );
            eprintln!("{}", serde_json::to_string(&summary).expect("summary serializes"));
            written
        }
    }
    .map_err(io_error)?;
    Ok(if summary.certification_failures > 0 {
        EXIT_USAGE
    } else if summary.violations > 0 {
        EXIT_FAIL
    } else {
        EXIT_PASS
    })
}

fn io_error(e: io::Error) -> Error {
    Error::Parse(format!("cannot write output: {e}"))
}

/// Runs the parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Verify(a) => run_verify(a),
        Command::Weights(a) => run_weights(a),
        Command::Scan(a) => run_scan(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("rasa: {e}");
        EXIT_USAGE
    })
}

pub fn main() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            code
        }
    }
}
