//! Verification reports: all three routes at one point, plus grid scans.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::OperatorKind;
use crate::catalog::FunctionSpec;
use crate::decomposition::{rasa_rhs, second_difference, WeightVector};
use crate::error::{Error, Result};
use crate::functional::{coefficient_vector, rasa_lhs_direct, rasa_lhs_grouped, EvalOptions, Evaluation};
use crate::numerics::{parse_rational, Field, Mode, Scalar, Tolerance, TruncationCertificate};

use num::rational::BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    ExactPass,
    TolPass,
    Fail,
}

impl Status {
    pub fn is_pass(self) -> bool {
        self != Status::Fail
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::ExactPass => "ExactPass",
            Status::TolPass => "TolPass",
            Status::Fail => "Fail",
        })
    }
}

/// A number rendered as a decimal, with the exact rational when one exists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Number {
    pub decimal: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(skip)]
    pub value: f64,
}

impl Number {
    pub fn float(v: f64) -> Self {
        Number {
            decimal: v.to_string(),
            exact: None,
            value: v,
        }
    }

    pub fn of<T: Field>(v: &T) -> Self {
        match v.clone().into_scalar() {
            Scalar::Exact(q) => Number {
                decimal: Field::to_f64(&q).to_string(),
                exact: Some(q.to_string()),
                value: Field::to_f64(&q),
            },
            Scalar::Float(f) => Number::float(f),
        }
    }

    /// A user input: the exact form is kept whenever the text is a rational.
    pub fn input(text: &str, parsed: &Scalar) -> Self {
        let value = parsed.to_f64();
        Number {
            decimal: value.to_string(),
            exact: parse_rational(text).ok().map(|q| q.to_string()),
            value,
        }
    }
}

/// Rounding allowance for a float sum of `len` terms whose absolute values
/// add up to `magnitude`. The constant covers basis evaluation in log space.
fn rounding_allowance(len: usize, magnitude: f64) -> f64 {
    8.0 * (len as f64 + 64.0) * f64::EPSILON * magnitude
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    pub f: String,
    pub mode: Mode,
    pub tol: Tolerance,
    pub x: Number,
    pub y: Number,
    pub lhs_direct: Option<Number>,
    pub lhs_grouped: Option<Number>,
    pub rhs_decomposed: Option<Number>,
    pub residual_direct_vs_grouped: Option<Number>,
    pub residual_lhs_vs_rhs: Option<Number>,
    pub min_weight: Option<Number>,
    /// Truncation of the functional (direct and grouped routes).
    pub truncation: Option<TruncationCertificate>,
    /// Truncation of the decomposition sum.
    pub weight_truncation: Option<TruncationCertificate>,
    /// Largest deviation from zero the residual and sign checks accepted.
    pub allowance: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl VerificationReport {
    /// The grouped value, used for sign checks and scans.
    pub fn lhs(&self) -> Option<f64> {
        self.lhs_grouped.as_ref().map(|v| v.value)
    }
}

/// Inputs of a single verification.
#[derive(Debug, Clone)]
pub struct VerifyRequest {
    pub kind: OperatorKind,
    pub f: FunctionSpec,
    pub x: String,
    pub y: String,
    pub mode: Mode,
    pub opts: EvalOptions,
}

/// Mode used when none is requested: exact whenever the family and the
/// function both allow it.
pub fn default_mode(kind: OperatorKind, f: &FunctionSpec) -> Mode {
    if kind.is_finite() && f.is_rational_valued() {
        Mode::Exact
    } else {
        Mode::Float
    }
}

/// Truncation and quadrature failures become part of the report; anything
/// else is a usage error.
fn is_certification(e: &Error) -> bool {
    matches!(e, Error::CannotCertify(_) | Error::Quadrature { .. })
}

struct Routes<T> {
    direct: Evaluation<T>,
    grouped: Evaluation<T>,
    rhs: Evaluation<T>,
    weights: WeightVector<T>,
    magnitude: f64,
    len: usize,
}

fn routes<T: Field>(kind: OperatorKind, f: &FunctionSpec, x: &T, y: &T, opts: &EvalOptions) -> Result<Routes<T>> {
    let direct = rasa_lhs_direct(kind, f, x, y, opts)?;
    let grouped = rasa_lhs_grouped(kind, f, x, y, opts)?;
    let (rhs, weights) = rasa_rhs(kind, f, x, y, opts)?;
    let len = match kind {
        OperatorKind::Bernstein { n } => 2 * n as usize + 1,
        _ => grouped.certificate.map_or(1, |c| c.index + 1),
    };
    let magnitude = if T::MODE == Mode::Float {
        let den = kind.node_denominator(opts.node_rescale);
        let xf = x.to_f64();
        let yf = y.to_f64();
        let a: Vec<f64> = f.samples(len, den)?;
        let xx = coefficient_vector(kind, &xf, &xf, len)?.coeffs;
        let yy = coefficient_vector(kind, &yf, &yf, len)?.coeffs;
        let xy = coefficient_vector(kind, &xf, &yf, len)?.coeffs;
        let lhs_mag: f64 = (0..len).map(|k| (xx[k] + yy[k] + 2.0 * xy[k]) * a[k].abs()).sum();
        let b: Vec<f64> = f.samples(weights.weights.len() + 2, den)?;
        let rhs_mag: f64 = second_difference(&b)?
            .iter()
            .zip(&weights.weights)
            .map(|(d, w)| d.abs() * w.to_f64().abs())
            .sum();
        lhs_mag + rhs_mag
    } else {
        0.0
    };
    let len = len.max(weights.weights.len());
    Ok(Routes {
        direct,
        grouped,
        rhs,
        weights,
        magnitude,
        len,
    })
}

fn fill<T: Field>(report: &mut VerificationReport, r: Routes<T>, convex: bool) {
    let res_dg = r.direct.value.clone() - r.grouped.value.clone();
    let res_lr = r.grouped.value.clone() - r.rhs.value.clone();
    let min_w = r.weights.min_weight();
    let status = match T::MODE {
        Mode::Exact => {
            let ok = res_dg.is_zero()
                && res_lr.is_zero()
                && min_w.as_ref().is_none_or(|w| !w.is_negative())
                && (!convex || !r.grouped.value.is_negative());
            report.allowance = 0.0;
            if ok {
                Status::ExactPass
            } else {
                Status::Fail
            }
        }
        Mode::Float => {
            let rounding = rounding_allowance(r.len, r.magnitude);
            let base = report.tol.threshold(r.magnitude) + rounding;
            let allow_dg = base + r.direct.error_bound + r.grouped.error_bound;
            let allow_lr = base + r.grouped.error_bound + r.rhs.error_bound;
            let w_max = r.weights.weights.iter().map(|w| w.to_f64().abs()).fold(0.0, f64::max);
            let allow_w = r.weights.error_bound + rounding_allowance(r.weights.weights.len(), w_max);
            let allow_sign = base + r.grouped.error_bound;
            report.allowance = allow_dg.max(allow_lr);
            let ok = res_dg.to_f64().abs() <= allow_dg
                && res_lr.to_f64().abs() <= allow_lr
                && min_w.as_ref().is_none_or(|w| w.to_f64() >= -allow_w)
                && (!convex || r.grouped.value.to_f64() >= -allow_sign);
            if ok {
                Status::TolPass
            } else {
                Status::Fail
            }
        }
    };
    report.lhs_direct = Some(Number::of(&r.direct.value));
    report.lhs_grouped = Some(Number::of(&r.grouped.value));
    report.rhs_decomposed = Some(Number::of(&r.rhs.value));
    report.residual_direct_vs_grouped = Some(Number::of(&res_dg));
    report.residual_lhs_vs_rhs = Some(Number::of(&res_lr));
    report.min_weight = min_w.as_ref().map(Number::of);
    report.truncation = r.grouped.certificate;
    report.weight_truncation = r.rhs.certificate;
    report.status = status;
}

/// Evaluates the direct, grouped and decomposed routes at `(x, y)`.
///
/// Parse, domain and mode errors are returned as `Err`. Certification
/// failures produce a `Fail` report carrying the error message.
pub fn verify(req: &VerifyRequest) -> Result<VerificationReport> {
    let xs = Scalar::parse(&req.x, req.mode)?;
    let ys = Scalar::parse(&req.y, req.mode)?;
    let mut report = VerificationReport {
        kind: req.kind.name().to_string(),
        n: req.kind.order(),
        f: req.f.to_string(),
        mode: req.mode,
        tol: req.opts.tol,
        x: Number::input(&req.x, &xs),
        y: Number::input(&req.y, &ys),
        lhs_direct: None,
        lhs_grouped: None,
        rhs_decomposed: None,
        residual_direct_vs_grouped: None,
        residual_lhs_vs_rhs: None,
        min_weight: None,
        truncation: None,
        weight_truncation: None,
        allowance: 0.0,
        status: Status::Fail,
        error: None,
    };
    let convex = req.f.is_convex();
    let outcome = match req.mode {
        Mode::Exact => {
            let x = BigRational::try_from_scalar(&xs)?;
            let y = BigRational::try_from_scalar(&ys)?;
            routes(req.kind, &req.f, &x, &y, &req.opts).map(|r| fill(&mut report, r, convex))
        }
        Mode::Float => {
            let x = f64::try_from_scalar(&xs)?;
            let y = f64::try_from_scalar(&ys)?;
            routes(req.kind, &req.f, &x, &y, &req.opts).map(|r| fill(&mut report, r, convex))
        }
    };
    match outcome {
        Ok(()) => Ok(report),
        Err(e) if is_certification(&e) => {
            report.error = Some(e.to_string());
            Ok(report)
        }
        Err(e) => Err(e),
    }
}

/// Grid `0, step, 2 step, ...` up to and including `max`.
pub fn grid(step: &str, max: &str, mode: Mode) -> Result<Vec<String>> {
    let step_q = parse_rational(step)?;
    let max_q = parse_rational(max)?;
    let zero = <BigRational as Field>::zero();
    if step_q <= zero {
        return Err(Error::InvalidGrid(format!("grid step must be positive, got {step}")));
    }
    if max_q < zero {
        return Err(Error::InvalidGrid(format!("grid bound must be nonnegative, got {max}")));
    }
    let count = (max_q.clone() / step_q.clone()).floor();
    let count: usize = Field::to_f64(&count) as usize;
    if count > 100_000 {
        return Err(Error::InvalidGrid(format!("{} points per axis is too many", count + 1)));
    }
    Ok((0..=count)
        .map(|i| {
            let q = step_q.clone() * BigRational::from_ratio(i as i64, 1);
            match mode {
                Mode::Exact => q.to_string(),
                Mode::Float => Field::to_f64(&q).to_string(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub x: String,
    pub y: String,
    pub lhs: Option<f64>,
    pub min_weight: Option<f64>,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    pub f: String,
    pub mode: Mode,
    pub tol: Tolerance,
    pub points: usize,
    pub min_lhs: Option<f64>,
    pub argmin: Option<(String, String)>,
    /// Points whose report status is `Fail`.
    pub violations: usize,
    /// Points whose truncation could not be certified (counted in `violations`).
    pub certification_failures: usize,
    pub max_truncation_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scan {
    pub summary: ScanSummary,
    pub rows: Vec<ScanRow>,
}

/// Verifies every grid point in parallel. Rows come back in grid order.
pub fn scan(kind: OperatorKind, f: &FunctionSpec, mode: Mode, opts: EvalOptions, axis: &[String]) -> Result<Scan> {
    let points: Vec<(&String, &String)> = axis.iter().flat_map(|x| axis.iter().map(move |y| (x, y))).collect();
    let reports: Vec<VerificationReport> = points
        .par_iter()
        .map(|(x, y)| {
            verify(&VerifyRequest {
                kind,
                f: f.clone(),
                x: (*x).clone(),
                y: (*y).clone(),
                mode,
                opts,
            })
        })
        .collect::<Result<_>>()?;
    let rows: Vec<ScanRow> = points
        .iter()
        .zip(&reports)
        .map(|((x, y), r)| ScanRow {
            x: (*x).clone(),
            y: (*y).clone(),
            lhs: r.lhs(),
            min_weight: r.min_weight.as_ref().map(|w| w.value),
            status: r.status,
        })
        .collect();
    let argmin = rows
        .iter()
        .filter_map(|r| r.lhs.map(|v| (v, r)))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    let summary = ScanSummary {
        kind: kind.name().to_string(),
        n: kind.order(),
        f: f.to_string(),
        mode,
        tol: opts.tol,
        points: rows.len(),
        min_lhs: argmin.map(|(v, _)| v),
        argmin: argmin.map(|(_, r)| (r.x.clone(), r.y.clone())),
        violations: rows.iter().filter(|r| r.status == Status::Fail).count(),
        certification_failures: reports.iter().filter(|r| r.error.is_some()).count(),
        max_truncation_index: reports.iter().filter_map(|r| r.truncation.map(|c| c.index)).max(),
    };
    Ok(Scan { summary, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(kind: OperatorKind, f: &str, x: &str, y: &str, mode: Mode, tol: f64) -> VerifyRequest {
        VerifyRequest {
            kind,
            f: f.parse().unwrap(),
            x: x.into(),
            y: y.into(),
            mode,
            opts: EvalOptions::new(Tolerance::absolute(tol).unwrap()),
        }
    }

    #[test]
    fn exact_bernstein_square_passes_with_zero_residuals() {
        let r = verify(&request(
            OperatorKind::Bernstein { n: 3 },
            "square",
            "1/4",
            "3/4",
            Mode::Exact,
            1e-10,
        ))
        .unwrap();
        assert_eq!(r.status, Status::ExactPass);
        assert_eq!(r.residual_direct_vs_grouped.unwrap().exact.as_deref(), Some("0"));
        assert_eq!(r.residual_lhs_vs_rhs.unwrap().exact.as_deref(), Some("0"));
        assert_eq!(r.x.exact.as_deref(), Some("1/4"));
    }

    #[test]
    fn diagonal_gives_zero() {
        let r = verify(&request(
            OperatorKind::Bernstein { n: 2 },
            "seq:0,0,1,0,0",
            "0.3",
            "0.3",
            Mode::Exact,
            1e-10,
        ))
        .unwrap();
        assert_eq!(r.lhs_direct.unwrap().exact.as_deref(), Some("0"));
        assert_eq!(r.status, Status::ExactPass);
    }

    #[test]
    fn nonconvex_sequence_is_not_a_failure_by_sign() {
        // Negative functional, but the input is not convex so only the
        // identities are checked.
        let r = verify(&request(
            OperatorKind::Bernstein { n: 2 },
            "seq:0,0,1,0,0",
            "0",
            "1",
            Mode::Exact,
            1e-10,
        ))
        .unwrap();
        assert!(r.lhs().unwrap() < 0.0);
        assert_eq!(r.status, Status::ExactPass);
    }

    #[test]
    fn szasz_exp_tol_pass() {
        let r = verify(&request(
            OperatorKind::Szasz,
            "exp:lambda=0.5",
            "1",
            "2",
            Mode::Float,
            1e-8,
        ))
        .unwrap();
        assert_eq!(r.status, Status::TolPass, "{r:?}");
        assert!(r.lhs().unwrap() >= -1e-8);
        assert!(r.truncation.is_some() && r.weight_truncation.is_some());
    }

    #[test]
    fn exact_mode_rejects_infinite_families() {
        let e = verify(&request(OperatorKind::Szasz, "square", "1", "2", Mode::Exact, 1e-8)).unwrap_err();
        assert!(matches!(e, Error::ExactUnsupported(_)));
    }

    #[test]
    fn uncertifiable_envelope_is_recorded() {
        let r = verify(&request(
            OperatorKind::Szasz,
            "exp:lambda=2",
            "1",
            "2",
            Mode::Float,
            1e-8,
        ))
        .unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.error.is_some());
    }

    #[test]
    fn grid_points() {
        assert_eq!(grid("0.25", "1", Mode::Exact).unwrap(), ["0", "1/4", "1/2", "3/4", "1"]);
        assert_eq!(grid("0.3", "1", Mode::Float).unwrap().len(), 4);
        assert!(grid("0", "1", Mode::Float).is_err());
    }

    #[test]
    fn bernstein_n1_scan_minimum_on_diagonal() {
        let kind = OperatorKind::Bernstein { n: 1 };
        let axis = grid("0.25", "1", Mode::Exact).unwrap();
        let s = scan(
            kind,
            &FunctionSpec::square(),
            Mode::Exact,
            EvalOptions::default(),
            &axis,
        )
        .unwrap();
        assert_eq!(s.summary.points, 25);
        assert_eq!(s.summary.violations, 0);
        assert_eq!(s.summary.min_lhs, Some(0.0));
        let (x, y) = s.summary.argmin.unwrap();
        assert_eq!(x, y);
    }
}
