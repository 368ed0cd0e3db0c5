//! The quadratic convexity functional
//!
//! `L(f; x, y) = sum_i sum_j [b_i(x) b_j(x) + b_i(y) b_j(y) - 2 b_i(x) b_j(y)] f(node(i + j))`
//!
//! evaluated two ways: literally as a double sum, and grouped by `k = i + j`
//! through the convolution coefficients `c_k(x, y) = sum_i b_i(x) b_{k-i}(y)`.
//!
//! For the infinite families both routes keep indices up to a certified `K`.
//! Every discarded pair has `i + j > K`, and `sum_{i+j=k} b_i(x) b_j(y)` is the
//! law of a sum of two independent basis-distributed variables, which is
//! stochastically dominated by the same law at `max(x, y)`. The envelope is
//! nondecreasing, so the discarded part of either route is at most four times
//! the envelope-weighted tail of `s_k(2 max(x, y))` (Szász) or
//! `b_{2n,k}(max(x, y))` (Baskakov).

use num::rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::basis::{require_float, szasz_basis, OperatorKind};
use crate::catalog::FunctionSpec;
use crate::error::Result;
use crate::exact;
use crate::numerics::{baskakov_tail_index, szasz_tail_index, Accumulator, Field, Tolerance, TruncationCertificate};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalOptions {
    pub tol: Tolerance,
    /// Szász/Baskakov only: sample `f` at `k / s` instead of `k`.
    pub node_rescale: Option<u32>,
}

impl EvalOptions {
    pub fn new(tol: Tolerance) -> Self {
        EvalOptions {
            tol,
            node_rescale: None,
        }
    }
}

impl From<Tolerance> for EvalOptions {
    fn from(tol: Tolerance) -> Self {
        EvalOptions::new(tol)
    }
}

/// A computed value plus, for truncated series, a bound on what was dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<T> {
    pub value: T,
    pub certificate: Option<TruncationCertificate>,
    /// Bound on |true value - computed value| from truncation and
    /// quadrature, excluding float rounding. Zero for finite exact routes.
    pub error_bound: f64,
}

/// `c_k(x, y)` for `k = 0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector<T> {
    pub kind: OperatorKind,
    pub x: T,
    pub y: T,
    pub coeffs: Vec<T>,
}

/// `C_k = c_k(x, x) + c_k(y, y) - 2 c_k(x, y)`, the weight of `f(node(k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedForm<T> {
    pub kind: OperatorKind,
    pub coeffs: Vec<T>,
}

fn row<T: Field>(kind: OperatorKind, x: &T, len: usize) -> Result<Vec<T>> {
    (0..len as u32).map(|v| kind.basis(v, x)).collect()
}

fn convolve<T: Field>(a: &[T], b: &[T], len: usize) -> Vec<T> {
    (0..len)
        .map(|k| {
            (0..=k)
                .filter(|&i| i < a.len() && k - i < b.len())
                .fold(T::zero(), |acc, i| acc + a[i].clone() * b[k - i].clone())
        })
        .collect()
}

/// `c_k(x, y) = sum_{i=0}^{k} b_i(x) b_{k-i}(y)`. Szász uses the closed form
/// `(x+y)^k e^{-(x+y)} / k!`; the other families convolve basis values.
pub fn convolution_coeff<T: Field>(kind: OperatorKind, k: usize, x: &T, y: &T) -> Result<T> {
    kind.check_point("x", x)?;
    kind.check_point("y", y)?;
    match kind {
        OperatorKind::Szasz => {
            require_float::<T>("szasz convolution")?;
            T::from_f64(szasz_basis(k as u32, x.to_f64() + y.to_f64())?)
        }
        _ => (0..=k as u32).try_fold(T::zero(), |acc, i| {
            Ok(acc + kind.basis(i, x)? * kind.basis(k as u32 - i, y)?)
        }),
    }
}

/// `c_0(x, y), ..., c_{len-1}(x, y)`.
pub fn coefficient_vector<T: Field>(kind: OperatorKind, x: &T, y: &T, len: usize) -> Result<CoefficientVector<T>> {
    kind.check_point("x", x)?;
    kind.check_point("y", y)?;
    let coeffs = match kind {
        OperatorKind::Szasz => (0..len)
            .map(|k| convolution_coeff(kind, k, x, y))
            .collect::<Result<_>>()?,
        _ => {
            let rx = row(kind, x, len)?;
            let ry = row(kind, y, len)?;
            convolve(&rx, &ry, len)
        }
    };
    Ok(CoefficientVector {
        kind,
        x: x.clone(),
        y: y.clone(),
        coeffs,
    })
}

/// `C_0, ..., C_{len-1}`.
pub fn grouped_form<T: Field>(kind: OperatorKind, x: &T, y: &T, len: usize) -> Result<GroupedForm<T>> {
    if let (OperatorKind::Bernstein { n }, Some(qx), Some(qy)) = (kind, exact::as_rational(x), exact::as_rational(y)) {
        kind.check_point("x", x)?;
        kind.check_point("y", y)?;
        let coeffs = exact::bernstein_grouped(n as usize, &qx, &qy, len);
        return Ok(GroupedForm {
            kind,
            coeffs: coeffs.iter().map(T::from_rational).collect(),
        });
    }
    let two = T::from_i64(2);
    let xx = coefficient_vector(kind, x, x, len)?.coeffs;
    let yy = coefficient_vector(kind, y, y, len)?.coeffs;
    let xy = coefficient_vector(kind, x, y, len)?.coeffs;
    let coeffs = xx
        .into_iter()
        .zip(yy)
        .zip(xy)
        .map(|((a, b), c)| a + b - two.clone() * c)
        .collect();
    Ok(GroupedForm { kind, coeffs })
}

/// Largest index `K` kept by the truncated routes, with the certified bound
/// on the discarded part. Bernstein needs no truncation (`K = 2n`).
pub fn functional_truncation(
    kind: OperatorKind,
    f: &FunctionSpec,
    x: f64,
    y: f64,
    tol: Tolerance,
) -> Result<Option<TruncationCertificate>> {
    let quarter = tol.split(4);
    let top = x.max(y);
    let cert = match kind {
        OperatorKind::Bernstein { .. } => return Ok(None),
        OperatorKind::Szasz => szasz_tail_index(2.0 * top, &f.envelope, quarter)?,
        OperatorKind::Baskakov { n } => baskakov_tail_index(2 * n, top, &f.envelope, quarter)?,
    };
    Ok(Some(TruncationCertificate {
        index: cert.index,
        tail_bound: 4.0 * cert.tail_bound,
    }))
}

fn prepare<T: Field>(
    kind: OperatorKind,
    f: &FunctionSpec,
    x: &T,
    y: &T,
    opts: &EvalOptions,
) -> Result<(usize, Option<TruncationCertificate>)> {
    kind.check_point("x", x)?;
    kind.check_point("y", y)?;
    if !kind.is_finite() {
        require_float::<T>(&format!("{} functional", kind.name()))?;
    }
    let cert = functional_truncation(kind, f, x.to_f64(), y.to_f64(), opts.tol)?;
    let last = match (kind, cert) {
        (OperatorKind::Bernstein { n }, _) => n as usize,
        (_, Some(c)) => c.index,
        (_, None) => unreachable!("infinite kinds carry a certificate"),
    };
    Ok((last, cert))
}

/// The double sum over `i, j` taken literally.
pub fn rasa_lhs_direct<T: Field>(
    kind: OperatorKind,
    f: &FunctionSpec,
    x: &T,
    y: &T,
    opts: &EvalOptions,
) -> Result<Evaluation<T>> {
    let (last, certificate) = prepare(kind, f, x, y, opts)?;
    if let (OperatorKind::Bernstein { n }, Some(qx), Some(qy)) = (kind, exact::as_rational(x), exact::as_rational(y)) {
        let values: Vec<BigRational> = f.samples(2 * n as usize + 1, kind.node_denominator(None))?;
        return Ok(Evaluation {
            value: T::from_rational(&exact::bernstein_direct(n as usize, &qx, &qy, &values)),
            certificate,
            error_bound: 0.0,
        });
    }
    let len = last + 1;
    // Truncated series keep the pairs with `i + j <= K`, the same terms as
    // the grouped route.
    let top = if kind.is_finite() { 2 * last } else { last };
    let rx = row(kind, x, len)?;
    let ry = row(kind, y, len)?;
    let values: Vec<T> = f.samples(top + 1, kind.node_denominator(opts.node_rescale))?;
    let two = T::from_i64(2);
    let mut total = Accumulator::new();
    for i in 0..len {
        for j in 0..len.min(top + 1 - i) {
            let bracket = rx[i].clone() * rx[j].clone() + ry[i].clone() * ry[j].clone()
                - two.clone() * rx[i].clone() * ry[j].clone();
            total.add(bracket * values[i + j].clone());
        }
    }
    Ok(Evaluation {
        value: total.value(),
        certificate,
        error_bound: certificate.map_or(0.0, |c| c.tail_bound),
    })
}

/// `sum_k C_k f(node(k))`.
pub fn rasa_lhs_grouped<T: Field>(
    kind: OperatorKind,
    f: &FunctionSpec,
    x: &T,
    y: &T,
    opts: &EvalOptions,
) -> Result<Evaluation<T>> {
    let (last, certificate) = prepare(kind, f, x, y, opts)?;
    let len = match kind {
        OperatorKind::Bernstein { n } => 2 * n as usize + 1,
        _ => last + 1,
    };
    let grouped = grouped_form(kind, x, y, len)?;
    let values: Vec<T> = f.samples(len, kind.node_denominator(opts.node_rescale))?;
    let value = grouped
        .coeffs
        .into_iter()
        .zip(values)
        .map(|(c, v)| c * v)
        .collect::<Accumulator<T>>()
        .value();
    Ok(Evaluation {
        value,
        certificate,
        error_bound: certificate.map_or(0.0, |c| c.tail_bound),
    })
}
