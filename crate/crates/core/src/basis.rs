//! Bernstein, Mirakyan-Favard-Szász and Baskakov basis functions.
//!
//! Index convention: `p_{n,v} = 0` for `v > n`, so finite convolutions may run
//! past the degree without special cases.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::numerics::{
    baskakov_tail_index, szasz_tail_index, Field, GrowthEnvelope, Mode, Tolerance, TruncationCertificate,
};

/// Beyond this index Szász values are evaluated in log space.
const SZASZ_DIRECT_MAX: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OperatorKind {
    Bernstein { n: u32 },
    Szasz,
    Baskakov { n: u32 },
}

impl OperatorKind {
    pub fn bernstein(n: u32) -> Result<Self> {
        check_order(n)?;
        Ok(OperatorKind::Bernstein { n })
    }

    pub fn baskakov(n: u32) -> Result<Self> {
        check_order(n)?;
        Ok(OperatorKind::Baskakov { n })
    }

    pub fn name(&self) -> &'static str {
        match self {
            OperatorKind::Bernstein { .. } => "bernstein",
            OperatorKind::Szasz => "szasz",
            OperatorKind::Baskakov { .. } => "baskakov",
        }
    }

    pub fn order(&self) -> Option<u32> {
        match *self {
            OperatorKind::Bernstein { n } | OperatorKind::Baskakov { n } => Some(n),
            OperatorKind::Szasz => None,
        }
    }

    /// Whether basis rows are finite (no truncation needed).
    pub fn is_finite(&self) -> bool {
        matches!(self, OperatorKind::Bernstein { .. })
    }

    pub fn domain(&self) -> &'static str {
        match self {
            OperatorKind::Bernstein { .. } => "[0, 1]",
            _ => "[0, inf)",
        }
    }

    pub fn contains<T: Field>(&self, x: &T) -> bool {
        let nonneg = !x.is_negative();
        match self {
            OperatorKind::Bernstein { .. } => nonneg && *x <= T::one(),
            _ => nonneg && x.to_f64().is_finite(),
        }
    }

    pub fn check_point<T: Field>(&self, what: &'static str, x: &T) -> Result<()> {
        if let Some(n) = self.order() {
            check_order(n)?;
        }
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                what,
                value: x.to_string(),
                domain: self.domain(),
            })
        }
    }

    /// Denominator `d` of the node map `k -> k / d`.
    ///
    /// Bernstein nodes are `k / (2n)`. Szász and Baskakov nodes are the bare
    /// indices unless a rescaling `k / s` is requested.
    pub fn node_denominator(&self, rescale: Option<u32>) -> u64 {
        match *self {
            OperatorKind::Bernstein { n } => 2 * n as u64,
            _ => rescale.unwrap_or(1).max(1) as u64,
        }
    }

    /// Basis value `b_v(x)` for this family.
    pub fn basis<T: Field>(&self, v: u32, x: &T) -> Result<T> {
        match *self {
            OperatorKind::Bernstein { n } => bernstein_basis(n, v, x),
            OperatorKind::Szasz => require_float::<T>("szasz basis")
                .and_then(|_| szasz_basis(v, x.to_f64()))
                .and_then(T::from_f64),
            OperatorKind::Baskakov { n } => baskakov_basis(n, v, x),
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order() {
            Some(n) => write!(f, "{}(n={n})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

fn check_order(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain {
            what: "n",
            value: "0".into(),
            domain: "positive integers",
        });
    }
    Ok(())
}

pub(crate) fn require_float<T: Field>(what: &str) -> Result<()> {
    match T::MODE {
        Mode::Float => Ok(()),
        Mode::Exact => Err(Error::ExactUnsupported(what.to_string())),
    }
}

/// `C(n, v) x^v (1-x)^{n-v}`, zero for `v > n`.
pub fn bernstein_basis<T: Field>(n: u32, v: u32, x: &T) -> Result<T> {
    OperatorKind::bernstein(n)?.check_point("x", x)?;
    if v > n {
        return Ok(T::zero());
    }
    Ok(T::binomial(n as u64, v as u64) * x.powi(v) * (T::one() - x.clone()).powi(n - v))
}

/// `e^{-x} x^v / v!`.
pub fn szasz_basis(v: u32, x: f64) -> Result<f64> {
    OperatorKind::Szasz.check_point("x", &x)?;
    if x == 0.0 {
        return Ok(if v == 0 { 1.0 } else { 0.0 });
    }
    if v <= SZASZ_DIRECT_MAX {
        let mut term = (-x).exp();
        for i in 1..=v {
            term *= x / i as f64;
        }
        Ok(term)
    } else {
        Ok((-x + v as f64 * x.ln() - ln_factorial(v as u64)).exp())
    }
}

/// `C(n+v-1, v) x^v / (1+x)^{n+v}`, evaluated as `C(n+v-1, v) q^v (1-q)^n`
/// with `q = x / (1+x)` so neither power overflows.
pub fn baskakov_basis<T: Field>(n: u32, v: u32, x: &T) -> Result<T> {
    OperatorKind::baskakov(n)?.check_point("x", x)?;
    let denom = T::one() + x.clone();
    let q = x.clone() / denom.clone();
    let one_minus_q = T::one() / denom;
    Ok(T::binomial(n as u64 + v as u64 - 1, v as u64) * q.powi(v) * one_minus_q.powi(n))
}

/// One row `b_0(x), ..., b_N(x)` of a basis family.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisRow<T> {
    pub kind: OperatorKind,
    pub point: T,
    pub values: Vec<T>,
    /// Present for the infinite families: the kept length and the
    /// envelope-weighted mass of the discarded tail.
    pub certificate: Option<TruncationCertificate>,
}

impl<T: Field> BasisRow<T> {
    pub fn sum(&self) -> T {
        self.values.iter().cloned().fold(T::zero(), |acc, v| acc + v)
    }
}

/// Full Bernstein row, or a truncated Szász/Baskakov row whose discarded
/// tail (weighted by `envelope`) is certified below `tol.abs_tol`.
pub fn basis_row<T: Field>(
    kind: OperatorKind,
    x: &T,
    tol: Tolerance,
    envelope: &GrowthEnvelope,
) -> Result<BasisRow<T>> {
    kind.check_point("x", x)?;
    let (len, certificate) = match kind {
        OperatorKind::Bernstein { n } => (n as usize + 1, None),
        OperatorKind::Szasz => {
            require_float::<T>("szasz basis row")?;
            let cert = szasz_tail_index(x.to_f64(), envelope, tol)?;
            (cert.index + 1, Some(cert))
        }
        OperatorKind::Baskakov { n } => {
            let cert = baskakov_tail_index(n, x.to_f64(), envelope, tol)?;
            (cert.index + 1, Some(cert))
        }
    };
    let values = (0..len as u32).map(|v| kind.basis(v, x)).collect::<Result<Vec<T>>>()?;
    Ok(BasisRow {
        kind,
        point: x.clone(),
        values,
        certificate,
    })
}
