//! Scalars, tolerances, growth envelopes, quadrature and series tail bounds.

mod quadrature;
mod scalar;
mod tail;

pub use quadrature::{quadrature, quadrature_with, QuadratureOptions, QuadratureResult};
pub use scalar::{parse_rational, Accumulator, Field, Mode, Scalar};
pub use tail::{baskakov_tail_index, szasz_tail_index, TruncationCertificate, MAX_TAIL_INDEX};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::InvalidTolerance(format!(
                "abs_tol must be positive, got {abs_tol}"
            )));
        }
        if !(rel_tol >= 0.0 && rel_tol.is_finite()) {
            return Err(Error::InvalidTolerance(format!(
                "rel_tol must be nonnegative, got {rel_tol}"
            )));
        }
        Ok(Tolerance { abs_tol, rel_tol })
    }

    pub fn absolute(abs_tol: f64) -> Result<Self> {
        Tolerance::new(abs_tol, 0.0)
    }

    /// Divides the absolute budget into `parts` equal shares.
    pub fn split(&self, parts: usize) -> Tolerance {
        Tolerance {
            abs_tol: self.abs_tol / parts.max(1) as f64,
            rel_tol: self.rel_tol,
        }
    }

    /// Acceptance threshold for a quantity of size `magnitude`.
    pub fn threshold(&self, magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * magnitude.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_tol: 1e-10,
            rel_tol: 0.0,
        }
    }
}

/// Declared bound on `|f(t)|` for `t >= 0`.
///
/// `Polynomial` means `|f(t)| <= C (1 + t)^d`, `Exponential` means
/// `|f(t)| <= C e^{c t}`. Both bounds are nondecreasing in `t`, which the
/// tail certificates rely on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GrowthEnvelope {
    Polynomial { degree: f64, constant: f64 },
    Exponential { rate: f64, constant: f64 },
}

impl GrowthEnvelope {
    pub fn polynomial(degree: f64, constant: f64) -> Result<Self> {
        let env = GrowthEnvelope::Polynomial { degree, constant };
        env.validate()?;
        Ok(env)
    }

    pub fn exponential(rate: f64, constant: f64) -> Result<Self> {
        let env = GrowthEnvelope::Exponential { rate, constant };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        let (param, constant, name) = match *self {
            GrowthEnvelope::Polynomial { degree, constant } => (degree, constant, "degree"),
            GrowthEnvelope::Exponential { rate, constant } => (rate, constant, "rate"),
        };
        if !(constant > 0.0 && constant.is_finite()) {
            return Err(Error::InvalidEnvelope(format!(
                "constant must be positive, got {constant}"
            )));
        }
        if !(param >= 0.0 && param.is_finite()) {
            return Err(Error::InvalidEnvelope(format!(
                "{name} must be nonnegative, got {param}"
            )));
        }
        Ok(())
    }

    pub fn constant(&self) -> f64 {
        match *self {
            GrowthEnvelope::Polynomial { constant, .. } | GrowthEnvelope::Exponential { constant, .. } => constant,
        }
    }

    pub fn bound(&self, t: f64) -> f64 {
        self.ln_bound(t).exp()
    }

    pub fn ln_bound(&self, t: f64) -> f64 {
        match *self {
            GrowthEnvelope::Polynomial { degree, constant } => constant.ln() + degree * (1.0 + t).ln(),
            GrowthEnvelope::Exponential { rate, constant } => constant.ln() + rate * t,
        }
    }

    /// An envelope `E'` with `E(t + shift) <= E'(t)` for all `t >= 0`.
    pub fn shifted(&self, shift: f64) -> GrowthEnvelope {
        match *self {
            GrowthEnvelope::Polynomial { degree, constant } => GrowthEnvelope::Polynomial {
                degree,
                constant: constant * (1.0 + shift).powf(degree),
            },
            GrowthEnvelope::Exponential { rate, constant } => GrowthEnvelope::Exponential {
                rate,
                constant: constant * (rate * shift).exp(),
            },
        }
    }

    /// The same envelope with its constant multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> GrowthEnvelope {
        match *self {
            GrowthEnvelope::Polynomial { degree, constant } => GrowthEnvelope::Polynomial {
                degree,
                constant: constant * factor,
            },
            GrowthEnvelope::Exponential { rate, constant } => GrowthEnvelope::Exponential {
                rate,
                constant: constant * factor,
            },
        }
    }
}

/// `poly:degree=D,constant=C` or `exp:rate=R,constant=C`; `constant`
/// defaults to 1.
impl std::str::FromStr for GrowthEnvelope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let mut param = None;
        let mut constant = 1.0;
        let key = match name {
            "poly" | "polynomial" => "degree",
            "exp" | "exponential" => "rate",
            _ => return Err(Error::Parse(format!("unknown envelope '{name}'"))),
        };
        for kv in rest.split(',').filter(|kv| !kv.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{kv}'")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("invalid number '{v}'")))?;
            match k.trim() {
                "constant" | "c" => constant = v,
                k if k == key => param = Some(v),
                k => return Err(Error::Parse(format!("unknown envelope parameter '{k}'"))),
            }
        }
        let param = param.ok_or_else(|| Error::Parse(format!("envelope '{name}' needs {key}")))?;
        if key == "degree" {
            GrowthEnvelope::polynomial(param, constant)
        } else {
            GrowthEnvelope::exponential(param, constant)
        }
    }
}

impl Default for GrowthEnvelope {
    fn default() -> Self {
        GrowthEnvelope::Polynomial {
            degree: 0.0,
            constant: 1.0,
        }
    }
}
