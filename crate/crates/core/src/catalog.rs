//! Convex test functions with growth envelopes, explicit value sequences, and
//! second-difference convexity checks on equispaced grids.
//!
//! Parse syntax: `square`, `power:p=3`, `abs:c=0.3`, `hinge:c=1/2`,
//! `exp:lambda=0.5`, `entropy`, `seq:0,1,4,9`.

use std::fmt;
use std::str::FromStr;

use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::decomposition::second_difference;
use crate::error::{Error, Result};
use crate::numerics::{parse_rational, Field, GrowthEnvelope, Mode};

#[derive(Debug, Clone, PartialEq)]
pub enum ConvexFn {
    /// `t^2`
    Square,
    /// `t^p`, `p >= 1`
    Power { p: BigRational },
    /// `|t - c|`
    Abs { c: BigRational },
    /// `max(0, t - c)`
    Hinge { c: BigRational },
    /// `e^{lambda t}`, `lambda >= 0`
    Exp { lambda: f64 },
    /// `t log t`, extended by 0 at the origin
    NegEntropy,
}

impl ConvexFn {
    pub fn name(&self) -> &'static str {
        match self {
            ConvexFn::Square => "square",
            ConvexFn::Power { .. } => "power",
            ConvexFn::Abs { .. } => "abs",
            ConvexFn::Hinge { .. } => "hinge",
            ConvexFn::Exp { .. } => "exp",
            ConvexFn::NegEntropy => "entropy",
        }
    }

    /// Whether rational arguments give rational values.
    pub fn is_rational_valued(&self) -> bool {
        match self {
            ConvexFn::Square | ConvexFn::Abs { .. } | ConvexFn::Hinge { .. } => true,
            ConvexFn::Power { p } => p.is_integer(),
            ConvexFn::Exp { .. } | ConvexFn::NegEntropy => false,
        }
    }

    /// A bound `|f(t)| <= E(t)` valid on `[0, inf)`.
    pub fn envelope(&self) -> GrowthEnvelope {
        let shift = |c: &BigRational| Field::to_f64(&Signed::abs(c)).max(1.0);
        match self {
            ConvexFn::Square | ConvexFn::NegEntropy => GrowthEnvelope::Polynomial {
                degree: 2.0,
                constant: 1.0,
            },
            ConvexFn::Power { p } => GrowthEnvelope::Polynomial {
                degree: Field::to_f64(p),
                constant: 1.0,
            },
            ConvexFn::Abs { c } | ConvexFn::Hinge { c } => GrowthEnvelope::Polynomial {
                degree: 1.0,
                constant: shift(c),
            },
            ConvexFn::Exp { lambda } => GrowthEnvelope::Exponential {
                rate: *lambda,
                constant: 1.0,
            },
        }
    }

    fn eval<T: Field>(&self, t: &T) -> Result<T> {
        let float_only = || -> Result<f64> {
            match T::MODE {
                Mode::Float => Ok(t.to_f64()),
                Mode::Exact => Err(Error::ExactUnsupported(format!("function '{}'", self))),
            }
        };
        match self {
            ConvexFn::Square => Ok(t.clone() * t.clone()),
            ConvexFn::Power { p } => match p.to_integer().to_u32() {
                Some(e) if p.is_integer() => Ok(t.powi(e)),
                _ => T::from_f64(float_only()?.powf(Field::to_f64(p))),
            },
            ConvexFn::Abs { c } => Ok((t.clone() - T::from_rational(c)).abs()),
            ConvexFn::Hinge { c } => {
                let d = t.clone() - T::from_rational(c);
                Ok(if d.is_negative() { T::zero() } else { d })
            }
            ConvexFn::Exp { lambda } => T::from_f64((lambda * float_only()?).exp()),
            ConvexFn::NegEntropy => {
                let s = float_only()?;
                T::from_f64(if s == 0.0 { 0.0 } else { s * s.ln() })
            }
        }
    }
}

impl fmt::Display for ConvexFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConvexFn::Power { p } => write!(f, "power:p={p}"),
            ConvexFn::Abs { c } => write!(f, "abs:c={c}"),
            ConvexFn::Hinge { c } => write!(f, "hinge:c={c}"),
            ConvexFn::Exp { lambda } => write!(f, "exp:lambda={lambda}"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind {
    Named(ConvexFn),
    /// Explicit values `a_0, a_1, ...` indexed by node number. Need not be
    /// convex.
    Sequence(Vec<BigRational>),
}

/// A function sampled by the functionals, with its declared growth envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    pub kind: FunctionKind,
    pub envelope: GrowthEnvelope,
}

impl FunctionSpec {
    pub fn named(f: ConvexFn) -> Self {
        let envelope = f.envelope();
        FunctionSpec {
            kind: FunctionKind::Named(f),
            envelope,
        }
    }

    pub fn sequence(values: Vec<BigRational>) -> Self {
        let max = values
            .iter()
            .map(|v| Field::to_f64(&Signed::abs(v)))
            .fold(0.0f64, f64::max);
        FunctionSpec {
            kind: FunctionKind::Sequence(values),
            envelope: GrowthEnvelope::Polynomial {
                degree: 0.0,
                constant: if max > 0.0 { max } else { 1.0 },
            },
        }
    }

    pub fn square() -> Self {
        FunctionSpec::named(ConvexFn::Square)
    }

    pub fn with_envelope(mut self, envelope: GrowthEnvelope) -> Result<Self> {
        envelope.validate()?;
        self.envelope = envelope;
        Ok(self)
    }

    pub fn is_rational_valued(&self) -> bool {
        match &self.kind {
            FunctionKind::Named(f) => f.is_rational_valued(),
            FunctionKind::Sequence(_) => true,
        }
    }

    /// Catalog functions are convex by construction; sequences are convex
    /// when all their second differences are nonnegative.
    pub fn is_convex(&self) -> bool {
        match &self.kind {
            FunctionKind::Named(_) => true,
            FunctionKind::Sequence(a) => {
                a.len() < 3 || second_difference(a).is_ok_and(|d| d.iter().all(|v| !Signed::is_negative(v)))
            }
        }
    }

    /// Value at `t >= 0`. For sequences `t` must be an integer index.
    pub fn evaluate<T: Field>(&self, t: &T) -> Result<T> {
        if t.is_negative() {
            return Err(Error::Domain {
                what: "t",
                value: t.to_string(),
                domain: "[0, inf)",
            });
        }
        match &self.kind {
            FunctionKind::Named(f) => f.eval(t),
            FunctionKind::Sequence(values) => {
                let idx = t.to_f64();
                if idx.fract() != 0.0 || T::from_f64(idx)? != *t {
                    return Err(Error::NonIntegerNode(t.to_string()));
                }
                index(values, idx as usize)
            }
        }
    }

    /// Value at node `k / denominator`; sequences are read at index `k`.
    pub fn sample<T: Field>(&self, k: usize, denominator: u64) -> Result<T> {
        match &self.kind {
            FunctionKind::Named(f) => f.eval(&T::from_ratio(k as i64, denominator as i64)),
            FunctionKind::Sequence(values) => index(values, k),
        }
    }

    /// Samples at nodes `0..len`.
    pub fn samples<T: Field>(&self, len: usize, denominator: u64) -> Result<Vec<T>> {
        (0..len).map(|k| self.sample(k, denominator)).collect()
    }
}

fn index<T: Field>(values: &[BigRational], k: usize) -> Result<T> {
    values.get(k).map(T::from_rational).ok_or(Error::SequenceTooShort {
        needed: k + 1,
        have: values.len(),
    })
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FunctionKind::Named(g) => write!(f, "{g}"),
            FunctionKind::Sequence(values) => {
                f.write_str("seq:")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        if name == "seq" {
            let values = rest.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
            return Ok(FunctionSpec::sequence(values));
        }
        let params: Vec<(&str, &str)> = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split(',')
                .map(|kv| {
                    kv.split_once('=')
                        .map(|(k, v)| (k.trim(), v.trim()))
                        .ok_or_else(|| Error::Parse(format!("expected key=value, got '{kv}'")))
                })
                .collect::<Result<_>>()?
        };
        let get = |key: &str| -> Result<Option<BigRational>> {
            for (k, v) in &params {
                if *k == key {
                    return parse_rational(v).map(Some);
                }
            }
            Ok(None)
        };
        let allowed: &[&str] = match name {
            "square" | "entropy" | "negentropy" => &[],
            "power" => &["p"],
            "abs" | "hinge" => &["c"],
            "exp" => &["lambda"],
            _ => return Err(Error::Parse(format!("unknown function '{name}'"))),
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(Error::Parse(format!("unknown parameter '{k}' for '{name}'")));
        }
        let f = match name {
            "square" => ConvexFn::Square,
            "entropy" | "negentropy" => ConvexFn::NegEntropy,
            "power" => {
                let p = get("p")?.ok_or_else(|| Error::Parse("power needs p".into()))?;
                if p < <BigRational as One>::one() {
                    return Err(Error::Parse(format!("power needs p >= 1, got {p}")));
                }
                ConvexFn::Power { p }
            }
            "abs" => ConvexFn::Abs {
                c: get("c")?.unwrap_or_else(<BigRational as Zero>::zero),
            },
            "hinge" => ConvexFn::Hinge {
                c: get("c")?.unwrap_or_else(<BigRational as Zero>::zero),
            },
            "exp" => {
                let lambda = get("lambda")?.map_or(1.0, |l| Field::to_f64(&l));
                if lambda < 0.0 {
                    return Err(Error::Parse(format!("exp needs lambda >= 0, got {lambda}")));
                }
                ConvexFn::Exp { lambda }
            }
            _ => unreachable!(),
        };
        Ok(FunctionSpec::named(f))
    }
}

/// Default catalog used by the sweeps: one representative per family.
pub fn catalog() -> Vec<FunctionSpec> {
    [
        "square",
        "power:p=3",
        "power:p=3/2",
        "abs:c=0.37",
        "hinge:c=1/2",
        "exp:lambda=0.5",
        "entropy",
    ]
    .iter()
    .map(|s| s.parse().expect("catalog entries parse"))
    .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityCheck {
    pub convex: bool,
    /// Smallest `k` with `a_{k+2} - 2a_{k+1} + a_k < 0`.
    pub first_violation: Option<usize>,
}

/// Checks `Δ²a_k >= 0` for `a_k = f(nodes[k])` on an increasing equispaced
/// grid. Float grids may deviate from equal spacing and from zero second
/// differences by rounding-level amounts.
pub fn check_convex_on_grid<T: Field>(f: &FunctionSpec, nodes: &[T]) -> Result<ConvexityCheck> {
    if nodes.len() < 3 {
        return Err(Error::InvalidGrid(format!(
            "need at least 3 nodes, got {}",
            nodes.len()
        )));
    }
    let step = nodes[1].clone() - nodes[0].clone();
    if step.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidGrid("nodes must be increasing".into()));
    }
    for w in nodes.windows(2) {
        let d = w[1].clone() - w[0].clone();
        let equal = match T::MODE {
            Mode::Exact => d == step,
            Mode::Float => (d.to_f64() - step.to_f64()).abs() <= 1e-9 * step.to_f64().abs(),
        };
        if !equal {
            return Err(Error::InvalidGrid("nodes must be equally spaced".into()));
        }
    }
    let values = nodes.iter().map(|t| f.evaluate(t)).collect::<Result<Vec<T>>>()?;
    let slack = match T::MODE {
        Mode::Exact => 0.0,
        Mode::Float => 8.0 * f64::EPSILON * values.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max),
    };
    let first_violation = second_difference(&values)?
        .iter()
        .position(|d| d.to_f64() < -slack || (slack == 0.0 && d.is_negative()));
    Ok(ConvexityCheck {
        convex: first_violation.is_none(),
        first_violation,
    })
}
