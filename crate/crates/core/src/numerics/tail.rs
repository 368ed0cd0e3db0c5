//! Certified truncation of the infinite Szász and Baskakov series.
//!
//! With `t_v = basis_v(x) * E(v)` (basis weight times growth envelope) the
//! tail after index `N` is bounded by the ratio test:
//! `sum_{v > N} t_v <= t_{N+1} / (1 - r)`, where `r` bounds every ratio
//! `t_{v+1} / t_v` with `v >= N + 1`. Both ratios below are nonincreasing in
//! `v`, so `r` is the ratio at `v = N + 1`.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::{ln_binomial, ln_factorial};

use super::{GrowthEnvelope, Tolerance};
use crate::error::{Error, Result};

/// Largest truncation index the searches will consider.
pub const MAX_TAIL_INDEX: usize = 1_000_000;

// Relative slack on the float evaluation of the bound.
const ROUNDING_SLACK: f64 = 1.0 + 1e-9;

/// Terms `0..=index` are kept; the discarded tail, weighted by the envelope,
/// is at most `tail_bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationCertificate {
    pub index: usize,
    pub tail_bound: f64,
}

impl TruncationCertificate {
    pub fn exact(index: usize) -> Self {
        TruncationCertificate { index, tail_bound: 0.0 }
    }
}

fn check_point(x: f64) -> Result<()> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain {
            what: "x",
            value: x.to_string(),
            domain: "[0, inf)",
        });
    }
    Ok(())
}

fn envelope_ratio(env: &GrowthEnvelope, v: f64) -> f64 {
    match *env {
        GrowthEnvelope::Polynomial { degree, .. } => ((v + 2.0) / (v + 1.0)).powf(degree),
        GrowthEnvelope::Exponential { rate, .. } => rate.exp(),
    }
}

fn search(
    ln_term: impl Fn(usize) -> f64,
    ratio_at: impl Fn(usize) -> f64,
    tol: f64,
    what: &str,
) -> Result<TruncationCertificate> {
    for index in 0..=MAX_TAIL_INDEX {
        let r = ratio_at(index + 1);
        if r >= 1.0 {
            continue;
        }
        let bound = ln_term(index + 1).exp() / (1.0 - r) * ROUNDING_SLACK;
        if bound < tol {
            return Ok(TruncationCertificate {
                index,
                tail_bound: bound,
            });
        }
    }
    Err(Error::CannotCertify(format!(
        "{what}: tail bound not below {tol:e} within {MAX_TAIL_INDEX} terms"
    )))
}

/// Smallest `N` whose ratio bound certifies
/// `sum_{v > N} e^{-x} x^v / v! * E(v) < tol.abs_tol`.
pub fn szasz_tail_index(x: f64, envelope: &GrowthEnvelope, tol: Tolerance) -> Result<TruncationCertificate> {
    check_point(x)?;
    envelope.validate()?;
    if let GrowthEnvelope::Exponential { rate, .. } = *envelope {
        if rate >= 1.0 {
            return Err(Error::CannotCertify(format!(
                "exponential envelope rate {rate} >= 1 is too fast for the Szász tail bound"
            )));
        }
    }
    if x == 0.0 {
        return Ok(TruncationCertificate::exact(0));
    }
    let ln_x = x.ln();
    search(
        |v| -x + v as f64 * ln_x - ln_factorial(v as u64) + envelope.ln_bound(v as f64),
        |v| x / (v as f64 + 1.0) * envelope_ratio(envelope, v as f64),
        tol.abs_tol,
        "szasz",
    )
}

/// Smallest `N` whose ratio bound certifies
/// `sum_{v > N} b_{n,v}(x) * E(v) < tol.abs_tol`. Only polynomial envelopes
/// are accepted.
pub fn baskakov_tail_index(n: u32, x: f64, envelope: &GrowthEnvelope, tol: Tolerance) -> Result<TruncationCertificate> {
    check_point(x)?;
    envelope.validate()?;
    if n == 0 {
        return Err(Error::Domain {
            what: "n",
            value: "0".into(),
            domain: "positive integers",
        });
    }
    if let GrowthEnvelope::Exponential { .. } = envelope {
        return Err(Error::CannotCertify(
            "Baskakov series only admit polynomial growth envelopes".into(),
        ));
    }
    if x == 0.0 {
        return Ok(TruncationCertificate::exact(0));
    }
    let n = n as f64;
    let ln_q = x.ln() - x.ln_1p();
    let ln_one_minus_q = -x.ln_1p();
    let q = x / (1.0 + x);
    search(
        |v| {
            ln_binomial(n as u64 + v as u64 - 1, v as u64)
                + v as f64 * ln_q
                + n * ln_one_minus_q
                + envelope.ln_bound(v as f64)
        },
        |v| {
            let v = v as f64;
            (n + v) / (v + 1.0) * q * envelope_ratio(envelope, v)
        },
        tol.abs_tol,
        "baskakov",
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol(abs: f64) -> Tolerance {
        Tolerance::absolute(abs).unwrap()
    }

    fn poly(d: f64, c: f64) -> GrowthEnvelope {
        GrowthEnvelope::polynomial(d, c).unwrap()
    }

    fn poisson(v: usize, x: f64) -> f64 {
        (-x + v as f64 * x.ln() - ln_factorial(v as u64)).exp()
    }

    #[test]
    fn szasz_at_origin_needs_one_term() {
        for env in [poly(3.0, 2.0), GrowthEnvelope::exponential(0.9, 1.0).unwrap()] {
            assert_eq!(szasz_tail_index(0.0, &env, tol(1e-10)).unwrap().index, 0);
        }
    }

    #[test]
    fn szasz_unit_envelope_matches_partial_sum_complement() {
        let cert = szasz_tail_index(1.0, &poly(0.0, 1.0), tol(1e-10)).unwrap();
        let n = cert.index;
        // Tail summed forward from the small end to avoid cancellation.
        let tail: f64 = (n + 1..n + 200).map(|v| poisson(v, 1.0)).sum();
        assert!(tail < 1e-10);
        assert!(tail <= cert.tail_bound);
        let partial: f64 = (0..=n).map(|v| poisson(v, 1.0)).sum();
        assert!((1.0 - partial) < 1e-10 + 1e-15);
        // Minimality of the ratio bound.
        let prev = (-1.0 - ln_factorial(n as u64)).exp() / (1.0 - 1.0 / (n as f64 + 1.0));
        assert!(prev >= 1e-10);
    }

    #[test]
    fn szasz_exponential_envelope_residual() {
        let env = GrowthEnvelope::exponential(0.5, 1.0).unwrap();
        let cert = szasz_tail_index(4.0, &env, tol(1e-8)).unwrap();
        let residual: f64 = (cert.index + 1..=cert.index + 200)
            .map(|v| poisson(v, 4.0) * env.bound(v as f64))
            .sum();
        assert!(residual < 1e-8);
        assert!(residual <= cert.tail_bound);
    }

    #[test]
    fn szasz_rejects_fast_exponential_growth() {
        let env = GrowthEnvelope::exponential(1.0, 1.0).unwrap();
        assert!(matches!(
            szasz_tail_index(2.0, &env, tol(1e-8)),
            Err(Error::CannotCertify(_))
        ));
    }

    #[test]
    fn baskakov_geometric_tail() {
        let cert = baskakov_tail_index(1, 1.0, &poly(0.0, 1.0), tol(1e-10)).unwrap();
        // b_{1,v}(1) = 2^{-(v+1)}: tail after N is exactly 2^{-(N+1)}.
        let n = cert.index as i32;
        assert!(2f64.powi(-(n + 1)) < 1e-10);
        assert!(2f64.powi(-n) >= 1e-10);
        assert_eq!(cert.index, 33);
    }

    #[test]
    fn baskakov_polynomial_envelope_residual() {
        let env = poly(2.0, 1.0);
        let cert = baskakov_tail_index(3, 2.0, &env, tol(1e-8)).unwrap();
        let b = |v: usize| {
            (ln_binomial(3 + v as u64 - 1, v as u64) + v as f64 * (2.0f64 / 3.0).ln() - 3.0 * 3f64.ln()).exp()
        };
        let residual: f64 = (cert.index + 1..=cert.index + 2000)
            .map(|v| b(v) * env.bound(v as f64))
            .sum();
        assert!(residual < 1e-8);
        assert!(residual <= cert.tail_bound);
    }

    #[test]
    fn baskakov_origin_and_rejections() {
        assert_eq!(
            baskakov_tail_index(1, 0.0, &poly(0.0, 1.0), tol(1e-10)).unwrap().index,
            0
        );
        let exp = GrowthEnvelope::exponential(0.1, 1.0).unwrap();
        assert!(matches!(
            baskakov_tail_index(2, 1.0, &exp, tol(1e-8)),
            Err(Error::CannotCertify(_))
        ));
        assert!(baskakov_tail_index(2, -1.0, &poly(0.0, 1.0), tol(1e-8)).is_err());
        assert!(baskakov_tail_index(0, 1.0, &poly(0.0, 1.0), tol(1e-8)).is_err());
    }

    #[test]
    fn indices_are_monotone_in_tolerance() {
        let envs = [
            poly(0.0, 1.0),
            poly(2.0, 3.0),
            GrowthEnvelope::exponential(0.5, 1.0).unwrap(),
        ];
        for env in envs {
            for x in [0.1, 1.0, 3.0, 8.0] {
                let mut last = 0;
                for e in 1..14 {
                    let t = tol(10f64.powi(-e));
                    let n = szasz_tail_index(x, &env, t).unwrap().index;
                    assert!(n >= last);
                    last = n;
                }
            }
        }
        for n in 1..5 {
            for x in [0.25, 1.0, 4.0] {
                let mut last = 0;
                for e in 1..14 {
                    let idx = baskakov_tail_index(n, x, &poly(1.5, 2.0), tol(10f64.powi(-e)))
                        .unwrap()
                        .index;
                    assert!(idx >= last);
                    last = idx;
                }
            }
        }
    }
}
