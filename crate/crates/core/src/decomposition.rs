//! Second-difference decomposition of the convexity functional.
//!
//! With `g(z) = (G_x(z) - G_y(z))^2 / z^2`, where `G_x` is the generating
//! function of the basis row at `x`, and `w_k` the Taylor coefficients of `g`
//! at `z = -1`,
//!
//! `L(a; x, y) = sum_k (a_{k+2} - 2 a_{k+1} + a_k) w_k`
//!
//! holds for every sequence `a`. Nonnegative `w_k` make the functional
//! nonnegative on convex data.
//!
//! Weight routes:
//! - Bernstein: explicit multiplicity formula; oracle by exact polynomial
//!   arithmetic and a Taylor shift to `z = -1`.
//! - Szász: 1-D reduction of the double integral `∫∫ (u+v)^k e^{-(u+v)}` by
//!   quadrature; oracle by power-series division.
//! - Baskakov: explicit multiplicity formula over Baskakov rows of orders
//!   `2..=2n`; oracle by power-series division.

use serde::{Deserialize, Serialize};

use crate::basis::{baskakov_basis, require_float, szasz_basis, OperatorKind};
use crate::catalog::FunctionSpec;
use crate::error::{Error, Result};
use crate::exact;
use crate::functional::{EvalOptions, Evaluation};
use crate::numerics::{
    baskakov_tail_index, quadrature, szasz_tail_index, Accumulator, Field, GrowthEnvelope, Tolerance,
    TruncationCertificate,
};
use crate::poly::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ExplicitFormula,
    DerivativeOracle,
    IntegralQuadrature,
    SeriesOracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T> {
    pub kind: OperatorKind,
    pub x: T,
    pub y: T,
    pub weights: Vec<T>,
    pub provenance: Provenance,
    /// Largest per-entry error estimate (quadrature only; zero otherwise).
    pub error_bound: f64,
}

impl<T: Field> WeightVector<T> {
    pub fn min_weight(&self) -> Option<T> {
        self.weights.iter().cloned().reduce(|a, b| if b < a { b } else { a })
    }

    pub fn get(&self, k: usize) -> T {
        self.weights.get(k).cloned().unwrap_or_else(T::zero)
    }
}

/// `a_{k+2} - 2 a_{k+1} + a_k` for `k = 0..len-2`.
pub fn second_difference<T: Field>(a: &[T]) -> Result<Vec<T>> {
    if a.len() < 3 {
        return Err(Error::SequenceTooShort {
            needed: 3,
            have: a.len(),
        });
    }
    let two = T::from_i64(2);
    Ok(a.windows(3)
        .map(|w| w[2].clone() - two.clone() * w[1].clone() + w[0].clone())
        .collect())
}

/// Number of pairs `(i, i')` with `i + i' = j` and `0 <= i, i' <= n - 1`.
pub fn pair_multiplicity(n: u32, j: u32) -> u32 {
    j.min(2 * n - 2 - j) + 1
}

/// The multiplicity with the `+ 1` missing. It vanishes at the ends of the
/// range and gives `w_0 = 0` for `n = 1`; kept only to reproduce that
/// discrepancy.
pub fn pair_multiplicity_uncorrected(n: u32, j: u32) -> u32 {
    j.min(2 * n - 2 - j)
}

/// `[C(m,i) x^i (1-x)^{m-i}]_{i=0..=m}`, defined for every `m >= 0`.
fn binomial_row<T: Field>(m: usize, x: &T, one_minus_x: &T) -> Vec<T> {
    let xp = powers(x, m);
    let yp = powers(one_minus_x, m);
    (0..=m)
        .map(|i| T::binomial(m as u64, i as u64) * xp[i].clone() * yp[m - i].clone())
        .collect()
}

fn powers<T: Field>(x: &T, m: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(m + 1);
    out.push(T::one());
    for i in 0..m {
        out.push(out[i].clone() * x.clone());
    }
    out
}

fn convolve_into<T: Field>(acc: &mut [T], a: &[T], b: &[T], scale: &T) {
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        let sa = scale.clone() * ai.clone();
        for (j, bj) in b.iter().enumerate() {
            if i + j >= acc.len() {
                break;
            }
            acc[i + j] = acc[i + j].clone() + sa.clone() * bj.clone();
        }
    }
}

fn bernstein_weights_with<T: Field>(
    n: u32,
    x: &T,
    y: &T,
    multiplicity: fn(u32, u32) -> u32,
) -> Result<WeightVector<T>> {
    let kind = OperatorKind::bernstein(n)?;
    kind.check_point("x", x)?;
    kind.check_point("y", y)?;
    let top = 2 * n as usize - 2;
    if let (Some(qx), Some(qy)) = (exact::as_rational(x), exact::as_rational(y)) {
        let weights = exact::bernstein_weights(top, &qx, &qy, |j| multiplicity(n, j as u32));
        return Ok(WeightVector {
            kind,
            x: x.clone(),
            y: y.clone(),
            weights: weights.iter().map(T::from_rational).collect(),
            provenance: Provenance::ExplicitFormula,
            error_bound: 0.0,
        });
    }
    let (one_x, one_y) = (T::one() - x.clone(), T::one() - y.clone());
    let rows_x: Vec<Vec<T>> = (0..=top).map(|m| binomial_row(m, x, &one_x)).collect();
    let rows_y: Vec<Vec<T>> = (0..=top).map(|m| binomial_row(m, y, &one_y)).collect();
    let mut acc = vec![T::zero(); top + 1];
    for j in 0..=top {
        let mult = multiplicity(n, j as u32);
        if mult == 0 {
            continue;
        }
        convolve_into(&mut acc, &rows_x[j], &rows_y[top - j], &T::from_i64(mult as i64));
    }
    let d = x.clone() - y.clone();
    let d2 = d.clone() * d;
    Ok(WeightVector {
        kind,
        x: x.clone(),
        y: y.clone(),
        weights: acc.into_iter().map(|w| d2.clone() * w).collect(),
        provenance: Provenance::ExplicitFormula,
        error_bound: 0.0,
    })
}

/// `w_k = (x-y)^2 sum_{j=0}^{2n-2} (min{j, 2n-2-j} + 1) sum_i p_{j,i}(x) p_{2n-2-j,k-i}(y)`
/// for `k = 0..=2n-2`.
pub fn bernstein_weights<T: Field>(n: u32, x: &T, y: &T) -> Result<WeightVector<T>> {
    bernstein_weights_with(n, x, y, pair_multiplicity)
}

/// [`bernstein_weights`] with [`pair_multiplicity_uncorrected`]. Wrong by
/// construction; used to demonstrate the off-by-one.
pub fn bernstein_weights_uncorrected<T: Field>(n: u32, x: &T, y: &T) -> Result<WeightVector<T>> {
    bernstein_weights_with(n, x, y, pair_multiplicity_uncorrected)
}

/// `w_k = (x-y)^2 sum_{j=0}^{2n-2} (min{j, 2n-2-j} + 1) sum_i b_{2n-j,i}(x) b_{j+2,k-i}(y)`
/// for `k = 0..len`. Uses that `(1 - xz)^{-m}` expands around `z = -1` with
/// coefficients `b_{m,i}(x)`.
pub fn baskakov_weights<T: Field>(n: u32, x: &T, y: &T, len: usize) -> Result<WeightVector<T>> {
    let kind = OperatorKind::baskakov(n)?;
    kind.check_point("x", x)?;
    kind.check_point("y", y)?;
    let top = 2 * n - 2;
    let row = |m: u32, t: &T| -> Result<Vec<T>> { (0..len as u32).map(|i| baskakov_basis(m, i, t)).collect() };
    // Orders 2..=2n are needed for both points.
    let rows_x: Vec<Vec<T>> = (2..=2 * n).map(|m| row(m, x)).collect::<Result<_>>()?;
    let rows_y: Vec<Vec<T>> = (2..=2 * n).map(|m| row(m, y)).collect::<Result<_>>()?;
    let mut acc = vec![T::zero(); len];
    for j in 0..=top {
        let mult = T::from_i64(pair_multiplicity(n, j) as i64);
        let ox = (2 * n - j - 2) as usize;
        let oy = j as usize;
        convolve_into(&mut acc, &rows_x[ox], &rows_y[oy], &mult);
    }
    let d = x.clone() - y.clone();
    let d2 = d.clone() * d;
    Ok(WeightVector {
        kind,
        x: x.clone(),
        y: y.clone(),
        weights: acc.into_iter().map(|w| d2.clone() * w).collect(),
        provenance: Provenance::ExplicitFormula,
        error_bound: 0.0,
    })
}

/// `w_k = (1/k!) ∫∫_{[m,M]^2} (u+v)^k e^{-(u+v)} du dv` for `k = 0..len`,
/// reduced to `∫_{2m}^{2M} s_k(s) min(s - 2m, 2M - s) ds` and integrated
/// separately on each side of the kink at `s = m + M`.
pub fn szasz_weights(x: f64, y: f64, len: usize, tol: Tolerance) -> Result<WeightVector<f64>> {
    let kind = OperatorKind::Szasz;
    kind.check_point("x", &x)?;
    kind.check_point("y", &y)?;
    let (m, big) = (x.min(y), x.max(y));
    let mut weights = Vec::with_capacity(len);
    let mut error_bound: f64 = 0.0;
    let half = tol.split(2);
    for k in 0..len {
        if m == big {
            weights.push(0.0);
            continue;
        }
        let pmf = |s: f64| szasz_basis(k as u32, s).unwrap_or(0.0);
        let rising = quadrature(|s| pmf(s) * (s - 2.0 * m), 2.0 * m, m + big, half)?;
        let falling = quadrature(|s| pmf(s) * (2.0 * big - s), m + big, 2.0 * big, half)?;
        weights.push(rising.value + falling.value);
        error_bound = error_bound.max(rising.error_estimate + falling.error_estimate);
    }
    Ok(WeightVector {
        kind,
        x,
        y,
        weights,
        provenance: Provenance::IntegralQuadrature,
        error_bound,
    })
}

/// Taylor coefficients of `g = h / (1 - u)^2` where `h = d^2` and
/// `d_i = G_x[i] - G_y[i]` are the basis-row differences in powers of
/// `u = z + 1`.
fn series_weights<T: Field>(dx: Vec<T>, dy: Vec<T>) -> Vec<T> {
    let len = dx.len();
    let d: Vec<T> = dx.into_iter().zip(dy).map(|(a, b)| a - b).collect();
    let h: Vec<T> = (0..len)
        .map(|k| (0..=k).fold(T::zero(), |acc, i| acc + d[i].clone() * d[k - i].clone()))
        .collect();
    (0..len)
        .map(|k| (0..=k).fold(T::zero(), |acc, m| acc + T::from_i64(m as i64 + 1) * h[k - m].clone()))
        .collect()
}

/// Independent route to the weights `w_0..w_{len-1}`.
///
/// Bernstein: expands `((1+xz)^n - (1+yz)^n)^2`, divides by `z^2` and shifts
/// to `z = -1`, all in exact coefficient arithmetic. Szász and Baskakov: the
/// squared difference of the basis generating functions as a power series in
/// `z + 1`, divided by `z^2 = (1 - (z+1))^2` as a formal power series.
pub fn weights_oracle<T: Field>(kind: OperatorKind, x: &T, y: &T, len: usize) -> Result<WeightVector<T>> {
    kind.check_point("x", x)?;
    kind.check_point("y", y)?;
    let (weights, provenance) = match kind {
        OperatorKind::Bernstein { n } => {
            let gx = Poly::linear(T::one(), x.clone()).pow(n);
            let gy = Poly::linear(T::one(), y.clone()).pow(n);
            let diff = &gx - &gy;
            let g = (&diff * &diff)
                .div_z_pow(2)
                .expect("squared difference vanishes to second order at z = 0");
            let shifted = g.taylor_shift(&-T::one());
            (
                (0..len).map(|k| shifted.coeff(k)).collect(),
                Provenance::DerivativeOracle,
            )
        }
        OperatorKind::Szasz => {
            require_float::<T>("szasz series oracle")?;
            let row = |t: &T| -> Result<Vec<T>> {
                (0..len as u32)
                    .map(|i| szasz_basis(i, t.to_f64()).and_then(T::from_f64))
                    .collect()
            };
            (series_weights(row(x)?, row(y)?), Provenance::SeriesOracle)
        }
        OperatorKind::Baskakov { n } => {
            let row = |t: &T| -> Result<Vec<T>> { (0..len as u32).map(|i| baskakov_basis(n, i, t)).collect() };
            (series_weights(row(x)?, row(y)?), Provenance::SeriesOracle)
        }
    };
    Ok(WeightVector {
        kind,
        x: x.clone(),
        y: y.clone(),
        weights,
        provenance,
        error_bound: 0.0,
    })
}

/// Index `K` with `sum_{k > K} w_k E(k) < tol.abs_tol`, for the infinite
/// kinds. Szász weights integrate `s_k(s)` against a triangle of mass
/// `(M - m)^2` on `s <= 2M`; Baskakov weights are `(x-y)^2` times `n^2`
/// convolution laws, each dominated by `b_{2n+2,k}(max(x, y))`.
pub fn weight_truncation(
    kind: OperatorKind,
    x: f64,
    y: f64,
    envelope: &GrowthEnvelope,
    tol: Tolerance,
) -> Result<Option<TruncationCertificate>> {
    let (m, big) = (x.min(y), x.max(y));
    let spread = (big - m) * (big - m);
    if spread == 0.0 {
        return Ok(match kind {
            OperatorKind::Bernstein { .. } => None,
            _ => Some(TruncationCertificate::exact(0)),
        });
    }
    let cert = match kind {
        OperatorKind::Bernstein { .. } => return Ok(None),
        OperatorKind::Szasz => szasz_tail_index(2.0 * big, envelope, Tolerance::absolute(tol.abs_tol / spread)?)?,
        OperatorKind::Baskakov { n } => {
            let mass = spread * (n as f64).powi(2);
            baskakov_tail_index(2 * n + 2, big, envelope, Tolerance::absolute(tol.abs_tol / mass)?)?
        }
    };
    let scale = match kind {
        OperatorKind::Baskakov { n } => spread * (n as f64).powi(2),
        _ => spread,
    };
    Ok(Some(TruncationCertificate {
        index: cert.index,
        tail_bound: cert.tail_bound * scale,
    }))
}

/// Primary weights for any kind: explicit formulas for Bernstein and
/// Baskakov, quadrature for Szász. `len` is ignored for Bernstein.
pub fn decomposition_weights<T: Field>(
    kind: OperatorKind,
    x: &T,
    y: &T,
    len: usize,
    tol: Tolerance,
) -> Result<WeightVector<T>> {
    match kind {
        OperatorKind::Bernstein { n } => bernstein_weights(n, x, y),
        OperatorKind::Baskakov { n } => baskakov_weights(n, x, y, len),
        OperatorKind::Szasz => {
            require_float::<T>("szasz weights")?;
            let w = szasz_weights(x.to_f64(), y.to_f64(), len, tol)?;
            Ok(WeightVector {
                kind,
                x: x.clone(),
                y: y.clone(),
                weights: w.weights.into_iter().map(T::from_f64).collect::<Result<_>>()?,
                provenance: w.provenance,
                error_bound: w.error_bound,
            })
        }
    }
}

/// `sum_k Δ²a_k w_k` with `a_k = f(node(k))`.
///
/// Infinite kinds split `opts.tol` evenly between truncation and quadrature.
/// The truncation uses `|Δ²a_k| <= 4 E(k + 2)`.
pub fn rasa_rhs<T: Field>(
    kind: OperatorKind,
    f: &FunctionSpec,
    x: &T,
    y: &T,
    opts: &EvalOptions,
) -> Result<(Evaluation<T>, WeightVector<T>)> {
    kind.check_point("x", x)?;
    kind.check_point("y", y)?;
    let den = kind.node_denominator(opts.node_rescale);
    match kind {
        OperatorKind::Bernstein { n } => {
            let weights = bernstein_weights(n, x, y)?;
            let a: Vec<T> = f.samples(2 * n as usize + 1, den)?;
            let value = dot(&second_difference(&a)?, &weights.weights);
            Ok((
                Evaluation {
                    value,
                    certificate: None,
                    error_bound: 0.0,
                },
                weights,
            ))
        }
        _ => {
            require_float::<T>(&format!("{} decomposition", kind.name()))?;
            let half = opts.tol.split(2);
            let envelope = f.envelope.shifted(2.0).scaled(4.0);
            let cert = weight_truncation(kind, x.to_f64(), y.to_f64(), &envelope, half)?
                .expect("infinite kinds carry a certificate");
            let len = cert.index + 1;
            let a: Vec<T> = f.samples(len + 2, den)?;
            let diffs = second_difference(&a)?;
            let spread: f64 = diffs.iter().map(|d| d.to_f64().abs()).sum();
            let weight_tol = Tolerance::absolute(half.abs_tol / spread.max(1.0))?;
            let weights = decomposition_weights(kind, x, y, len, weight_tol)?;
            let value = dot(&diffs, &weights.weights);
            let quad_error = weights.error_bound * spread;
            Ok((
                Evaluation {
                    value,
                    certificate: Some(cert),
                    error_bound: cert.tail_bound + quad_error,
                },
                weights,
            ))
        }
    }
}

fn dot<T: Field>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(u, v)| u.clone() * v.clone())
        .collect::<Accumulator<T>>()
        .value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{grouped_form, rasa_lhs_direct, rasa_lhs_grouped};
    use num::rational::BigRational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_ratio(n, d)
    }

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&k| q(k, 1)).collect()
    }

    fn tol(abs: f64) -> Tolerance {
        Tolerance::absolute(abs).unwrap()
    }

    #[test]
    fn second_difference_examples() {
        assert_eq!(second_difference(&ints(&[0, 1, 4, 9])).unwrap(), ints(&[2, 2]));
        assert_eq!(second_difference(&ints(&[5, 8, 11])).unwrap(), ints(&[0]));
        let e = std::f64::consts::E;
        let d = second_difference(&[1.0, e, e * e]).unwrap();
        assert!((d[0] - (e - 1.0).powi(2)).abs() < 1e-14);
        assert!(matches!(
            second_difference(&ints(&[1, 2])),
            Err(Error::SequenceTooShort { needed: 3, have: 2 })
        ));
    }

    #[test]
    fn multiplicity_counts_pairs() {
        for n in 1..10u32 {
            for j in 0..=2 * n - 2 {
                let brute = (0..n)
                    .flat_map(|a| (0..n).map(move |b| (a, b)))
                    .filter(|(a, b)| a + b == j)
                    .count();
                assert_eq!(pair_multiplicity(n, j) as usize, brute);
            }
        }
    }

    #[test]
    fn bernstein_n1_is_squared_gap() {
        let (x, y) = (q(1, 3), q(1, 5));
        let w = bernstein_weights(1, &x, &y).unwrap();
        assert_eq!(w.weights, vec![q(4, 225)]);
        assert_eq!(
            weights_oracle(OperatorKind::Bernstein { n: 1 }, &x, &y, 1)
                .unwrap()
                .weights,
            vec![q(4, 225)]
        );
        assert_eq!(bernstein_weights_uncorrected(1, &x, &y).unwrap().weights, vec![q(0, 1)]);
    }

    #[test]
    fn bernstein_n2_endpoints() {
        let w = bernstein_weights(2, &q(1, 1), &q(0, 1)).unwrap();
        assert_eq!(w.weights, ints(&[1, 2, 1]));
        let o = weights_oracle(OperatorKind::Bernstein { n: 2 }, &q(1, 1), &q(0, 1), 3).unwrap();
        assert_eq!(o.weights, ints(&[1, 2, 1]));
        assert_eq!(o.provenance, Provenance::DerivativeOracle);
        assert_eq!(
            bernstein_weights_uncorrected(2, &q(1, 1), &q(0, 1)).unwrap().weights,
            ints(&[0, 1, 0])
        );
    }

    #[test]
    fn diagonal_weights_vanish() {
        for n in 1..6 {
            let w = bernstein_weights(n, &q(2, 7), &q(2, 7)).unwrap();
            assert!(w.weights.iter().all(Field::is_zero));
            let b = baskakov_weights(n, &1.5, &1.5, 8).unwrap();
            assert!(b.weights.iter().all(|&v| v == 0.0));
        }
        let s = szasz_weights(0.7, 0.7, 5, tol(1e-12)).unwrap();
        assert!(s.weights.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn degree_bound_in_oracle() {
        for n in 1..6u32 {
            let o = weights_oracle(OperatorKind::Bernstein { n }, &q(3, 4), &q(1, 9), 2 * n as usize + 3).unwrap();
            for k in 2 * n as usize - 1..o.weights.len() {
                assert!(Field::is_zero(&o.weights[k]));
            }
        }
    }

    #[test]
    fn generating_function_anchor() {
        // Shifting (1 + xz)^n to z = -1 yields the Bernstein row.
        for n in 1..8u32 {
            let x = q(2, 7);
            let shifted = Poly::linear(q(1, 1), x.clone()).pow(n).taylor_shift(&q(-1, 1));
            for i in 0..=n {
                assert_eq!(
                    shifted.coeff(i as usize),
                    crate::basis::bernstein_basis(n, i, &x).unwrap()
                );
            }
        }
    }

    #[test]
    fn baskakov_n1_first_weight() {
        let (x, y) = (q(1, 1), q(0, 1));
        let w = baskakov_weights(1, &x, &y, 4).unwrap();
        assert_eq!(w.weights[0], q(1, 4));
        for (x, y) in [(0.5, 2.0), (3.0, 0.25)] {
            let w = baskakov_weights(1, &x, &y, 1).unwrap().weights[0];
            let expect = (x - y) * (x - y) / ((1.0 + x) * (1.0 + x) * (1.0 + y) * (1.0 + y));
            let alt = (1.0 / (1.0 + x) - 1.0 / (1.0 + y)).powi(2);
            assert!((w - expect).abs() < 1e-15 && (w - alt).abs() < 1e-15);
        }
    }

    #[test]
    fn baskakov_n1_is_order_two_convolution() {
        let (x, y) = (q(2, 3), q(5, 2));
        let w = baskakov_weights(1, &x, &y, 6).unwrap();
        let d = x.clone() - y.clone();
        for k in 0..6u32 {
            let conv = (0..=k).fold(q(0, 1), |acc, i| {
                acc + baskakov_basis(2, i, &x).unwrap() * baskakov_basis(2, k - i, &y).unwrap()
            });
            assert_eq!(w.weights[k as usize], d.clone() * d.clone() * conv);
        }
        let o = weights_oracle(OperatorKind::Baskakov { n: 1 }, &x, &y, 6).unwrap();
        assert_eq!(o.weights, w.weights);
    }

    #[test]
    fn baskakov_explicit_matches_series_oracle() {
        let w = baskakov_weights(2, &1.0, &0.0, 7).unwrap();
        let o = weights_oracle(OperatorKind::Baskakov { n: 2 }, &1.0, &0.0, 7).unwrap();
        for k in 0..7 {
            assert!((w.weights[k] - o.weights[k]).abs() <= 1e-12);
        }
        for n in 1..5 {
            let (x, y) = (q(3, 4), q(7, 2));
            let w = baskakov_weights(n, &x, &y, 10).unwrap();
            let o = weights_oracle(OperatorKind::Baskakov { n }, &x, &y, 10).unwrap();
            assert_eq!(w.weights, o.weights);
        }
    }

    #[test]
    fn szasz_first_weight_closed_form() {
        let w = szasz_weights(0.0, 1.0, 2, tol(1e-13)).unwrap();
        let closed = (1.0 - (-1.0f64).exp()).powi(2);
        assert!((w.weights[0] - closed).abs() < 1e-12);
        let o = weights_oracle(OperatorKind::Szasz, &0.0, &1.0, 6).unwrap();
        let q = szasz_weights(0.0, 1.0, 6, tol(1e-14)).unwrap();
        for k in 0..6 {
            assert!((o.weights[k] - q.weights[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn adjoint_relation_exact() {
        let (x, y) = (q(2, 9), q(5, 6));
        for n in 1..7u32 {
            let w = bernstein_weights(n, &x, &y).unwrap();
            let c = grouped_form(OperatorKind::Bernstein { n }, &x, &y, 2 * n as usize + 1).unwrap();
            for k in 0..=2 * n as usize {
                let mut rhs = w.get(k);
                if k >= 1 {
                    rhs -= q(2, 1) * w.get(k - 1);
                }
                if k >= 2 {
                    rhs += w.get(k - 2);
                }
                assert_eq!(c.coeffs[k], rhs);
            }
        }
    }

    #[test]
    fn rhs_examples() {
        let o = EvalOptions::new(tol(1e-12));
        let b1 = OperatorKind::Bernstein { n: 1 };
        let f: FunctionSpec = "square".parse().unwrap();
        let (r, _) = rasa_rhs(b1, &f, &q(0, 1), &q(1, 1), &o).unwrap();
        assert_eq!(r.value, q(1, 2));
        let affine = FunctionSpec::sequence(ints(&[3, 5, 7, 9, 11, 13, 15]));
        let (r, _) = rasa_rhs(OperatorKind::Bernstein { n: 3 }, &affine, &q(1, 5), &q(4, 5), &o).unwrap();
        assert_eq!(r.value, q(0, 1));
    }

    #[test]
    fn infinite_rhs_matches_lhs() {
        let o = EvalOptions::new(tol(1e-10));
        let cases = [
            (OperatorKind::Szasz, "exp:lambda=0.5", 1.0, 2.0),
            (OperatorKind::Szasz, "abs:c=1.5", 0.0, 3.0),
            (OperatorKind::Baskakov { n: 2 }, "square", 0.5, 2.5),
            (OperatorKind::Baskakov { n: 3 }, "hinge:c=2", 1.0, 4.0),
        ];
        for (kind, f, x, y) in cases {
            let f: FunctionSpec = f.parse().unwrap();
            let lhs = rasa_lhs_grouped(kind, &f, &x, &y, &o).unwrap();
            let (rhs, w) = rasa_rhs(kind, &f, &x, &y, &o).unwrap();
            assert!(rhs.certificate.is_some());
            assert!(w.min_weight().unwrap() >= -1e-12);
            assert!(
                (lhs.value - rhs.value).abs() <= 1e-10 + 1e-12,
                "{kind} {f}: {} vs {}",
                lhs.value,
                rhs.value
            );
        }
    }

    fn unit_rational() -> impl Strategy<Value = BigRational> {
        (1i64..=50).prop_flat_map(|d| (0..=d).prop_map(move |n| q(n, d)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn explicit_matches_polynomial_oracle(n in 1u32..7, x in unit_rational(), y in unit_rational()) {
            let w = bernstein_weights(n, &x, &y).unwrap();
            let o = weights_oracle(OperatorKind::Bernstein { n }, &x, &y, 2 * n as usize - 1).unwrap();
            prop_assert_eq!(&w.weights, &o.weights);
            prop_assert!(w.weights.iter().all(|v| !Field::is_negative(v)));
            let swapped = bernstein_weights(n, &y, &x).unwrap();
            prop_assert_eq!(w.weights, swapped.weights);
        }

        #[test]
        fn identity_for_arbitrary_sequences(
            n in 1u32..6,
            x in unit_rational(),
            y in unit_rational(),
            a in proptest::collection::vec(-60i64..60, 11),
        ) {
            let f = FunctionSpec::sequence(a.iter().map(|&v| q(v, 5)).collect());
            let kind = OperatorKind::Bernstein { n };
            let o = EvalOptions::new(Tolerance::default());
            let lhs = rasa_lhs_direct(kind, &f, &x, &y, &o).unwrap().value;
            let (rhs, _) = rasa_rhs(kind, &f, &x, &y, &o).unwrap();
            prop_assert_eq!(lhs, rhs.value);
        }

        #[test]
        fn infinite_weights_nonnegative_and_symmetric(n in 1u32..5, x in 0.0f64..4.0, y in 0.0f64..4.0) {
            let b = baskakov_weights(n, &x, &y, 12).unwrap();
            let bs = baskakov_weights(n, &y, &x, 12).unwrap();
            for k in 0..12 {
                prop_assert!(b.weights[k] >= -1e-12);
                prop_assert!((b.weights[k] - bs.weights[k]).abs() <= 1e-12);
            }
            let s = szasz_weights(x, y, 6, Tolerance::absolute(1e-13).unwrap()).unwrap();
            prop_assert!(s.weights.iter().all(|&w| w >= -1e-12));
        }
    }
}
