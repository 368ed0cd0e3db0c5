//! Exact Bernstein kernels over a common denominator.
//!
//! At `x = p/d` every `p_{m,i}(x)` equals `C(m,i) p^i (d-p)^{m-i} / d^m`, so a
//! whole row is a vector of integers over one denominator. Sums of products
//! then stay in `BigInt` and are reduced once at the end, instead of a gcd
//! after every rational operation.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Zero};

use crate::numerics::{Field, Scalar};

/// `nums[i] / den`.
#[derive(Debug, Clone)]
pub(crate) struct ScaledRow {
    pub nums: Vec<BigInt>,
    pub den: BigInt,
}

/// The value as a `BigRational` when `T` is the exact field.
pub(crate) fn as_rational<T: Field>(v: &T) -> Option<BigRational> {
    match v.clone().into_scalar() {
        Scalar::Exact(q) => Some(q),
        Scalar::Float(_) => None,
    }
}

fn powers(b: &BigInt, m: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(m + 1);
    out.push(BigInt::one());
    for i in 0..m {
        let next = &out[i] * b;
        out.push(next);
    }
    out
}

/// `p_{m,i}(x)` for `i = 0..=m`.
pub(crate) fn bernstein_row(m: usize, x: &BigRational) -> ScaledRow {
    let (p, d) = (x.numer().clone(), x.denom().clone());
    let pp = powers(&p, m);
    let qp = powers(&(&d - &p), m);
    let mut nums = Vec::with_capacity(m + 1);
    let mut binom = BigInt::one();
    for i in 0..=m {
        nums.push(&binom * &pp[i] * &qp[m - i]);
        binom = binom * BigInt::from(m - i) / BigInt::from(i + 1);
    }
    ScaledRow {
        nums,
        den: d.pow(m as u32),
    }
}

/// Numerators of the first `len` entries of `a * b` (denominators multiply).
pub(crate) fn convolve(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Integers `A_k` and `L` with `values[k] = A_k / L`.
fn common_denominator(values: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let l = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let nums = values.iter().map(|v| v.numer() * (&l / v.denom())).collect();
    (nums, l)
}

/// `sum_{i,j <= n} [p_i(x) p_j(x) + p_i(y) p_j(y) - 2 p_i(x) p_j(y)] a_{i+j}`.
pub(crate) fn bernstein_direct(n: usize, x: &BigRational, y: &BigRational, values: &[BigRational]) -> BigRational {
    let rx = bernstein_row(n, x);
    let ry = bernstein_row(n, y);
    let (a, l) = common_denominator(&values[..2 * n + 1]);
    // Every bracket is taken over (dx dy)^{2n}.
    let sx = ry.den.pow(2);
    let sy = rx.den.pow(2);
    let sxy = &rx.den * &ry.den * 2;
    let mut total = BigInt::zero();
    for i in 0..=n {
        for j in 0..=n {
            let bracket =
                &rx.nums[i] * &rx.nums[j] * &sx + &ry.nums[i] * &ry.nums[j] * &sy - &rx.nums[i] * &ry.nums[j] * &sxy;
            total += bracket * &a[i + j];
        }
    }
    BigRational::new(total, sx * sy * l)
}

/// `C_k = c_k(x,x) + c_k(y,y) - 2 c_k(x,y)` for `k = 0..len`.
pub(crate) fn bernstein_grouped(n: usize, x: &BigRational, y: &BigRational, len: usize) -> Vec<BigRational> {
    let rx = bernstein_row(n, x);
    let ry = bernstein_row(n, y);
    let xx = convolve(&rx.nums, &rx.nums, len);
    let yy = convolve(&ry.nums, &ry.nums, len);
    let xy = convolve(&rx.nums, &ry.nums, len);
    let (dx2, dy2) = (rx.den.pow(2), ry.den.pow(2));
    let dxy = &rx.den * &ry.den;
    let den = &dx2 * &dy2;
    (0..len)
        .map(|k| {
            let num = &xx[k] * &dy2 + &yy[k] * &dx2 - &xy[k] * &dxy * 2;
            BigRational::new(num, den.clone())
        })
        .collect()
}

/// `(x-y)^2 sum_j mult(j) sum_i p_{j,i}(x) p_{top-j,k-i}(y)` for `k = 0..=top`.
pub(crate) fn bernstein_weights(
    top: usize,
    x: &BigRational,
    y: &BigRational,
    mult: impl Fn(usize) -> u32,
) -> Vec<BigRational> {
    let rows_x: Vec<ScaledRow> = (0..=top).map(|m| bernstein_row(m, x)).collect();
    let rows_y: Vec<ScaledRow> = (0..=top).map(|m| bernstein_row(m, y)).collect();
    // Term j sits over dx^j dy^{top-j}; lift everything to (dx dy)^top.
    let dxp = powers(x.denom(), top);
    let dyp = powers(y.denom(), top);
    let mut acc = vec![BigInt::zero(); top + 1];
    for j in 0..=top {
        let m = mult(j);
        if m == 0 {
            continue;
        }
        let lift = &dxp[top - j] * &dyp[j] * BigInt::from(m);
        for (k, v) in convolve(&rows_x[j].nums, &rows_y[top - j].nums, top + 1)
            .into_iter()
            .enumerate()
        {
            acc[k] += v * &lift;
        }
    }
    let d = x - y;
    let d2 = &d * &d;
    let den = &dxp[top] * &dyp[top];
    acc.into_iter()
        .map(|v| d2.clone() * BigRational::new(v, den.clone()))
        .collect()
}
