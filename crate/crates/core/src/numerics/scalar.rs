//! Two-mode scalars.
//!
//! Algorithms are written once against the [`Field`] trait and run either over
//! arbitrary-precision rationals (`BigRational`, error-free) or over `f64`.
//! [`Scalar`] is the dynamically tagged value used at API boundaries such as
//! the command line, where the mode is only known at run time.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

/// Ordered field arithmetic shared by the exact and floating-point paths.
pub trait Field:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact conversion from a finite float (binary fractions are rationals).
    fn from_f64(v: f64) -> Result<Self>;
    fn from_rational(q: &BigRational) -> Self;
    fn to_f64(&self) -> f64;
    fn binomial(n: u64, k: u64) -> Self;
    fn into_scalar(self) -> Scalar;
    fn try_from_scalar(s: &Scalar) -> Result<Self>;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn powi(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Field for f64 {
    const MODE: Mode = Mode::Float;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(v: f64) -> Result<Self> {
        Ok(v)
    }

    fn from_rational(q: &BigRational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn binomial(n: u64, k: u64) -> Self {
        if k > n {
            return 0.0;
        }
        let k = k.min(n - k);
        (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
    }

    fn into_scalar(self) -> Scalar {
        Scalar::Float(self)
    }

    fn try_from_scalar(s: &Scalar) -> Result<Self> {
        match s {
            Scalar::Float(v) => Ok(*v),
            Scalar::Exact(_) => Err(Error::ModeMismatch {
                left: Mode::Float,
                right: Mode::Exact,
            }),
        }
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn powi(&self, e: u32) -> Self {
        match i32::try_from(e) {
            Ok(e) => f64::powi(*self, e),
            Err(_) => f64::powf(*self, e as f64),
        }
    }
}

impl Field for BigRational {
    const MODE: Mode = Mode::Exact;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Result<Self> {
        BigRational::from_float(v).ok_or_else(|| Error::Parse(format!("non-finite value {v}")))
    }

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn binomial(n: u64, k: u64) -> Self {
        if k > n {
            return Zero::zero();
        }
        BigRational::from_integer(num::integer::binomial(BigInt::from(n), BigInt::from(k)))
    }

    fn into_scalar(self) -> Scalar {
        Scalar::Exact(self)
    }

    fn try_from_scalar(s: &Scalar) -> Result<Self> {
        match s {
            Scalar::Exact(q) => Ok(q.clone()),
            Scalar::Float(_) => Err(Error::ModeMismatch {
                left: Mode::Exact,
                right: Mode::Float,
            }),
        }
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

/// Running sum: Neumaier-compensated for floats, plain for exact values.
#[derive(Debug, Clone)]
pub struct Accumulator<T> {
    sum: T,
    comp: T,
}

impl<T: Field> Accumulator<T> {
    pub fn new() -> Self {
        Accumulator {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    pub fn add(&mut self, v: T) {
        if T::MODE == Mode::Exact {
            self.sum = self.sum.clone() + v;
            return;
        }
        let t = self.sum.clone() + v.clone();
        let lost = if Field::abs(&self.sum) >= Field::abs(&v) {
            (self.sum.clone() - t.clone()) + v
        } else {
            (v - t.clone()) + self.sum.clone()
        };
        self.comp = self.comp.clone() + lost;
        self.sum = t;
    }

    pub fn value(self) -> T {
        self.sum + self.comp
    }
}

impl<T: Field> Default for Accumulator<T> {
    fn default() -> Self {
        Accumulator::new()
    }
}

impl<T: Field> FromIterator<T> for Accumulator<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Accumulator::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// A value tagged with its arithmetic mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn zero(mode: Mode) -> Scalar {
        match mode {
            Mode::Exact => Scalar::Exact(Zero::zero()),
            Mode::Float => Scalar::Float(0.0),
        }
    }

    /// Parses `p/q`, integers and decimals (with optional exponent). In exact
    /// mode decimals become exact decimal fractions, so `0.1` is `1/10`.
    pub fn parse(s: &str, mode: Mode) -> Result<Scalar> {
        match mode {
            Mode::Exact => parse_rational(s).map(Scalar::Exact),
            Mode::Float => {
                let s = s.trim();
                if s.contains('/') {
                    parse_rational(s).map(|q| Scalar::Float(Field::to_f64(&q)))
                } else {
                    let v: f64 = s.parse().map_err(|_| Error::Parse(format!("invalid number '{s}'")))?;
                    if !v.is_finite() {
                        return Err(Error::Parse(format!("non-finite number '{s}'")));
                    }
                    Ok(Scalar::Float(v))
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => Field::to_f64(q),
            Scalar::Float(v) => *v,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(q) => Signed::is_negative(q),
            Scalar::Float(v) => *v < 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => Zero::is_zero(q),
            Scalar::Float(v) => *v == 0.0,
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(Signed::abs(q)),
            Scalar::Float(v) => Scalar::Float(f64::abs(*v)),
        }
    }

    /// Same-mode ordering; `None` across modes (or for NaN).
    pub fn try_cmp(&self, other: &Scalar) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            (Scalar::Float(a), Scalar::Float(b)) => a.partial_cmp(b),
            _ => None,
        }
    }

    pub fn checked_add(&self, rhs: &Scalar) -> Result<Scalar> {
        self.zip(rhs, |a, b| a + b, |a, b| a + b)
    }

    pub fn checked_sub(&self, rhs: &Scalar) -> Result<Scalar> {
        self.zip(rhs, |a, b| a - b, |a, b| a - b)
    }

    pub fn checked_mul(&self, rhs: &Scalar) -> Result<Scalar> {
        self.zip(rhs, |a, b| a * b, |a, b| a * b)
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.zip(rhs, |a, b| a / b, |a, b| a / b)
    }

    fn zip(
        &self,
        rhs: &Scalar,
        exact: impl FnOnce(&BigRational, &BigRational) -> BigRational,
        float: impl FnOnce(f64, f64) -> f64,
    ) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(exact(a, b))),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(float(*a, *b))),
            _ => Err(Error::ModeMismatch {
                left: self.mode(),
                right: rhs.mode(),
            }),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Float(v) => write!(f, "{v:e}"),
        }
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Float(v)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Exact(q)
    }
}

/// Parses `p/q` or a decimal literal such as `-1.25e-3` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num)?;
        let den = parse_decimal(den)?;
        if Zero::is_zero(&den) {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        return Ok(num / den);
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("invalid rational literal '{s}'"));
    let s = s.trim();
    let (negative, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = body[pos + 1..].parse().map_err(|_| bad())?;
            (&body[..pos], e)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = digits.parse().map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num::pow(ten, (-scale) as usize))
    };
    Ok(value)
}
