//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

// Node and weight tables keep their published digits.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::Tolerance;
use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub max_subintervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            max_subintervals: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Sum of the per-segment |Kronrod - Gauss| differences.
    pub error_estimate: f64,
    pub subintervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<Segment> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    if !value.is_finite() || !error.is_finite() {
        return Err(Error::Quadrature {
            lo,
            hi,
            budget: 0,
            estimate: f64::INFINITY,
        });
    }
    Ok(Segment { lo, hi, value, error })
}

/// Integrates `f` over `[lo, hi]` to the default subdivision budget.
pub fn quadrature<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: Tolerance) -> Result<QuadratureResult> {
    quadrature_with(f, lo, hi, tol, QuadratureOptions::default())
}

/// Bisects the segment with the largest error estimate until the summed
/// estimate drops below `tol.threshold(value)`.
pub fn quadrature_with<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: Tolerance,
    opts: QuadratureOptions,
) -> Result<QuadratureResult> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::Domain {
            what: "integration interval",
            value: format!("[{lo}, {hi}]"),
            domain: "finite lo <= hi",
        });
    }
    if lo == hi {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            subintervals: 1,
        });
    }

    let first = gauss_kronrod(&f, lo, hi)?;
    let mut total_value = first.value;
    let mut total_error = first.error;
    let mut heap = BinaryHeap::from([first]);

    loop {
        if total_error <= tol.threshold(total_value) {
            // Re-sum to shed drift from the incremental updates.
            total_value = heap.iter().map(|s| s.value).sum();
            total_error = heap.iter().map(|s| s.error).sum();
            if total_error <= tol.threshold(total_value) {
                return Ok(QuadratureResult {
                    value: total_value,
                    error_estimate: total_error,
                    subintervals: heap.len(),
                });
            }
        }
        let worst = *heap.peek().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if heap.len() >= opts.max_subintervals || mid <= worst.lo || mid >= worst.hi {
            return Err(Error::Quadrature {
                lo: worst.lo,
                hi: worst.hi,
                budget: opts.max_subintervals,
                estimate: total_error,
            });
        }
        heap.pop();
        let left = gauss_kronrod(&f, worst.lo, mid)?;
        let right = gauss_kronrod(&f, mid, worst.hi)?;
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol(abs: f64) -> Tolerance {
        Tolerance::absolute(abs).unwrap()
    }

    #[test]
    fn zero_integrand() {
        let r = quadrature(|_| 0.0, 0.0, 1.0, tol(1e-12)).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn exponential_closed_form() {
        let r = quadrature(|s: f64| (-s).exp(), 0.0, 1.0, tol(1e-13)).unwrap();
        let exact = 1.0 - (-1.0f64).exp();
        assert!((r.value - exact).abs() <= 1e-13);
    }

    #[test]
    fn error_estimate_bounds_true_error() {
        type Case = (Box<dyn Fn(f64) -> f64>, f64, f64, f64);
        let cases: Vec<Case> = vec![
            (Box::new(|s: f64| s * s), 0.0, 3.0, 9.0),
            (Box::new(|s: f64| s.sin()), 0.0, std::f64::consts::PI, 2.0),
            (Box::new(|s: f64| s.sqrt()), 0.0, 1.0, 2.0 / 3.0),
            (Box::new(|s: f64| (s - 0.3).abs()), 0.0, 1.0, 0.045 + 0.245),
            (
                Box::new(|s: f64| (3.0 * s).exp()),
                -1.0,
                1.0,
                ((3.0f64).exp() - (-3.0f64).exp()) / 3.0,
            ),
        ];
        for (f, lo, hi, exact) in cases {
            for t in [1e-4, 1e-8, 1e-12] {
                let r = quadrature(&f, lo, hi, tol(t)).unwrap();
                let err = (r.value - exact).abs();
                assert!(
                    err <= r.error_estimate.max(4.0 * f64::EPSILON * exact.abs()),
                    "{err} > {}",
                    r.error_estimate
                );
                assert!(err <= t);
            }
        }
    }

    #[test]
    fn empty_and_reversed_intervals() {
        assert_eq!(quadrature(|s| s, 2.0, 2.0, tol(1e-9)).unwrap().value, 0.0);
        assert!(matches!(
            quadrature(|s| s, 2.0, 1.0, tol(1e-9)),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn budget_exhaustion_names_interval() {
        let opts = QuadratureOptions { max_subintervals: 3 };
        let err = quadrature_with(|s: f64| (1.0 / s).sin(), 1e-6, 1.0, tol(1e-14), opts).unwrap_err();
        match err {
            Error::Quadrature { lo, hi, budget, .. } => {
                assert_eq!(budget, 3);
                assert!(lo >= 1e-6 && hi <= 1.0 && lo < hi);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nonfinite_integrand_fails() {
        assert!(quadrature(|_| f64::NAN, 0.0, 1.0, tol(1e-9)).is_err());
    }
}
