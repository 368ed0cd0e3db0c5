//! Evaluation and verification of the quadratic convexity functional
//!
//! `sum_i sum_j [b_i(x) b_j(x) + b_i(y) b_j(y) - 2 b_i(x) b_j(y)] f(node(i + j))`
//!
//! for the Bernstein, Mirakyan-Favard-Szász and Baskakov bases, together with
//! its decomposition into second differences of `f` against nonnegative
//! weights. Bernstein computations run in exact rational arithmetic; the
//! infinite families run in `f64` with certified truncation.

pub mod basis;
pub mod catalog;
pub mod cli;
pub mod decomposition;
pub mod error;
mod exact;
pub mod functional;
pub mod numerics;
pub mod poly;
pub mod report;

pub use basis::OperatorKind;
pub use catalog::FunctionSpec;
pub use error::{Error, Result};
pub use numerics::{Field, GrowthEnvelope, Mode, Scalar, Tolerance};
