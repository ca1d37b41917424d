//! Finite metric two-level measure spaces.
//!
//! An m2m space is a metric space `(X, r)` together with a finite measure
//! `ν` on the finite measures on `X`. This crate works with the dense class
//! of such spaces where `X` is finite and `ν` is a finite sum of point
//! masses on atomic measures, so every integral is a finite sum.
//!
//! Layout:
//!
//! - [`space`], [`measure`], [`m2m`], [`equivalence`], [`random`]: the data
//!   model, push-forwards, moment measures, equivalence testing and random
//!   instances.
//! - [`functionals`]: test functionals, distance distributions, the modulus
//!   of mass distribution, the mass cutoff `f_K`, sampling/reconstruction and
//!   compactness diagnostics.
//! - [`metrics`]: exact Prokhorov distances (one and two levels) and
//!   certified bounds for the two-level Gromov-Prokhorov distance.
//! - [`coalescent`]: the finite nested Kingman coalescent and the random m2m
//!   spaces it induces.
//! - [`stats`]: Kolmogorov-Smirnov statistics and summary helpers.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coalescent;
pub mod equivalence;
mod error;
pub mod functionals;
pub mod m2m;
pub mod measure;
pub mod metrics;
pub mod random;
pub mod space;
pub mod stats;

pub use error::{Error, Result};
pub use m2m::M2MSpace;
pub use measure::{AtomicMeasure, TwoLevelMeasure};
pub use space::{FiniteMetricSpace, Metric};

/// Default per-call tolerance for comparing weights and distances.
pub const DEFAULT_TOL: f64 = 1e-9;
