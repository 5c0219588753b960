//! Confidence intervals for a binomial proportion, and the machinery to judge
//! them by their one-sided errors.
//!
//! The crate is split in three layers:
//!
//! * [`numerics`]: special functions, binomial probabilities, quadrature and
//!   bracketing root finders.
//! * [`estimators`]: the interval estimators, all exposed through
//!   [`estimators::interval`] and the cached [`estimators::Estimator`].
//! * [`evaluation`]: conditional errors at a fixed proportion, local-average
//!   errors and half-widths under a logit-normal proportion, random sample
//!   size errors, curve sweeps and scans.
//! * [`report`]: number rendering shared by the command line and web front ends.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod evaluation;
pub mod numerics;
pub mod report;

pub use error::{Error, Result};
pub use estimators::{interval, lower_bound, BinomialSample, ConfidenceSpec, Estimator, Interval, Method, MethodSpec};
pub use evaluation::{ErrorReport, HalfWidthReport, RandomProportionModel, Regime};
pub use numerics::Tolerance;
