//! One-sided error and half-width evaluation of interval procedures.
//!
//! Three regimes are supported: conditional on a fixed proportion, local
//! average under a logit-normal proportion, and a random sample size at a
//! fixed proportion. All of them sum exactly over the outcomes `x = 0..=n`;
//! only the mixing integrals use quadrature.

mod conditional;
mod local;
mod model;
mod oracle;
mod random_size;
mod sweep;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use conditional::{conditional_errors, conditional_half_widths};
pub use local::{
    local_average, local_average_errors, local_average_half_widths, LocalAverage, DEFAULT_QUADRATURE_NODES,
};
pub use model::{calibrate_mu, RandomProportionModel, RandomSampleSizeModel};
pub use oracle::{monte_carlo_oracle, OracleDesign, OracleReport};
pub use random_size::random_size_errors;
pub use sweep::{
    error_curve, half_width_curve, log_spaced, max_error_scan, validity_check, wald_validity_check, CurvePoint,
    EvaluationGrid, ScanResult, ValidityGrid, ValidityReport, WidthPoint,
};

use crate::error::{Error, Result};
use crate::estimators::{BoundTable, FixedTable, IntervalProcedure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Conditional,
    LocalAverage,
    RandomSize,
}

impl Regime {
    pub fn id(&self) -> &'static str {
        match self {
            Regime::Conditional => "conditional",
            Regime::LocalAverage => "local_average",
            Regime::RandomSize => "random_size",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "conditional" => Ok(Regime::Conditional),
            "local_average" | "local" => Ok(Regime::LocalAverage),
            "random_size" => Ok(Regime::RandomSize),
            other => Err(Error::Domain(format!("unknown regime '{other}'"))),
        }
    }
}

/// Which bound missed the true proportion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// The interval lies entirely above the truth (lower bound too high).
    Lower,
    /// The interval lies entirely below the truth.
    Upper,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        })
    }
}

/// One-sided errors of an interval procedure.
///
/// `alpha_l` is the probability that the lower bound exceeds the true
/// proportion, `alpha_u` that the upper bound falls short of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub alpha_l: f64,
    pub alpha_u: f64,
    pub two_sided: f64,
    pub regime: Regime,
}

impl ErrorReport {
    pub fn new(alpha_l: f64, alpha_u: f64, regime: Regime) -> Self {
        Self {
            alpha_l,
            alpha_u,
            two_sided: alpha_l + alpha_u,
            regime,
        }
    }

    /// The larger one-sided error and its side; ties go to the lower side.
    pub fn worst(&self) -> (f64, Side) {
        if self.alpha_u > self.alpha_l {
            (self.alpha_u, Side::Upper)
        } else {
            (self.alpha_l, Side::Lower)
        }
    }
}

/// Expected distances from the point estimate to each bound.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfWidthReport {
    pub w_l: f64,
    pub w_u: f64,
    pub relative_to: Option<String>,
    pub ratio_l: Option<f64>,
    pub ratio_u: Option<f64>,
}

impl HalfWidthReport {
    pub fn absolute(w_l: f64, w_u: f64) -> Self {
        Self {
            w_l,
            w_u,
            relative_to: None,
            ratio_l: None,
            ratio_u: None,
        }
    }

    /// Attach ratios against reference widths; a zero reference leaves the ratio unset.
    pub fn relative(mut self, label: String, reference: (f64, f64)) -> Self {
        let ratio = |w: f64, r: f64| (r > 0.0).then(|| w / r);
        self.ratio_l = ratio(self.w_l, reference.0);
        self.ratio_u = ratio(self.w_u, reference.1);
        self.relative_to = Some(label);
        self
    }
}

/// The interval `[0, 1]` for every outcome. It never errs, which makes it a
/// convenient null case for the evaluators.
#[derive(Debug, Clone, Copy, Default)]
pub struct Uninformative;

impl IntervalProcedure for Uninformative {
    fn label(&self) -> String {
        "uninformative".to_string()
    }

    fn table(&self, n: u64) -> Result<Arc<dyn BoundTable>> {
        Ok(Arc::new(FixedTable::from_fn(n, |_| (0.0, 1.0))))
    }
}

pub(crate) fn check_proportion(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("true proportion must lie in (0,1), got {p}")))
    }
}

/// `ln Pr(X = x)` is below this for outcomes that are skipped outright.
pub(crate) const NEGLIGIBLE_LOG_PMF: f64 = -46.0;
