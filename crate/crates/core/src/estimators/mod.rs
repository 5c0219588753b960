//! Confidence-interval estimators for a binomial proportion.
//!
//! Every estimator defines its lower bound; unless it is a resampling method,
//! the upper bound follows from swapping successes and failures:
//! `U(x, n) = 1 - L(n - x, n)`. Raw bounds may fall outside `[0, 1]`; the
//! clamped fields of [`Interval`] set them to the nearest valid proportion.

mod approx;
mod bootstrap;
mod exact;
mod properties;
mod table;

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::numerics::{normal_quantile, Tolerance};

pub use bootstrap::{bootstrap_distribution, bootstrap_interval, BootstrapKind};
pub use exact::blaker_pvalue;
pub use properties::{method_properties, MethodProperties};
pub use table::{BoundTable, Estimator, FixedTable, IntervalProcedure};

/// Observed successes `x` out of `n` trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BinomialSample {
    x: u64,
    n: u64,
}

impl BinomialSample {
    pub fn new(x: u64, n: u64) -> Result<Self> {
        if n == 0 {
            return domain("trial count must be at least 1");
        }
        if x > n {
            return domain(format!("success count {x} exceeds trial count {n}"));
        }
        Ok(Self { x, n })
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Observed proportion `x / n`.
    pub fn point(&self) -> f64 {
        self.x as f64 / self.n as f64
    }

    /// The sample with successes and failures swapped.
    pub fn mirrored(&self) -> Self {
        Self {
            x: self.n - self.x,
            n: self.n,
        }
    }
}

/// Two-sided nominal error `α` and its normal quantile `κ = z_{1-α/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceSpec {
    alpha: f64,
    kappa: f64,
}

impl ConfidenceSpec {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return domain(format!("alpha must lie in (0,1), got {alpha}"));
        }
        Ok(Self {
            alpha,
            kappa: normal_quantile(1.0 - alpha / 2.0)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Nominal one-sided error `α/2`.
    pub fn one_sided(&self) -> f64 {
        self.alpha / 2.0
    }
}

impl Eq for ConfidenceSpec {}

impl std::hash::Hash for ConfidenceSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.alpha.to_bits().hash(state);
    }
}

/// Point estimate with raw and clamped bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub point: f64,
    pub lower_raw: f64,
    pub upper_raw: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn from_raw(point: f64, lower_raw: f64, upper_raw: f64) -> Self {
        Self {
            point,
            lower_raw,
            upper_raw,
            lower: clamp_unit(lower_raw),
            upper: clamp_unit(upper_raw),
        }
    }

    /// Whether `other` lies inside `self` (clamped bounds), up to `slack`.
    pub fn contains(&self, other: &Interval, slack: f64) -> bool {
        self.lower <= other.lower + slack && self.upper >= other.upper - slack
    }
}

pub(crate) fn clamp_unit(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Wald,
    Wilson,
    WilsonModified,
    ArcsineBartlett,
    WaldLogitModified,
    LikelihoodRatioModified,
    JeffreysModified,
    Blaker,
    ClopperPearson,
    ClopperPearsonMidP,
    WaldCc,
    WilsonCc,
    BootPercentile,
    BootBasic,
    CompositeDellas,
}

impl Method {
    pub const ALL: [Method; 15] = [
        Method::Wald,
        Method::Wilson,
        Method::WilsonModified,
        Method::ArcsineBartlett,
        Method::WaldLogitModified,
        Method::LikelihoodRatioModified,
        Method::JeffreysModified,
        Method::Blaker,
        Method::ClopperPearson,
        Method::ClopperPearsonMidP,
        Method::WaldCc,
        Method::WilsonCc,
        Method::BootPercentile,
        Method::BootBasic,
        Method::CompositeDellas,
    ];

    /// The nine headline estimators, compared on the error figures.
    pub const HEADLINE: [Method; 9] = [
        Method::Wald,
        Method::WilsonModified,
        Method::ArcsineBartlett,
        Method::WaldLogitModified,
        Method::LikelihoodRatioModified,
        Method::JeffreysModified,
        Method::Blaker,
        Method::ClopperPearson,
        Method::ClopperPearsonMidP,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Method::Wald => "wald",
            Method::Wilson => "wilson",
            Method::WilsonModified => "wilson_modified",
            Method::ArcsineBartlett => "arcsine_bartlett",
            Method::WaldLogitModified => "wald_logit_modified",
            Method::LikelihoodRatioModified => "likelihood_ratio_modified",
            Method::JeffreysModified => "jeffreys_modified",
            Method::Blaker => "blaker",
            Method::ClopperPearson => "clopper_pearson",
            Method::ClopperPearsonMidP => "clopper_pearson_midp",
            Method::WaldCc => "wald_cc",
            Method::WilsonCc => "wilson_cc",
            Method::BootPercentile => "boot_percentile",
            Method::BootBasic => "boot_basic",
            Method::CompositeDellas => "composite_dellas",
        }
    }

    /// Whether the upper bound is obtained from the lower bound of the
    /// mirrored sample. Resampling methods compute both bounds directly.
    pub fn upper_by_mirroring(&self) -> bool {
        !matches!(
            self,
            Method::BootPercentile | Method::BootBasic | Method::CompositeDellas
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.id() == key)
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

/// Quantile level of the small-count branch of the modified Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SmallCountLevel {
    /// `χ²_{α, 2x} / (2n)`.
    #[default]
    Alpha,
    /// `χ²_{α/2, 2x} / (2n)`, the exact one-sided Poisson level.
    HalfAlpha,
}

/// A method together with its configuration knobs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MethodSpec {
    pub method: Method,
    pub wilson_level: SmallCountLevel,
    pub tol: Tolerance,
}

impl MethodSpec {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            wilson_level: SmallCountLevel::default(),
            tol: Tolerance::default(),
        }
    }

    pub fn with_wilson_level(mut self, level: SmallCountLevel) -> Self {
        self.wilson_level = level;
        self
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }
}

impl From<Method> for MethodSpec {
    fn from(method: Method) -> Self {
        Self::new(method)
    }
}

/// Success threshold below which the modified Wilson interval switches to its
/// Poisson branch.
pub fn wilson_small_count_threshold(n: u64) -> u64 {
    if n <= 50 {
        2
    } else {
        3
    }
}

/// Raw (unclamped) lower bound.
pub fn lower_bound(spec: &MethodSpec, sample: BinomialSample, conf: &ConfidenceSpec) -> Result<f64> {
    let (x, n) = (sample.x, sample.n);
    let tol = &spec.tol;
    match spec.method {
        Method::Wald => Ok(approx::wald_lower(x, n, conf)),
        Method::Wilson => Ok(approx::wilson_lower(x as f64, n, conf)),
        Method::WilsonModified => approx::wilson_modified_lower(x, n, conf, spec.wilson_level),
        Method::ArcsineBartlett => Ok(approx::arcsine_lower(x, n, conf)),
        Method::WaldLogitModified => Ok(approx::wald_logit_lower(x, n, conf)),
        Method::LikelihoodRatioModified => exact::likelihood_ratio_lower(x, n, conf, tol),
        Method::JeffreysModified => exact::jeffreys_lower(x, n, conf, tol),
        Method::Blaker => exact::blaker_lower(x, n, conf, tol),
        Method::ClopperPearson => exact::clopper_pearson_lower(x, n, conf, tol),
        Method::ClopperPearsonMidP => exact::midp_lower(x, n, conf, tol),
        Method::WaldCc => Ok(approx::wald_cc_lower(x, n, conf)),
        Method::WilsonCc => Ok(approx::wilson_cc_lower(x, n, conf)),
        Method::BootPercentile | Method::BootBasic | Method::CompositeDellas => {
            Ok(direct_interval(spec, sample, conf)?.lower_raw)
        }
    }
}

fn direct_interval(spec: &MethodSpec, sample: BinomialSample, conf: &ConfidenceSpec) -> Result<Interval> {
    match spec.method {
        Method::BootPercentile => Ok(bootstrap_interval(BootstrapKind::Percentile, sample, conf)),
        Method::BootBasic => Ok(bootstrap_interval(BootstrapKind::Basic, sample, conf)),
        Method::CompositeDellas => composite_dellas_interval(sample, conf, &spec.tol),
        _ => unreachable!("direct_interval called for a mirrored method"),
    }
}

/// Confidence interval for `sample`.
pub fn interval(spec: &MethodSpec, sample: BinomialSample, conf: &ConfidenceSpec) -> Result<Interval> {
    if !spec.method.upper_by_mirroring() {
        return direct_interval(spec, sample, conf);
    }
    let lower = lower_bound(spec, sample, conf)?;
    let upper = 1.0 - lower_bound(spec, sample.mirrored(), conf)?;
    Ok(Interval::from_raw(sample.point(), lower, upper))
}

/// Percentile bootstrap, with the Clopper-Pearson interval substituted when
/// the bootstrap law is degenerate (`x = 0` or `x = n`).
pub fn composite_dellas_interval(sample: BinomialSample, conf: &ConfidenceSpec, tol: &Tolerance) -> Result<Interval> {
    if sample.x == 0 || sample.x == sample.n {
        let spec = MethodSpec::new(Method::ClopperPearson).with_tolerance(*tol);
        return interval(&spec, sample, conf);
    }
    Ok(bootstrap_interval(BootstrapKind::Percentile, sample, conf))
}

/// Continuity-corrected Wald or Wilson interval.
pub fn continuity_corrected_interval(
    method: Method,
    sample: BinomialSample,
    conf: &ConfidenceSpec,
) -> Result<Interval> {
    match method {
        Method::WaldCc | Method::WilsonCc => interval(&MethodSpec::new(method), sample, conf),
        other => domain(format!("{other} is not a continuity-corrected method")),
    }
}
