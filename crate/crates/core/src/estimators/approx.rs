//! Closed-form lower bounds.

use super::{wilson_small_count_threshold, ConfidenceSpec, SmallCountLevel};
use crate::error::Result;
use crate::numerics::{chi_square_quantile, invlogit};

/// `x/n - κ √(x(n-x)/n³)`, unclamped.
pub(super) fn wald_lower(x: u64, n: u64, conf: &ConfidenceSpec) -> f64 {
    let (xf, nf) = (x as f64, n as f64);
    xf / nf - conf.kappa() * (xf * (nf - xf) / (nf * nf * nf)).sqrt()
}

/// Score (Wilson) lower bound; `x` is real so the continuity-corrected
/// variant can shift it by one half.
pub(super) fn wilson_lower(x: f64, n: u64, conf: &ConfidenceSpec) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    let k = conf.kappa();
    let k2 = k * k;
    (x + k2 / 2.0 - k * (x * (nf - x) / nf + k2 / 4.0).sqrt()) / (nf + k2)
}

pub(super) fn wilson_modified_lower(x: u64, n: u64, conf: &ConfidenceSpec, level: SmallCountLevel) -> Result<f64> {
    if (1..=wilson_small_count_threshold(n)).contains(&x) {
        let q = match level {
            SmallCountLevel::Alpha => conf.alpha(),
            SmallCountLevel::HalfAlpha => conf.one_sided(),
        };
        return Ok(chi_square_quantile(q, 2.0 * x as f64)? / (2.0 * n as f64));
    }
    Ok(wilson_lower(x as f64, n, conf))
}

/// Variance-stabilized arc-sine bound with half a success and half a failure added.
pub(super) fn arcsine_lower(x: u64, n: u64, conf: &ConfidenceSpec) -> f64 {
    let (xf, nf) = (x as f64, n as f64);
    let center = ((xf + 0.5) / (nf + 1.0)).sqrt().asin();
    let angle = (center - conf.kappa() / (2.0 * (nf + 0.5).sqrt())).max(0.0);
    let s = angle.sin();
    s * s
}

pub(super) fn wald_logit_lower(x: u64, n: u64, conf: &ConfidenceSpec) -> f64 {
    if x == 0 {
        return 0.0;
    }
    if x == n {
        return conf.one_sided().powf(1.0 / n as f64);
    }
    let (xf, nf) = (x as f64, n as f64);
    let center = (xf / (nf - xf)).ln();
    invlogit(center - conf.kappa() * (nf / (xf * (nf - xf))).sqrt())
}

pub(super) fn wald_cc_lower(x: u64, n: u64, conf: &ConfidenceSpec) -> f64 {
    wald_lower(x, n, conf) - 0.5 / n as f64
}

pub(super) fn wilson_cc_lower(x: u64, n: u64, conf: &ConfidenceSpec) -> f64 {
    if x == 0 {
        return 0.0;
    }
    wilson_lower(x as f64 - 0.5, n, conf)
}
