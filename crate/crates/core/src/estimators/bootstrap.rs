//! Bootstrap intervals from the exact resampling law.
//!
//! Resampling `n` Bernoulli outcomes with `x` successes gives a resampled
//! success count `X* ~ Binomial(n, x/n)`, so bootstrap quantiles are read off
//! the enumerated pmf instead of Monte-Carlo replicates.

use super::{BinomialSample, ConfidenceSpec, Interval};
use crate::numerics::log_dbinom_raw;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BootstrapKind {
    Percentile,
    Basic,
}

/// pmf of the resampled success count over `0..=n`.
pub fn bootstrap_distribution(sample: BinomialSample) -> Vec<f64> {
    let (x, n) = (sample.x(), sample.n());
    let nf = n as f64;
    let p = x as f64 / nf;
    let q = (n - x) as f64 / nf;
    (0..=n).map(|k| log_dbinom_raw(k as f64, nf, p, q).exp()).collect()
}

/// Resampled counts at the two quantile levels `α/2` and `1 - α/2`, each the
/// smallest `k` whose cumulative probability reaches the level. The upper one
/// is located from the upper tail so that mirrored samples give mirrored counts.
fn quantile_counts(pmf: &[f64], tail: f64) -> (usize, usize) {
    let mut acc = 0.0;
    let mut low = pmf.len() - 1;
    for (k, &p) in pmf.iter().enumerate() {
        acc += p;
        if acc >= tail {
            low = k;
            break;
        }
    }
    // Smallest k with Pr(X* > k) <= tail.
    let mut above = 0.0;
    let mut high = 0;
    for k in (0..pmf.len()).rev() {
        if above > tail {
            high = k + 1;
            break;
        }
        above += pmf[k];
    }
    (low, high)
}

pub fn bootstrap_interval(kind: BootstrapKind, sample: BinomialSample, conf: &ConfidenceSpec) -> Interval {
    let nf = sample.n() as f64;
    let pmf = bootstrap_distribution(sample);
    let (lo, hi) = quantile_counts(&pmf, conf.one_sided());
    let (q_lo, q_hi) = (lo as f64 / nf, hi as f64 / nf);
    let point = sample.point();
    match kind {
        BootstrapKind::Percentile => Interval::from_raw(point, q_lo, q_hi),
        BootstrapKind::Basic => Interval::from_raw(point, 2.0 * point - q_hi, 2.0 * point - q_lo),
    }
}
