//! Bounds defined through beta quantiles or by inverting a test.

use super::{BinomialSample, ConfidenceSpec};
use crate::error::Result;
use crate::numerics::binomial::{cdf_leq, tail_geq};
use crate::numerics::{find_root_monotone, infimum_exceeding, reg_inc_beta_inv, Tolerance};

pub(super) fn clopper_pearson_lower(x: u64, n: u64, conf: &ConfidenceSpec, tol: &Tolerance) -> Result<f64> {
    if x == 0 {
        return Ok(0.0);
    }
    reg_inc_beta_inv(x as f64, (n - x + 1) as f64, conf.one_sided(), tol)
}

pub(super) fn jeffreys_lower(x: u64, n: u64, conf: &ConfidenceSpec, tol: &Tolerance) -> Result<f64> {
    if x <= 1 {
        return Ok(0.0);
    }
    if x == n {
        return Ok(conf.one_sided().powf(1.0 / n as f64));
    }
    reg_inc_beta_inv(x as f64 + 0.5, (n - x) as f64 + 0.5, conf.one_sided(), tol)
}

/// `Pr(X >= x) - Pr(X = x)/2` under `Binomial(n, q)`, written as the mean of
/// two upper tails so that it is continuous and increasing in `q`.
pub(crate) fn midp_tail(x: u64, n: u64, q: f64) -> f64 {
    0.5 * (tail_geq(x, n, q) + tail_geq(x + 1, n, q))
}

pub(super) fn midp_lower(x: u64, n: u64, conf: &ConfidenceSpec, tol: &Tolerance) -> Result<f64> {
    if x == 0 {
        return Ok(0.0);
    }
    let target = conf.one_sided();
    find_root_monotone(|q| midp_tail(x, n, q) - target, 0.0, 1.0, tol)
}

/// Log-likelihood ratio of `p̂ = x/n` against `q` (half the deviance).
pub(crate) fn half_deviance(x: u64, n: u64, q: f64) -> f64 {
    let (xf, nf) = (x as f64, n as f64);
    let p = xf / nf;
    let mut d = 0.0;
    if x > 0 {
        d += xf * (p.ln() - q.ln());
    }
    if x < n {
        d += (nf - xf) * ((-p).ln_1p() - (-q).ln_1p());
    }
    d
}

pub(super) fn likelihood_ratio_lower(x: u64, n: u64, conf: &ConfidenceSpec, tol: &Tolerance) -> Result<f64> {
    if x == 0 {
        return Ok(0.0);
    }
    if x == n {
        return Ok(conf.one_sided().powf(1.0 / n as f64));
    }
    let threshold = 0.5 * conf.kappa() * conf.kappa();
    let p = x as f64 / n as f64;
    find_root_monotone(|q| half_deviance(x, n, q) - threshold, 1e-300, p, tol)
}

/// Blaker's acceptability p-value of proportion `p` given `sample`.
///
/// For `p >= x/n` the acceptance region is `X <= x` together with the
/// opposite tail starting at the first count whose upper tail does not exceed
/// `Pr(X <= x)`; proportions below `x/n` are handled by reflection.
pub fn blaker_pvalue(p: f64, sample: BinomialSample) -> f64 {
    let (x, n) = (sample.x(), sample.n());
    if p < sample.point() {
        return blaker_pvalue(1.0 - p, sample.mirrored());
    }
    let lower_tail = cdf_leq(x, n, p);
    // Smallest x' in [0, n + 1] with Pr(X >= x') <= Pr(X <= x).
    let opposite = if tail_geq(0, n, p) <= lower_tail {
        0
    } else {
        let (mut lo, mut hi) = (0u64, n + 1);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if tail_geq(mid, n, p) <= lower_tail {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    if opposite <= x + 1 {
        return 1.0;
    }
    (lower_tail + tail_geq(opposite, n, p)).min(1.0)
}

/// Coarse scan resolution of the Blaker search.
const BLAKER_STEP: f64 = 1e-4;
const BLAKER_MIN_STEPS: f64 = 256.0;

/// `inf { q : bpval(q) > α }`. The p-value is not monotone in `q`, so the
/// bracket `[Clopper-Pearson lower, x/n]` is scanned for the first crossing,
/// which is then refined by bisection.
pub(super) fn blaker_lower(x: u64, n: u64, conf: &ConfidenceSpec, tol: &Tolerance) -> Result<f64> {
    if x == 0 {
        return Ok(0.0);
    }
    let sample = BinomialSample::new(x, n)?;
    let alpha = conf.alpha();
    let start = clopper_pearson_lower(x, n, conf, tol)?;
    let end = sample.point();
    let pv = |q: f64| blaker_pvalue(q, sample);
    if pv(start) > alpha {
        return Ok(start);
    }
    let step = BLAKER_STEP.min((end - start) / BLAKER_MIN_STEPS);
    let mut prev = start;
    loop {
        let q = (prev + step).min(end);
        if pv(q) > alpha {
            return infimum_exceeding(pv, alpha, prev, q, tol);
        }
        if q >= end {
            return Ok(end);
        }
        prev = q;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::reg_inc_beta;

    fn conf() -> ConfidenceSpec {
        ConfidenceSpec::new(0.05).unwrap()
    }

    #[test]
    fn blaker_pvalue_cases() {
        let s = BinomialSample::new(10, 10).unwrap();
        assert_eq!(blaker_pvalue(1.0, s), 1.0);
        let s = BinomialSample::new(5, 10).unwrap();
        assert_eq!(blaker_pvalue(0.5, s), 1.0);
        for &(p, x, n) in &[(0.1, 3u64, 20u64), (0.37, 9, 20), (0.8, 1, 5), (0.02, 0, 40)] {
            let a = blaker_pvalue(p, BinomialSample::new(x, n).unwrap());
            let b = blaker_pvalue(1.0 - p, BinomialSample::new(n - x, n).unwrap());
            assert!((a - b).abs() < 1e-14);
            assert!((0.0..=1.0).contains(&a));
        }
    }

    #[test]
    fn blaker_pvalue_by_enumeration() {
        // Direct enumeration of the two tails with explicit pmf terms.
        let (x, n, p) = (2u64, 15u64, 0.31f64);
        let pmf = |k: u64| {
            let c = (0..k).fold(1.0, |c, i| c * (n - i) as f64 / (i + 1) as f64);
            c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
        };
        let lower: f64 = (0..=x).map(pmf).sum();
        let mut opposite = n + 1;
        for k in (0..=n).rev() {
            let tail: f64 = (k..=n).map(pmf).sum();
            if tail <= lower {
                opposite = k;
            } else {
                break;
            }
        }
        let want = lower + (opposite..=n).map(pmf).sum::<f64>();
        let got = blaker_pvalue(p, BinomialSample::new(x, n).unwrap());
        assert!((got - want).abs() < 1e-13, "{got} vs {want}");
    }

    #[test]
    fn midp_closed_form_at_full_count() {
        let v = midp_lower(4, 4, &conf(), &Tolerance::default()).unwrap();
        assert!((v - 0.05f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn defining_equations_hold() {
        let tol = Tolerance::default();
        let c = conf();
        for &(x, n) in &[(1u64, 225u64), (2, 46), (17, 64), (3, 2048), (63, 64)] {
            let cp = clopper_pearson_lower(x, n, &c, &tol).unwrap();
            let r = reg_inc_beta(x as f64, (n - x + 1) as f64, cp).unwrap();
            assert!((r - 0.025).abs() < 1e-9);
            let mp = midp_lower(x, n, &c, &tol).unwrap();
            assert!((midp_tail(x, n, mp) - 0.025).abs() < 1e-9);
            assert!(mp >= cp);
            let lr = likelihood_ratio_lower(x, n, &c, &tol).unwrap();
            assert!((half_deviance(x, n, lr) - 0.5 * c.kappa() * c.kappa()).abs() < 1e-8);
        }
    }

    #[test]
    fn likelihood_ratio_worked_example() {
        let v = likelihood_ratio_lower(1, 225, &conf(), &Tolerance::default()).unwrap();
        assert!((v * 100.0 - 0.03).abs() < 0.005, "{v}");
    }

    #[test]
    fn blaker_matches_grid_scan() {
        let tol = Tolerance::default();
        let c = conf();
        let (x, n) = (5u64, 20u64);
        let got = blaker_lower(x, n, &c, &tol).unwrap();
        let oracle = grid_scan(x, n, 0.05);
        assert!((got - oracle).abs() < 1e-6, "{got} vs {oracle}");
    }

    /// Scan `[0, x/n]` at 1e-6 and refine the first crossing by bisection.
    fn grid_scan(x: u64, n: u64, alpha: f64) -> f64 {
        let s = BinomialSample::new(x, n).unwrap();
        let end = x as f64 / n as f64;
        let mut q = 0.0;
        while q < end {
            let next = q + 1e-6;
            if blaker_pvalue(next, s) > alpha {
                let (mut lo, mut hi) = (q, next);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if blaker_pvalue(mid, s) > alpha {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return hi;
            }
            q = next;
        }
        end
    }
}
