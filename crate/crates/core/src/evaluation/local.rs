//! Errors and half-widths averaged over a logit-normal true proportion.
//!
//! For each outcome `x` the mixed probability `∫ Pr(X = x | p) dF_P(p)` is an
//! integral over `t = logit p` of `h_x(t) = Pr(X = x | invlogit t)·φ_σ(t − μ)`,
//! which is log-concave in `t`. The integral is restricted to the window where
//! `ln h_x` is within [`WINDOW_DEPTH`] of its maximum and evaluated with
//! Gauss-Legendre on that window (cut at `logit L` or `logit U` for errors).

use std::f64::consts::PI;

use super::conditional::{conditional_errors, conditional_half_widths};
use super::{ErrorReport, HalfWidthReport, RandomProportionModel, Regime};
use crate::error::Result;
use crate::estimators::IntervalProcedure;
use crate::numerics::{gauss_legendre, invlogit, ln_choose, ln_invlogit, logit, NORMAL_SPAN};

pub const DEFAULT_QUADRATURE_NODES: usize = 64;

/// Depth, in log units, below the integrand's peak at which the window ends.
const WINDOW_DEPTH: f64 = 40.0;

/// Outcomes whose integrand peaks below this log level are dropped.
const NEGLIGIBLE_PEAK: f64 = -55.0;

/// Errors and half-widths from one pass over the outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalAverage {
    pub errors: ErrorReport,
    pub w_l: f64,
    pub w_u: f64,
}

struct Integrand {
    x: f64,
    n: f64,
    mu: f64,
    sigma: f64,
    offset: f64,
}

impl Integrand {
    fn new(x: u64, n: u64, model: &RandomProportionModel) -> Self {
        Self {
            x: x as f64,
            n: n as f64,
            mu: model.mu,
            sigma: model.sigma,
            offset: ln_choose(n, x) - (model.sigma * (2.0 * PI).sqrt()).ln(),
        }
    }

    fn log_h(&self, t: f64) -> f64 {
        let z = (t - self.mu) / self.sigma;
        self.offset + self.x * ln_invlogit(t) + (self.n - self.x) * ln_invlogit(-t) - 0.5 * z * z
    }

    /// Derivative of `ln h` and its (negative) second derivative.
    fn slope(&self, t: f64) -> (f64, f64) {
        let s = invlogit(t);
        let s2 = self.sigma * self.sigma;
        (
            self.x - self.n * s - (t - self.mu) / s2,
            self.n * s * (1.0 - s) + 1.0 / s2,
        )
    }

    /// Maximizer of `ln h` on the real line by bracketed Newton.
    fn mode(&self) -> f64 {
        let s2 = self.sigma * self.sigma;
        let (mut lo, mut hi) = (self.mu - s2 * (self.n - self.x), self.mu + s2 * self.x);
        let mut t = (logit((self.x + 0.5) / (self.n + 1.0))).clamp(lo, hi);
        for _ in 0..100 {
            let (g, c) = self.slope(t);
            if g > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let mut next = t + g / c;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 1e-12 * (1.0 + t.abs()) {
                return next;
            }
            t = next;
        }
        t
    }

    /// Window `[left, right]` within the normal span holding all but a
    /// negligible part of the integral, or `None` when the whole term is
    /// negligible.
    fn window(&self) -> Option<(f64, f64)> {
        let a = self.mu - NORMAL_SPAN * self.sigma;
        let b = self.mu + NORMAL_SPAN * self.sigma;
        let m = self.mode().clamp(a, b);
        let peak = self.log_h(m);
        if peak < NEGLIGIBLE_PEAK {
            return None;
        }
        let floor = peak - WINDOW_DEPTH;
        let d0 = (2.0 * WINDOW_DEPTH / self.slope(m).1).sqrt();
        let edge = |dir: f64, limit: f64| {
            let mut d = d0;
            loop {
                let t = m + dir * d;
                if (t - limit) * dir >= 0.0 {
                    return limit;
                }
                if self.log_h(t) <= floor {
                    return t;
                }
                d *= 1.5;
            }
        };
        Some((edge(-1.0, a), edge(1.0, b)))
    }

    fn integrate(&self, lo: f64, hi: f64, nodes: usize) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        let rule = gauss_legendre(nodes);
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let s: f64 = rule
            .0
            .iter()
            .zip(&rule.1)
            .map(|(&u, &w)| w * self.log_h(mid + half * u).exp())
            .sum();
        s * half
    }
}

/// Local-average errors `α″` and half-widths `w″` using `nodes`-point rules.
/// A degenerate model (`σ = 0`) reduces to the conditional regime at `p0`.
pub fn local_average(
    proc: &dyn IntervalProcedure,
    n: u64,
    model: &RandomProportionModel,
    nodes: usize,
) -> Result<LocalAverage> {
    if model.is_degenerate() {
        let e = conditional_errors(proc, n, model.p0)?;
        let w = conditional_half_widths(proc, n, model.p0)?;
        return Ok(LocalAverage {
            errors: ErrorReport::new(e.alpha_l, e.alpha_u, Regime::LocalAverage),
            w_l: w.w_l,
            w_u: w.w_u,
        });
    }
    let table = proc.table(n)?;
    let (mut al, mut au, mut wl, mut wu) = (0.0, 0.0, 0.0, 0.0);
    for x in 0..=n {
        let h = Integrand::new(x, n, model);
        let Some((left, right)) = h.window() else {
            continue;
        };
        let (lower, upper) = (table.lower(x)?, table.upper(x)?);
        if lower > 0.0 {
            al += h.integrate(left, right.min(logit(lower)), nodes);
        }
        if upper < 1.0 {
            au += h.integrate(left.max(logit(upper)), right, nodes);
        }
        let mass = h.integrate(left, right, nodes);
        let point = x as f64 / n as f64;
        wl += mass * (point - lower);
        wu += mass * (upper - point);
    }
    Ok(LocalAverage {
        errors: ErrorReport::new(al, au, Regime::LocalAverage),
        w_l: wl,
        w_u: wu,
    })
}

pub fn local_average_errors(
    proc: &dyn IntervalProcedure,
    n: u64,
    model: &RandomProportionModel,
) -> Result<ErrorReport> {
    local_average(proc, n, model, DEFAULT_QUADRATURE_NODES).map(|r| r.errors)
}

/// Half-widths `w″_L`, `w″_U`, with ratios against `reference` when given.
pub fn local_average_half_widths(
    proc: &dyn IntervalProcedure,
    n: u64,
    model: &RandomProportionModel,
    reference: Option<&dyn IntervalProcedure>,
) -> Result<HalfWidthReport> {
    let own = local_average(proc, n, model, DEFAULT_QUADRATURE_NODES)?;
    let report = HalfWidthReport::absolute(own.w_l, own.w_u);
    match reference {
        None => Ok(report),
        Some(r) => {
            let base = local_average(r, n, model, DEFAULT_QUADRATURE_NODES)?;
            Ok(report.relative(r.label(), (base.w_l, base.w_u)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{ConfidenceSpec, Estimator, Method};
    use crate::evaluation::Uninformative;
    use crate::numerics::normal_rule_on;

    fn est(m: Method) -> Estimator {
        Estimator::new(m, ConfidenceSpec::new(0.05).unwrap())
    }

    #[test]
    fn mixed_pmf_sums_to_one() {
        for &(n, lambda) in &[(32u64, 0.05), (64, 4.0), (2048, 0.11), (2048, 100.0), (225, 4.9)] {
            let model = RandomProportionModel::from_lambda(lambda, n, 1.2).unwrap();
            let w = local_average(&Uninformative, n, &model, 64).unwrap();
            // For [0, 1], w_L + w_U = Σ_x m_x = 1.
            assert!((w.w_l + w.w_u - 1.0).abs() < 1e-9, "n={n} λ={lambda}");
            // w_L = E[X/n] = p0.
            assert!((w.w_l - model.p0).abs() < 1e-9, "n={n} λ={lambda}");
        }
    }

    #[test]
    fn mixed_pmf_matches_plain_quadrature() {
        // Independent route: a single wide 2000-node rule over the whole normal span.
        let (n, lambda) = (64u64, 4.0);
        let model = RandomProportionModel::from_lambda(lambda, n, 1.2).unwrap();
        let wide = normal_rule_on(
            model.mu,
            model.sigma,
            model.mu - 8.0 * model.sigma,
            model.mu + 8.0 * model.sigma,
            2000,
        );
        let cp = est(Method::ClopperPearson);
        let t = cp.table(n).unwrap();
        let (mut al, mut au) = (0.0, 0.0);
        for x in 0..=n {
            let l = t.lower(x).unwrap();
            let u = t.upper(x).unwrap();
            al += wide.integrate(|s| {
                let p = invlogit(s);
                if p < l {
                    crate::numerics::binomial_pmf(x, n, p).unwrap()
                } else {
                    0.0
                }
            });
            au += wide.integrate(|s| {
                let p = invlogit(s);
                if p > u {
                    crate::numerics::binomial_pmf(x, n, p).unwrap()
                } else {
                    0.0
                }
            });
        }
        let r = local_average_errors(&cp, n, &model).unwrap();
        // The wide rule integrates step functions, so only ~1e-4 agreement is expected.
        assert!((r.alpha_l - al).abs() < 2e-4, "{} vs {al}", r.alpha_l);
        assert!((r.alpha_u - au).abs() < 2e-4, "{} vs {au}", r.alpha_u);
    }

    #[test]
    fn node_count_converged() {
        for m in [Method::Wald, Method::ClopperPearsonMidP, Method::WaldLogitModified] {
            for &(n, lambda) in &[(2048u64, 0.11), (64, 8.0), (2048, 60.0)] {
                let model = RandomProportionModel::from_lambda(lambda, n, 1.2).unwrap();
                let a = local_average(&est(m), n, &model, 64).unwrap();
                let b = local_average(&est(m), n, &model, 256).unwrap();
                assert!(
                    (a.errors.alpha_l - b.errors.alpha_l).abs() < 1e-8,
                    "{m} n={n} λ={lambda}"
                );
                assert!(
                    (a.errors.alpha_u - b.errors.alpha_u).abs() < 1e-8,
                    "{m} n={n} λ={lambda}"
                );
                assert!((a.w_l - b.w_l).abs() < 1e-8 && (a.w_u - b.w_u).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn degenerate_cases() {
        let model = RandomProportionModel::from_lambda(3.0, 50, 1.2).unwrap();
        let r = local_average_errors(&Uninformative, 50, &model).unwrap();
        assert_eq!((r.alpha_l, r.alpha_u), (0.0, 0.0));
        let flat = RandomProportionModel::new(0.06, 1.0).unwrap();
        let a = local_average_errors(&est(Method::Wilson), 50, &flat).unwrap();
        let b = conditional_errors(&est(Method::Wilson), 50, 0.06).unwrap();
        assert_eq!((a.alpha_l, a.alpha_u), (b.alpha_l, b.alpha_u));
    }

    #[test]
    fn self_reference_ratio_is_one() {
        let midp = est(Method::ClopperPearsonMidP);
        let model = RandomProportionModel::from_lambda(4.0, 64, 1.2).unwrap();
        let r = local_average_half_widths(&midp, 64, &model, Some(&midp)).unwrap();
        assert_eq!(r.ratio_l, Some(1.0));
        assert_eq!(r.ratio_u, Some(1.0));
        assert_eq!(r.relative_to.as_deref(), Some("clopper_pearson_midp"));
        let cp = local_average_half_widths(&est(Method::ClopperPearson), 64, &model, Some(&midp)).unwrap();
        assert!(cp.ratio_l.unwrap() >= 1.0 && cp.ratio_u.unwrap() >= 1.0);
    }
}
