//! Laws for the true proportion and for the sample size.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::numerics::{find_root_monotone, invlogit, logit, normal_cdf, normal_rule_on, Tolerance, NORMAL_SPAN};

/// Logit-normal law of the true proportion: `logit(P) ~ N(μ, σ²)` with
/// `σ = ln(OR_S)` and `μ` calibrated so that `E[P] = p0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomProportionModel {
    pub p0: f64,
    pub or_s: f64,
    pub sigma: f64,
    pub mu: f64,
}

impl RandomProportionModel {
    pub fn new(p0: f64, or_s: f64) -> Result<Self> {
        if !(p0 > 0.0 && p0 < 1.0) {
            return Err(Error::Domain(format!(
                "expected proportion must lie in (0,1), got {p0}"
            )));
        }
        if !(or_s >= 1.0) || !or_s.is_finite() {
            return Err(Error::Domain(format!(
                "typical odds ratio must be finite and >= 1, got {or_s}"
            )));
        }
        let sigma = or_s.ln();
        Ok(Self {
            p0,
            or_s,
            sigma,
            mu: calibrate_mu(p0, sigma)?,
        })
    }

    /// Model whose expected number of successes in `n` trials is `lambda`.
    pub fn from_lambda(lambda: f64, n: u64, or_s: f64) -> Result<Self> {
        Self::new(lambda / n as f64, or_s)
    }

    /// Expected number of successes `n·p0`.
    pub fn lambda(&self, n: u64) -> f64 {
        n as f64 * self.p0
    }

    pub fn is_degenerate(&self) -> bool {
        self.sigma == 0.0
    }
}

const CALIBRATION_NODES: usize = 128;

fn expected_proportion(mu: f64, sigma: f64) -> f64 {
    normal_rule_on(0.0, 1.0, -NORMAL_SPAN, NORMAL_SPAN, CALIBRATION_NODES).integrate(|z| invlogit(mu + sigma * z))
}

type CalibrationCache = RwLock<HashMap<(u64, u64), f64>>;

/// Location `μ` with `E[invlogit(μ + σZ)] = p0`. Results are memoized.
pub fn calibrate_mu(p0: f64, sigma: f64) -> Result<f64> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::Domain(format!(
            "expected proportion must lie in (0,1), got {p0}"
        )));
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!("sigma must be finite and >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(logit(p0));
    }
    if p0 == 0.5 {
        return Ok(0.0);
    }
    static CACHE: OnceLock<CalibrationCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (p0.to_bits(), sigma.to_bits());
    if let Some(&mu) = cache.read().expect("calibration cache poisoned").get(&key) {
        return Ok(mu);
    }
    // Jensen pulls E[P] toward 1/2, so μ lies beyond logit(p0); widen until bracketed.
    let centre = logit(p0);
    let mut width = 1.0 + sigma * sigma;
    let f = |mu: f64| expected_proportion(mu, sigma) - p0;
    while f(centre - width) > 0.0 || f(centre + width) < 0.0 {
        width *= 2.0;
    }
    let tol = Tolerance::default();
    let mu = find_root_monotone(f, centre - width, centre + width, &tol)?;
    cache
        .write()
        .expect("calibration cache poisoned")
        .entry(key)
        .or_insert(mu);
    Ok(mu)
}

/// Random sample size `N = max(1, round(n_center·exp(σ_N Z)))` at a constant
/// proportion `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSampleSizeModel {
    pub n_center: u64,
    pub sigma_n: f64,
    pub p: f64,
}

/// Normal mass beyond this many standard deviations is folded into the
/// extreme sizes.
const SIZE_SPAN: f64 = 7.0;

impl RandomSampleSizeModel {
    pub fn new(n_center: u64, sigma_n: f64, p: f64) -> Result<Self> {
        if n_center == 0 {
            return Err(Error::Domain("nominal sample size must be positive".into()));
        }
        if !(sigma_n >= 0.0) || !sigma_n.is_finite() {
            return Err(Error::Domain(format!("sigma_n must be finite and >= 0, got {sigma_n}")));
        }
        super::check_proportion(p)?;
        Ok(Self { n_center, sigma_n, p })
    }

    pub fn realized(&self, z: f64) -> u64 {
        (self.n_center as f64 * (self.sigma_n * z).exp()).round().max(1.0) as u64
    }

    /// Support of `N` with probabilities, ascending in `N`, summing to one.
    pub fn size_distribution(&self) -> Vec<(u64, f64)> {
        if self.sigma_n == 0.0 {
            return vec![(self.n_center, 1.0)];
        }
        let lo = self.realized(-SIZE_SPAN);
        let hi = self.realized(SIZE_SPAN);
        let nc = self.n_center as f64;
        // z at which the rounded size steps from k to k + 1.
        let cut = |k: u64| ((k as f64 + 0.5) / nc).ln() / self.sigma_n;
        let mut out = Vec::with_capacity((hi - lo + 1) as usize);
        let mut below = 0.0;
        for k in lo..=hi {
            let upper = if k == hi { 1.0 } else { normal_cdf(cut(k)) };
            let mass = upper - below;
            if mass > 0.0 {
                out.push((k, mass));
            }
            below = upper;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibration_trivial_cases() {
        assert_eq!(calibrate_mu(0.5, 0.7).unwrap(), 0.0);
        assert_eq!(calibrate_mu(0.2, 0.0).unwrap(), logit(0.2));
        assert!(calibrate_mu(0.0, 0.1).is_err());
        assert!(calibrate_mu(0.3, -0.1).is_err());
    }

    #[test]
    fn calibration_hits_expected_proportion() {
        for &p0 in &[2.4e-5, 1e-3, 0.0218, 0.1, 0.7, 0.999] {
            for &or in &[1.05f64, 1.2, 3.0] {
                let m = RandomProportionModel::new(p0, or).unwrap();
                let e = expected_proportion(m.mu, m.sigma);
                assert!((e - p0).abs() < 1e-12, "p0={p0} or={or}");
                if p0 < 0.5 {
                    assert!(m.mu < logit(p0));
                }
            }
        }
    }

    #[test]
    fn calibration_against_simulation() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let sigma = 1.2f64.ln();
        let mu = calibrate_mu(0.1, sigma).unwrap();
        assert!(mu < logit(0.1));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let draws = 10_000_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..draws {
            let z: f64 = StandardNormal.sample(&mut rng);
            let p = invlogit(mu + sigma * z);
            s += p;
            s2 += p * p;
        }
        let mean = s / draws as f64;
        let se = ((s2 / draws as f64 - mean * mean) / draws as f64).sqrt();
        assert!((mean - 0.1).abs() < 3.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn size_distribution_is_normalized() {
        let m = RandomSampleSizeModel::new(64, 1.2f64.ln(), 0.1).unwrap();
        let d = m.size_distribution();
        let total: f64 = d.iter().map(|&(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(d.windows(2).all(|w| w[0].0 < w[1].0));
        let mean: f64 = d.iter().map(|&(k, w)| k as f64 * w).sum();
        // E[N] ≈ n_c·exp(σ²/2)
        assert!((mean - 64.0 * (0.5 * 1.2f64.ln().powi(2)).exp()).abs() < 0.1, "{mean}");
        let small = RandomSampleSizeModel::new(2, 2.0, 0.3).unwrap().size_distribution();
        assert_eq!(small[0].0, 1);
        let fixed = RandomSampleSizeModel::new(50, 0.0, 0.3).unwrap();
        assert_eq!(fixed.size_distribution(), vec![(50, 1.0)]);
    }
}
