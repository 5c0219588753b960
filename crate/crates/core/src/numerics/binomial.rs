//! Binomial probabilities.

use crate::error::{domain, Result};
use crate::numerics::special::{inc_beta_unchecked, log_dbinom_raw};

fn check(x: u64, n: u64, p: f64) -> Result<()> {
    if x > n {
        return domain(format!("success count {x} exceeds trial count {n}"));
    }
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("proportion must lie in [0,1], got {p}"));
    }
    Ok(())
}

/// `ln Pr(X = x)` for `X ~ Binomial(n, p)`, using the saddle-point expansion
/// so that large `n` keeps full relative precision.
pub fn log_binomial_pmf(x: u64, n: u64, p: f64) -> Result<f64> {
    check(x, n, p)?;
    Ok(log_dbinom_raw(x as f64, n as f64, p, 1.0 - p))
}

pub fn binomial_pmf(x: u64, n: u64, p: f64) -> Result<f64> {
    log_binomial_pmf(x, n, p).map(f64::exp)
}

/// `Pr(X >= x)`, equal to `I_p(x, n - x + 1)` for `x >= 1`.
pub fn binomial_tail_geq(x: u64, n: u64, p: f64) -> Result<f64> {
    if x == n + 1 && (0.0..=1.0).contains(&p) {
        return Ok(0.0);
    }
    check(x, n, p)?;
    Ok(tail_geq(x, n, p))
}

/// `Pr(X <= x)`.
pub fn binomial_cdf_leq(x: u64, n: u64, p: f64) -> Result<f64> {
    check(x, n, p)?;
    Ok(cdf_leq(x, n, p))
}

pub(crate) fn tail_geq(x: u64, n: u64, p: f64) -> f64 {
    if x == 0 {
        1.0
    } else if x > n {
        0.0
    } else {
        inc_beta_unchecked(x as f64, (n - x + 1) as f64, p, 1.0 - p)
    }
}

pub(crate) fn cdf_leq(x: u64, n: u64, p: f64) -> f64 {
    if x >= n {
        1.0
    } else {
        inc_beta_unchecked((n - x) as f64, (x + 1) as f64, 1.0 - p, p)
    }
}

/// `ln C(n, k)`.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k == 0 || k == n {
        return 0.0;
    }
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Binomial coefficient as a running product, independent of the saddle-point kernel.
    fn product_choose(n: u64, k: u64) -> f64 {
        let k = k.min(n - k);
        (0..k).fold(1.0, |c, i| c * (n - i) as f64 / (i + 1) as f64)
    }

    fn brute_pmf(x: u64, n: u64, p: f64) -> f64 {
        product_choose(n, x) * p.powi(x as i32) * (1.0 - p).powi((n - x) as i32)
    }

    #[test]
    fn degenerate_and_symmetric_cases() {
        assert_eq!(log_binomial_pmf(0, 5, 0.0).unwrap(), 0.0);
        assert_eq!(log_binomial_pmf(3, 5, 0.0).unwrap(), f64::NEG_INFINITY);
        assert_eq!(log_binomial_pmf(5, 5, 1.0).unwrap(), 0.0);
        let v = log_binomial_pmf(1, 2, 0.5).unwrap();
        assert!((v - 0.5f64.ln()).abs() < 1e-15, "{v}");
        assert!(log_binomial_pmf(6, 5, 0.5).is_err());
        assert!(log_binomial_pmf(1, 5, 1.5).is_err());
    }

    #[test]
    fn pmf_matches_direct_product() {
        // 46 * 45 * 44 / 6 * (2/46)^3 * (44/46)^43
        let p: f64 = 2.0 / 46.0;
        let direct = 46.0 * 45.0 * 44.0 / 6.0 * p.powi(3) * (1.0 - p).powi(43);
        let v = binomial_pmf(3, 46, p).unwrap();
        assert!(((v - direct) / direct).abs() < 1e-13, "{v} vs {direct}");
        assert!((v - 0.184_487_348_921_5).abs() < 1e-12);
    }

    #[test]
    fn pmf_large_n_precision() {
        // Ratio of consecutive terms is exact: (n-x)/(x+1) * p/q.
        let n = 2048;
        let p = 0.013;
        for x in [0u64, 5, 26, 60, 300] {
            let a = log_binomial_pmf(x, n, p).unwrap();
            let b = log_binomial_pmf(x + 1, n, p).unwrap();
            let ratio = ((n - x) as f64 / (x + 1) as f64 * p / (1.0 - p)).ln();
            assert!(((b - a) - ratio).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn pmf_sums_to_one() {
        for &n in &[1u64, 7, 46, 225, 2048] {
            for &p in &[1e-4, 0.02, 0.3, 0.5, 0.91] {
                let s: f64 = (0..=n).map(|x| binomial_pmf(x, n, p).unwrap()).sum();
                assert!((s - 1.0).abs() < 1e-10, "n={n} p={p} sum={s}");
            }
        }
    }

    #[test]
    fn tail_cases() {
        assert_eq!(binomial_tail_geq(0, 10, 0.3).unwrap(), 1.0);
        for &n in &[1u64, 5, 80] {
            for &p in &[0.01, 0.4, 0.9] {
                let v = binomial_tail_geq(1, n, p).unwrap();
                let want = 1.0 - (1.0 - p).powi(n as i32);
                assert!((v - want).abs() < 1e-13);
            }
        }
        let brute: f64 = (5..=20).map(|k| brute_pmf(k, 20, 0.25)).sum();
        assert!((binomial_tail_geq(5, 20, 0.25).unwrap() - brute).abs() < 1e-12);
    }

    #[test]
    fn tail_and_cdf_match_brute_force_summation() {
        for n in (1u64..=200).step_by(13) {
            for &p in &[0.003, 0.11, 0.5, 0.87] {
                let pm: Vec<f64> = (0..=n).map(|x| brute_pmf(x, n, p)).collect();
                for x in 0..=n {
                    let geq: f64 = pm[x as usize..].iter().sum();
                    let leq: f64 = pm[..=x as usize].iter().sum();
                    assert!((binomial_tail_geq(x, n, p).unwrap() - geq).abs() < 1e-11);
                    assert!((binomial_cdf_leq(x, n, p).unwrap() - leq).abs() < 1e-11);
                }
            }
        }
    }

    #[test]
    fn tail_is_monotone_in_p() {
        let mut prev = 0.0;
        for i in 0..=200 {
            let p = f64::from(i) / 200.0;
            let v = binomial_tail_geq(7, 40, p).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }
}
