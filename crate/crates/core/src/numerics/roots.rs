//! Bracketing root finders.

use crate::error::{Error, Result};
use crate::numerics::Tolerance;

fn converged(lo: f64, hi: f64) -> bool {
    let mid = 0.5 * (lo + hi);
    hi - lo <= 4.0 * f64::EPSILON * mid.abs() || mid <= lo || mid >= hi
}

fn finish(lo: f64, hi: f64, pick: f64, tol: &Tolerance) -> Result<f64> {
    if hi - lo <= tol.abs_p {
        Ok(pick)
    } else {
        Err(Error::NoConvergence {
            iterations: tol.max_iter,
            width: hi - lo,
        })
    }
}

/// Root of a continuous monotone function on `[lo, hi]` by bisection.
///
/// The bracket is halved until it collapses to machine precision around the
/// root (or `max_iter` halvings); the result is then within `abs_p`.
pub fn find_root_monotone(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: &Tolerance) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.is_nan() || fhi.is_nan() || (flo > 0.0) == (fhi > 0.0) {
        return Err(Error::Bracket { lo, hi });
    }
    let increasing = fhi > 0.0;
    for _ in 0..tol.max_iter {
        if converged(lo, hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    finish(lo, hi, 0.5 * (lo + hi), tol)
}

/// Infimum of `{q in [lo, hi] : f(q) > threshold}` for a nondecreasing (possibly
/// discontinuous) `f`. Returns `lo` when `f(lo)` already exceeds the threshold.
pub fn infimum_exceeding(
    mut f: impl FnMut(f64) -> f64,
    threshold: f64,
    mut lo: f64,
    mut hi: f64,
    tol: &Tolerance,
) -> Result<f64> {
    if f(lo) > threshold {
        return Ok(lo);
    }
    if !(f(hi) > threshold) {
        return Err(Error::Bracket { lo, hi });
    }
    for _ in 0..tol.max_iter {
        if converged(lo, hi) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) > threshold {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    finish(lo, hi, hi, tol)
}
