//! Errors and half-widths at a fixed true proportion.

use super::{check_proportion, ErrorReport, HalfWidthReport, Regime, NEGLIGIBLE_LOG_PMF};
use crate::error::Result;
use crate::estimators::IntervalProcedure;
use crate::numerics::log_dbinom_raw;

/// Visit `(x, Pr(X = x))` for the outcomes whose probability is not negligible.
pub(crate) fn for_each_outcome(n: u64, p: f64, mut f: impl FnMut(u64, f64) -> Result<()>) -> Result<()> {
    let (nf, q) = (n as f64, 1.0 - p);
    for x in 0..=n {
        let lp = log_dbinom_raw(x as f64, nf, p, q);
        if lp >= NEGLIGIBLE_LOG_PMF {
            f(x, lp.exp())?;
        }
    }
    Ok(())
}

/// `α′_L = Σ_{L(x) > p} Pr(X = x)` and `α′_U = Σ_{U(x) < p} Pr(X = x)`.
/// A bound equal to `p` counts as covering.
pub fn conditional_errors(proc: &dyn IntervalProcedure, n: u64, p: f64) -> Result<ErrorReport> {
    check_proportion(p)?;
    let table = proc.table(n)?;
    let (mut al, mut au) = (0.0, 0.0);
    for_each_outcome(n, p, |x, w| {
        if table.lower(x)? > p {
            al += w;
        }
        if table.upper(x)? < p {
            au += w;
        }
        Ok(())
    })?;
    Ok(ErrorReport::new(al, au, Regime::Conditional))
}

/// `E[x/n − L]` and `E[U − x/n]` under `Binomial(n, p)`.
pub fn conditional_half_widths(proc: &dyn IntervalProcedure, n: u64, p: f64) -> Result<HalfWidthReport> {
    check_proportion(p)?;
    let table = proc.table(n)?;
    let (mut wl, mut wu) = (0.0, 0.0);
    for_each_outcome(n, p, |x, w| {
        let point = x as f64 / n as f64;
        wl += w * (point - table.lower(x)?);
        wu += w * (table.upper(x)? - point);
        Ok(())
    })?;
    Ok(HalfWidthReport::absolute(wl, wu))
}
