//! Errors at a fixed proportion averaged over a random sample size.

use super::conditional::conditional_errors;
use super::{ErrorReport, RandomSampleSizeModel, Regime};
use crate::error::Result;
use crate::estimators::IntervalProcedure;

/// `α‴ = E_N[α′(N, p)]` over the discretized size law.
pub fn random_size_errors(proc: &dyn IntervalProcedure, model: &RandomSampleSizeModel) -> Result<ErrorReport> {
    let (mut al, mut au) = (0.0, 0.0);
    for (n, w) in model.size_distribution() {
        let r = conditional_errors(proc, n, model.p)?;
        al += w * r.alpha_l;
        au += w * r.alpha_u;
    }
    Ok(ErrorReport::new(al, au, Regime::RandomSize))
}
