//! Numerical kernel shared by every estimator and evaluator.

pub(crate) mod binomial;
mod quadrature;
mod roots;
mod special;

pub use binomial::{binomial_cdf_leq, binomial_pmf, binomial_tail_geq, ln_choose, log_binomial_pmf};
pub use quadrature::{
    gauss_legendre, normal_rule_on, truncated_normal_quadrature, QuadratureKind, QuadratureRule, NORMAL_SPAN,
};
pub use roots::{find_root_monotone, infimum_exceeding};
pub use special::{
    chi_square_quantile, invlogit, ln_invlogit, logit, normal_cdf, normal_pdf, normal_quantile, reg_inc_beta,
    reg_inc_beta_inv, reg_lower_gamma,
};

pub(crate) use special::log_dbinom_raw;

use crate::error::{domain, Result};

/// Tolerances for iterative procedures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Absolute tolerance on the proportion scale.
    pub abs_p: f64,
    /// Absolute tolerance on probabilities.
    pub abs_prob: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_p: 1e-10,
            abs_prob: 1e-12,
            max_iter: 200,
        }
    }
}

impl Tolerance {
    pub fn new(abs_p: f64, abs_prob: f64, max_iter: usize) -> Result<Self> {
        if !(abs_p > 0.0 && abs_prob > 0.0) || !abs_p.is_finite() || !abs_prob.is_finite() {
            return domain(format!(
                "tolerances must be strictly positive (abs_p={abs_p}, abs_prob={abs_prob})"
            ));
        }
        if max_iter == 0 {
            return domain("max_iter must be at least 1");
        }
        Ok(Self {
            abs_p,
            abs_prob,
            max_iter,
        })
    }

    pub(crate) fn key(&self) -> (u64, u64, usize) {
        (self.abs_p.to_bits(), self.abs_prob.to_bits(), self.max_iter)
    }
}

impl Eq for Tolerance {}

impl std::hash::Hash for Tolerance {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}
