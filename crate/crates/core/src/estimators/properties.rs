//! Static qualitative properties of each estimator.

use super::Method;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodProperties {
    /// Interval for failures mirrors the interval for successes.
    pub equivariant: bool,
    /// Bounds have a closed form (no numerical search).
    pub analytic_solution: bool,
    /// Bounds strictly monotone along `x`, `n` and `α`.
    pub monotone_in_x: bool,
    /// Extends naturally to regression models.
    pub generalizes_multivariate: bool,
    pub deterministic: bool,
}

pub fn method_properties(method: Method) -> MethodProperties {
    use Method::*;
    let (analytic_solution, monotone_in_x, generalizes_multivariate) = match method {
        Wald => (true, false, true),
        Wilson => (true, true, false),
        WilsonModified => (true, true, false),
        ArcsineBartlett => (true, true, false),
        WaldLogitModified => (true, true, true),
        LikelihoodRatioModified => (false, true, true),
        JeffreysModified => (true, false, false),
        Blaker => (false, false, false),
        ClopperPearson => (true, true, true),
        ClopperPearsonMidP => (false, true, true),
        WaldCc => (true, false, false),
        WilsonCc => (true, true, false),
        // Resampling quantiles move in steps of 1/n, so they are not strictly monotone.
        BootPercentile | BootBasic | CompositeDellas => (false, false, false),
    };
    MethodProperties {
        equivariant: true,
        analytic_solution,
        monotone_in_x,
        generalizes_multivariate,
        deterministic: true,
    }
}
