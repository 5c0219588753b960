//! Curves over an `(n, λ)` grid, worst-case scans and the validity check.

use super::{
    conditional_errors, local_average, random_size_errors, ErrorReport, HalfWidthReport, RandomProportionModel,
    RandomSampleSizeModel, Regime, Side, DEFAULT_QUADRATURE_NODES,
};
use crate::error::{Error, Result};
use crate::estimators::{ConfidenceSpec, Estimator, IntervalProcedure, Method};
use crate::numerics::binomial::{cdf_leq, tail_geq};
use crate::numerics::{invlogit, normal_rule_on, NORMAL_SPAN};

/// `count` points from `lo` to `hi` inclusive, evenly spaced in `ln`.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let step = (b - a) / (count - 1) as f64;
            (0..count)
                .map(|i| match i {
                    0 => lo,
                    i if i + 1 == count => hi,
                    i => (a + step * i as f64).exp(),
                })
                .collect()
        }
    }
}

/// Sample sizes and expected success counts `λ = n·p0` to evaluate at.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationGrid {
    pub sample_sizes: Vec<u64>,
    /// Ascending.
    pub lambda_values: Vec<f64>,
    pub alpha: f64,
    pub or_s: f64,
    pub quadrature_nodes: usize,
}

impl Default for EvaluationGrid {
    fn default() -> Self {
        Self {
            sample_sizes: vec![32, 64, 2048],
            lambda_values: log_spaced(0.05, 100.0, 400),
            alpha: 0.05,
            or_s: 1.2,
            quadrature_nodes: DEFAULT_QUADRATURE_NODES,
        }
    }
}

impl EvaluationGrid {
    pub fn new(sample_sizes: Vec<u64>, mut lambda_values: Vec<f64>, alpha: f64, or_s: f64) -> Result<Self> {
        if sample_sizes.is_empty() || sample_sizes.contains(&0) {
            return Err(Error::Domain(
                "sample sizes must be a non-empty list of positive counts".into(),
            ));
        }
        if lambda_values.is_empty() || lambda_values.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::Domain(
                "λ values must be a non-empty list of positive numbers".into(),
            ));
        }
        ConfidenceSpec::new(alpha)?;
        if !(or_s >= 1.0) || !or_s.is_finite() {
            return Err(Error::Domain(format!(
                "typical odds ratio must be finite and >= 1, got {or_s}"
            )));
        }
        lambda_values.sort_by(f64::total_cmp);
        Ok(Self {
            sample_sizes,
            lambda_values,
            alpha,
            or_s,
            quadrature_nodes: DEFAULT_QUADRATURE_NODES,
        })
    }

    pub fn with_quadrature_nodes(mut self, nodes: usize) -> Self {
        self.quadrature_nodes = nodes;
        self
    }

    pub fn conf(&self) -> Result<ConfidenceSpec> {
        ConfidenceSpec::new(self.alpha)
    }

    /// `(n, λ)` pairs in evaluation order; pairs with `λ >= n` are skipped.
    pub fn cells(&self) -> Vec<(u64, f64)> {
        self.sample_sizes
            .iter()
            .flat_map(|&n| {
                self.lambda_values
                    .iter()
                    .filter(move |&&l| l < n as f64)
                    .map(move |&l| (n, l))
            })
            .collect()
    }
}

#[cfg(feature = "parallel")]
fn map_cells<T: Send>(cells: &[(u64, f64)], f: impl Fn(u64, f64) -> Result<T> + Sync) -> Result<Vec<T>> {
    use rayon::prelude::*;
    cells.par_iter().map(|&(n, l)| f(n, l)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_cells<T: Send>(cells: &[(u64, f64)], f: impl Fn(u64, f64) -> Result<T> + Sync) -> Result<Vec<T>> {
    cells.iter().map(|&(n, l)| f(n, l)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n: u64,
    pub lambda: f64,
    pub p0: f64,
    pub report: ErrorReport,
}

/// Errors in one regime at `p0 = λ/n` for a single cell.
fn errors_at(
    proc: &dyn IntervalProcedure,
    grid: &EvaluationGrid,
    regime: Regime,
    n: u64,
    lambda: f64,
) -> Result<ErrorReport> {
    let p0 = lambda / n as f64;
    match regime {
        Regime::Conditional => conditional_errors(proc, n, p0),
        Regime::LocalAverage => {
            let model = RandomProportionModel::new(p0, grid.or_s)?;
            local_average(proc, n, &model, grid.quadrature_nodes).map(|r| r.errors)
        }
        Regime::RandomSize => random_size_errors(proc, &RandomSampleSizeModel::new(n, grid.or_s.ln(), p0)?),
    }
}

/// One-sided errors at every grid cell, ordered by `n` (as listed) then `λ`.
pub fn error_curve(proc: &dyn IntervalProcedure, grid: &EvaluationGrid, regime: Regime) -> Result<Vec<CurvePoint>> {
    map_cells(&grid.cells(), |n, lambda| {
        Ok(CurvePoint {
            n,
            lambda,
            p0: lambda / n as f64,
            report: errors_at(proc, grid, regime, n, lambda)?,
        })
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WidthPoint {
    pub n: u64,
    pub lambda: f64,
    pub p0: f64,
    pub errors: ErrorReport,
    pub widths: HalfWidthReport,
}

/// Local-average errors and half-widths at every cell, with ratios against
/// `reference` when given.
pub fn half_width_curve(
    proc: &dyn IntervalProcedure,
    grid: &EvaluationGrid,
    reference: Option<&dyn IntervalProcedure>,
) -> Result<Vec<WidthPoint>> {
    map_cells(&grid.cells(), |n, lambda| {
        let model = RandomProportionModel::from_lambda(lambda, n, grid.or_s)?;
        let own = local_average(proc, n, &model, grid.quadrature_nodes)?;
        let mut widths = HalfWidthReport::absolute(own.w_l, own.w_u);
        if let Some(r) = reference {
            let base = local_average(r, n, &model, grid.quadrature_nodes)?;
            widths = widths.relative(r.label(), (base.w_l, base.w_u));
        }
        Ok(WidthPoint {
            n,
            lambda,
            p0: model.p0,
            errors: own.errors,
            widths,
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanResult {
    pub max: f64,
    pub n: u64,
    pub lambda: f64,
    pub p0: f64,
    pub side: Side,
}

/// Largest one-sided error over the grid; the first cell wins ties.
pub fn max_error_scan(proc: &dyn IntervalProcedure, grid: &EvaluationGrid, regime: Regime) -> Result<ScanResult> {
    let curve = error_curve(proc, grid, regime)?;
    let mut best: Option<ScanResult> = None;
    for pt in curve {
        let (v, side) = pt.report.worst();
        if match best {
            Some(b) => v > b.max,
            None => true,
        } {
            best = Some(ScanResult {
                max: v,
                n: pt.n,
                lambda: pt.lambda,
                p0: pt.p0,
                side,
            });
        }
    }
    best.ok_or_else(|| Error::EmptyRegion("the grid has no cell with λ < n".into()))
}

/// Grid for the validity check: `points` log-spaced `λ` in `[1, n/2]` per `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityGrid {
    pub sample_sizes: Vec<u64>,
    pub points: usize,
    pub or_s: f64,
}

impl Default for ValidityGrid {
    fn default() -> Self {
        Self {
            sample_sizes: vec![256, 2048],
            points: 200,
            or_s: 1.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub threshold: u64,
    pub alpha: f64,
    /// `1.5·α/2`.
    pub limit: f64,
    pub max_error: f64,
    pub n: u64,
    pub lambda: f64,
    pub side: Side,
    pub qualifying_points: usize,
    pub pass: bool,
}

/// Mixed probability below which a cell counts as meeting the count rule.
const RULE_VIOLATION_LIMIT: f64 = 1e-6;

/// `E_P[Pr(min(X, n − X) <= threshold)]`.
fn rule_violation(n: u64, threshold: u64, model: &RandomProportionModel) -> f64 {
    if 2 * threshold + 1 >= n {
        return 1.0;
    }
    let prob = |p: f64| cdf_leq(threshold, n, p) + tail_geq(n - threshold, n, p);
    if model.is_degenerate() {
        return prob(model.p0);
    }
    let (mu, s) = (model.mu, model.sigma);
    normal_rule_on(mu, s, mu - NORMAL_SPAN * s, mu + NORMAL_SPAN * s, 128).integrate(|t| prob(invlogit(t)))
}

/// Worst one-sided local-average error of `proc` over the cells where
/// `min(x, n − x) > threshold` holds with probability above `1 − 1e-6`.
pub fn validity_check(
    proc: &dyn IntervalProcedure,
    threshold: u64,
    alpha: f64,
    grid: &ValidityGrid,
) -> Result<ValidityReport> {
    let mut cells = Vec::new();
    for &n in &grid.sample_sizes {
        for lambda in log_spaced(1.0, n as f64 / 2.0, grid.points) {
            let model = RandomProportionModel::from_lambda(lambda, n, grid.or_s)?;
            if rule_violation(n, threshold, &model) < RULE_VIOLATION_LIMIT {
                cells.push((n, lambda));
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::EmptyRegion(format!(
            "no grid point satisfies min(x, n - x) > {threshold} with the required probability"
        )));
    }
    let reports = map_cells(&cells, |n, lambda| {
        let model = RandomProportionModel::from_lambda(lambda, n, grid.or_s)?;
        local_average(proc, n, &model, DEFAULT_QUADRATURE_NODES).map(|r| r.errors)
    })?;
    let (mut worst, mut at, mut side) = (f64::NEG_INFINITY, cells[0], Side::Lower);
    for (cell, r) in cells.iter().zip(&reports) {
        let (v, s) = r.worst();
        if v > worst {
            (worst, at, side) = (v, *cell, s);
        }
    }
    let limit = 1.5 * alpha / 2.0;
    Ok(ValidityReport {
        threshold,
        alpha,
        limit,
        max_error: worst,
        n: at.0,
        lambda: at.1,
        side,
        qualifying_points: cells.len(),
        pass: worst <= limit,
    })
}

/// [`validity_check`] for the Wald interval.
pub fn wald_validity_check(threshold: u64, conf: ConfidenceSpec, grid: &ValidityGrid) -> Result<ValidityReport> {
    validity_check(&Estimator::new(Method::Wald, conf), threshold, conf.alpha(), grid)
}
