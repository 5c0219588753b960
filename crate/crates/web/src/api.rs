//! Plain-Rust side of the browser exports, callable from native tests.

use propci_core::estimators::{interval, BinomialSample, ConfidenceSpec, Estimator, Method};
use propci_core::evaluation::{error_curve, half_width_curve, log_spaced, EvaluationGrid, Regime};
use propci_core::report::format_percent_interval;
use propci_core::{Error, Result};
use serde_json::{json, Value};

/// Largest λ grid the page may request in one call.
pub const MAX_POINTS: usize = 2000;

/// Method ids in display order, headline methods first.
pub fn method_ids() -> Value {
    let mut ids: Vec<&str> = Method::HEADLINE.iter().map(Method::id).collect();
    ids.extend(
        Method::ALL
            .iter()
            .filter(|m| !Method::HEADLINE.contains(m))
            .map(Method::id),
    );
    json!(ids)
}

/// Every method's interval for `x` successes out of `n`.
pub fn interval_table(x: u64, n: u64, alpha: f64) -> Result<Value> {
    let conf = ConfidenceSpec::new(alpha)?;
    let sample = BinomialSample::new(x, n)?;
    let rows = Method::ALL
        .iter()
        .map(|&m| {
            let ci = interval(&m.into(), sample, &conf)?;
            Ok(json!({
                "method": m.id(),
                "point": ci.point,
                "lower_raw": ci.lower_raw,
                "upper_raw": ci.upper_raw,
                "lower": ci.lower,
                "upper": ci.upper,
                "percent": format_percent_interval(ci.lower_raw, ci.upper_raw),
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Value::Array(rows))
}

fn grid(n: u64, alpha: f64, or_s: f64, lambda_min: f64, lambda_max: f64, points: usize) -> Result<EvaluationGrid> {
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(Error::Domain(format!(
            "points must lie in [2, {MAX_POINTS}], got {points}"
        )));
    }
    if !(lambda_min > 0.0 && lambda_max > lambda_min) {
        return Err(Error::Domain("need 0 < lambda_min < lambda_max".into()));
    }
    EvaluationGrid::new(vec![n], log_spaced(lambda_min, lambda_max, points), alpha, or_s)
}

/// Flat `[λ, α_L, α_U, ...]` triples for one method and sample size.
#[allow(clippy::too_many_arguments)]
pub fn error_curve_flat(
    method: &str,
    regime: &str,
    n: u64,
    alpha: f64,
    or_s: f64,
    lambda_min: f64,
    lambda_max: f64,
    points: usize,
) -> Result<Vec<f64>> {
    let method: Method = method.parse()?;
    let regime: Regime = regime.parse()?;
    let grid = grid(n, alpha, or_s, lambda_min, lambda_max, points)?;
    let est = Estimator::new(method, grid.conf()?);
    Ok(error_curve(&est, &grid, regime)?
        .into_iter()
        .flat_map(|p| [p.lambda, p.report.alpha_l, p.report.alpha_u])
        .collect())
}

/// Flat `[λ, w_L / w_L,ref, w_U / w_U,ref, ...]` triples of local-average
/// half-width ratios. An undefined ratio is NaN.
#[allow(clippy::too_many_arguments)]
pub fn half_width_ratio_flat(
    method: &str,
    reference: &str,
    n: u64,
    alpha: f64,
    or_s: f64,
    lambda_min: f64,
    lambda_max: f64,
    points: usize,
) -> Result<Vec<f64>> {
    let (method, reference): (Method, Method) = (method.parse()?, reference.parse()?);
    let grid = grid(n, alpha, or_s, lambda_min, lambda_max, points)?;
    let conf = grid.conf()?;
    let (est, base) = (Estimator::new(method, conf), Estimator::new(reference, conf));
    Ok(half_width_curve(&est, &grid, Some(&base))?
        .into_iter()
        .flat_map(|p| {
            [
                p.lambda,
                p.widths.ratio_l.unwrap_or(f64::NAN),
                p.widths.ratio_u.unwrap_or(f64::NAN),
            ]
        })
        .collect())
}
