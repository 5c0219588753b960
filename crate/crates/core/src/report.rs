//! Number rendering and the worked-example layout shared by the front ends.

use crate::error::Result;
use crate::estimators::{interval, BinomialSample, ConfidenceSpec, Method};

/// Render a proportion as a percentage rounded half away from zero to one
/// decimal. Magnitudes under 0.1% keep two decimals so that small bounds stay
/// distinguishable from zero; an exact zero is written `0`.
pub fn format_percent(v: f64) -> String {
    let pct = 100.0 * v;
    if pct == 0.0 {
        return "0".to_string();
    }
    let decimals = if pct.abs() < 0.1 { 2 } else { 1 };
    let scale = 10f64.powi(decimals);
    let rounded = (pct * scale).round() / scale;
    if rounded == 0.0 {
        return "0".to_string();
    }
    format!("{rounded:.*}", decimals as usize)
}

/// `"a% to b%"`, with a bare `0` for a zero bound.
pub fn format_percent_interval(lower: f64, upper: f64) -> String {
    let side = |v: f64| {
        let s = format_percent(v);
        if s == "0" {
            s
        } else {
            s + "%"
        }
    };
    format!("{} to {}", side(lower), side(upper))
}

/// Shortest `%.9g`-style rendering: nine significant digits, trailing zeros
/// trimmed, exponent form outside `[1e-4, 1e9)`.
pub fn format_significant(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Tolerance lines around the nominal one-sided error `α/2`: a relative
/// excess of 50% above and its reciprocal below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceLines {
    pub nominal: f64,
    pub upper_line: f64,
    pub lower_line: f64,
}

impl ReferenceLines {
    pub const FACTOR: f64 = 1.5;

    pub fn for_alpha(alpha: f64) -> Self {
        let nominal = alpha / 2.0;
        Self {
            nominal,
            upper_line: nominal * Self::FACTOR,
            lower_line: nominal / Self::FACTOR,
        }
    }
}

/// Estimators of the worked example, in display order.
pub const WORKED_EXAMPLE_METHODS: [Method; 8] = [
    Method::BootPercentile,
    Method::BootBasic,
    Method::Wald,
    Method::ClopperPearson,
    Method::ClopperPearsonMidP,
    Method::Wilson,
    Method::WaldLogitModified,
    Method::LikelihoodRatioModified,
];

/// The two observed counts of the worked example.
pub const WORKED_EXAMPLE_SAMPLES: [(u64, u64); 2] = [(1, 225), (2, 46)];

#[derive(Debug, Clone, PartialEq)]
pub struct WorkedExampleRow {
    pub method: Method,
    pub x: u64,
    pub n: u64,
    /// Unclamped bounds, as reported in the table.
    pub lower_exact: f64,
    pub upper_exact: f64,
}

impl WorkedExampleRow {
    pub fn lower_pct(&self) -> String {
        format_percent(self.lower_exact)
    }

    pub fn upper_pct(&self) -> String {
        format_percent(self.upper_exact)
    }

    pub fn rendered(&self) -> String {
        format_percent_interval(self.lower_exact, self.upper_exact)
    }
}

/// All estimator × sample cells of the worked example, method-major.
pub fn worked_example(conf: &ConfidenceSpec) -> Result<Vec<WorkedExampleRow>> {
    let mut rows = Vec::with_capacity(16);
    for method in WORKED_EXAMPLE_METHODS {
        for (x, n) in WORKED_EXAMPLE_SAMPLES {
            let ci = interval(&method.into(), BinomialSample::new(x, n)?, conf)?;
            rows.push(WorkedExampleRow {
                method,
                x,
                n,
                lower_exact: ci.lower_raw,
                upper_exact: ci.upper_raw,
            });
        }
    }
    Ok(rows)
}
