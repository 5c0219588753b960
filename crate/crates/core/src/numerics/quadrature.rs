//! Gauss-Legendre rules and normal-weighted quadrature on the logit scale.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{domain, Result};
use crate::numerics::special::normal_pdf;

/// Half-width, in standard deviations, of the normal support kept by the rules.
pub const NORMAL_SPAN: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    GaussLegendreOnInterval,
    TruncatedNormal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: QuadratureKind,
}

impl QuadratureRule {
    pub fn empty(kind: QuadratureKind) -> Self {
        Self {
            nodes: Vec::new(),
            weights: Vec::new(),
            kind,
        }
    }

    pub fn integrate(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * g(t)).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[-1, 1]`,
/// nodes ascending. Rules are computed once per `m` and shared.
pub fn gauss_legendre(m: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    type Rules = HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>;
    static CACHE: OnceLock<RwLock<Rules>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.read().expect("quadrature cache poisoned").get(&m) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(compute_gauss_legendre(m));
    cache
        .write()
        .expect("quadrature cache poisoned")
        .entry(m)
        .or_insert(rule)
        .clone()
}

fn compute_gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..m {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = mf * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[m - 1 - i] = z;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// Rule for `∫_lo^hi g(t) φ((t-μ)/σ)/σ dt` with `m` Gauss-Legendre nodes.
/// An empty range gives an empty rule.
pub fn normal_rule_on(mu: f64, sigma: f64, lo: f64, hi: f64, m: usize) -> QuadratureRule {
    if !(hi > lo) {
        return QuadratureRule::empty(QuadratureKind::TruncatedNormal);
    }
    let base = gauss_legendre(m);
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for (&xi, &w) in base.0.iter().zip(&base.1) {
        let t = mid + half * xi;
        nodes.push(t);
        weights.push(w * half * normal_pdf((t - mu) / sigma) / sigma);
    }
    QuadratureRule {
        nodes,
        weights,
        kind: QuadratureKind::TruncatedNormal,
    }
}

/// Quadrature for the normal law `N(μ, σ²)` truncated above at `upper_cut`,
/// realized as Gauss-Legendre on `[μ - 8σ, min(upper_cut, μ + 8σ)]`.
pub fn truncated_normal_quadrature(mu: f64, sigma: f64, upper_cut: f64, m: usize) -> Result<QuadratureRule> {
    if !(sigma > 0.0) || !sigma.is_finite() || !mu.is_finite() {
        return domain(format!("need finite mu and sigma > 0, got mu={mu}, sigma={sigma}"));
    }
    if m < 16 {
        return domain(format!("at least 16 nodes are required, got {m}"));
    }
    if upper_cut.is_nan() {
        return domain("upper cut is NaN");
    }
    let lo = mu - NORMAL_SPAN * sigma;
    let hi = upper_cut.min(mu + NORMAL_SPAN * sigma);
    Ok(normal_rule_on(mu, sigma, lo, hi, m))
}
