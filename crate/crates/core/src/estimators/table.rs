//! Per-`(method, n, α)` bound tables, filled lazily and shared.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use super::{clamp_unit, interval, lower_bound, BinomialSample, ConfidenceSpec, MethodSpec};
use crate::error::Result;

/// Clamped bounds for every outcome `x = 0..=n` at a fixed sample size.
pub trait BoundTable: Send + Sync {
    fn n(&self) -> u64;
    fn lower(&self, x: u64) -> Result<f64>;
    fn upper(&self, x: u64) -> Result<f64>;
}

/// Anything that yields a bound table per sample size.
pub trait IntervalProcedure: Send + Sync {
    fn label(&self) -> String;
    fn table(&self, n: u64) -> Result<Arc<dyn BoundTable>>;
}

const CHUNK: usize = 64;

/// Write-once cells allocated in chunks on first touch.
struct LazyCells {
    chunks: Vec<OnceLock<Box<[OnceLock<f64>]>>>,
}

impl LazyCells {
    fn new(len: usize) -> Self {
        Self {
            chunks: (0..len.div_ceil(CHUNK)).map(|_| OnceLock::new()).collect(),
        }
    }

    fn cell(&self, i: usize) -> &OnceLock<f64> {
        let chunk = self.chunks[i / CHUNK].get_or_init(|| (0..CHUNK).map(|_| OnceLock::new()).collect());
        &chunk[i % CHUNK]
    }

    fn get_or_compute(&self, i: usize, f: impl FnOnce() -> Result<f64>) -> Result<f64> {
        let cell = self.cell(i);
        if let Some(v) = cell.get() {
            return Ok(*v);
        }
        let v = f()?;
        // A concurrent writer may have stored the same value first.
        Ok(*cell.get_or_init(|| v))
    }
}

struct MethodTable {
    spec: MethodSpec,
    conf: ConfidenceSpec,
    n: u64,
    raw_lower: LazyCells,
    raw_upper: LazyCells,
}

impl MethodTable {
    fn new(spec: MethodSpec, conf: ConfidenceSpec, n: u64) -> Self {
        let len = n as usize + 1;
        Self {
            spec,
            conf,
            n,
            raw_lower: LazyCells::new(len),
            raw_upper: LazyCells::new(len),
        }
    }

    fn sample(&self, x: u64) -> Result<BinomialSample> {
        BinomialSample::new(x, self.n)
    }

    fn raw_lower(&self, x: u64) -> Result<f64> {
        if self.spec.method.upper_by_mirroring() {
            self.raw_lower
                .get_or_compute(x as usize, || lower_bound(&self.spec, self.sample(x)?, &self.conf))
        } else {
            self.fill_direct(x).map(|(lo, _)| lo)
        }
    }

    fn raw_upper(&self, x: u64) -> Result<f64> {
        if self.spec.method.upper_by_mirroring() {
            Ok(1.0 - self.raw_lower(self.n - x)?)
        } else {
            self.fill_direct(x).map(|(_, hi)| hi)
        }
    }

    fn fill_direct(&self, x: u64) -> Result<(f64, f64)> {
        let i = x as usize;
        if let (Some(lo), Some(hi)) = (self.raw_lower.cell(i).get(), self.raw_upper.cell(i).get()) {
            return Ok((*lo, *hi));
        }
        let ci = interval(&self.spec, self.sample(x)?, &self.conf)?;
        let lo = self.raw_lower.get_or_compute(i, || Ok(ci.lower_raw))?;
        let hi = self.raw_upper.get_or_compute(i, || Ok(ci.upper_raw))?;
        Ok((lo, hi))
    }
}

impl BoundTable for MethodTable {
    fn n(&self) -> u64 {
        self.n
    }

    fn lower(&self, x: u64) -> Result<f64> {
        self.raw_lower(x).map(clamp_unit)
    }

    fn upper(&self, x: u64) -> Result<f64> {
        self.raw_upper(x).map(clamp_unit)
    }
}

/// An estimator at a fixed confidence level. Its bound tables are cached
/// process-wide and filled on demand, so evaluators can read them freely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Estimator {
    pub spec: MethodSpec,
    pub conf: ConfidenceSpec,
}

impl Estimator {
    pub fn new(spec: impl Into<MethodSpec>, conf: ConfidenceSpec) -> Self {
        Self {
            spec: spec.into(),
            conf,
        }
    }
}

type TableCache = RwLock<HashMap<(Estimator, u64), Arc<MethodTable>>>;

fn table_cache() -> &'static TableCache {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

impl IntervalProcedure for Estimator {
    fn label(&self) -> String {
        self.spec.method.id().to_string()
    }

    fn table(&self, n: u64) -> Result<Arc<dyn BoundTable>> {
        BinomialSample::new(0, n)?;
        let key = (*self, n);
        if let Some(t) = table_cache().read().expect("table cache poisoned").get(&key) {
            return Ok(t.clone());
        }
        let mut cache = table_cache().write().expect("table cache poisoned");
        let t = cache
            .entry(key)
            .or_insert_with(|| Arc::new(MethodTable::new(self.spec, self.conf, n)))
            .clone();
        Ok(t)
    }
}

/// A table of explicit bounds, for procedures not in the catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedTable {
    bounds: Vec<(f64, f64)>,
}

impl FixedTable {
    /// `bounds[x]` is the `(lower, upper)` pair for outcome `x`; values are clamped.
    pub fn new(bounds: Vec<(f64, f64)>) -> Self {
        assert!(!bounds.is_empty(), "a bound table needs at least one outcome");
        Self {
            bounds: bounds
                .into_iter()
                .map(|(l, u)| (clamp_unit(l), clamp_unit(u)))
                .collect(),
        }
    }

    pub fn from_fn(n: u64, f: impl Fn(u64) -> (f64, f64)) -> Self {
        Self::new((0..=n).map(f).collect())
    }
}

impl BoundTable for FixedTable {
    fn n(&self) -> u64 {
        self.bounds.len() as u64 - 1
    }

    fn lower(&self, x: u64) -> Result<f64> {
        Ok(self.bounds[x as usize].0)
    }

    fn upper(&self, x: u64) -> Result<f64> {
        Ok(self.bounds[x as usize].1)
    }
}
