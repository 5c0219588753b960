//! Seeded simulation of the two-step experiment, used to cross-check the
//! exact and quadrature evaluators.

use std::collections::HashMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};

use super::{RandomProportionModel, RandomSampleSizeModel};
use crate::error::{Error, Result};
use crate::estimators::{BoundTable, IntervalProcedure};
use crate::numerics::invlogit;

/// What to simulate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleDesign {
    /// Fixed `n` and `p`.
    Conditional { n: u64, p: f64 },
    /// Fixed `n`, proportion drawn from the logit-normal model.
    LocalAverage { n: u64, model: RandomProportionModel },
    /// Size drawn from the size model, fixed proportion.
    RandomSize(RandomSampleSizeModel),
}

/// Empirical error rates and half-widths with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub draws: u64,
    pub alpha_l: f64,
    pub alpha_u: f64,
    pub se_l: f64,
    pub se_u: f64,
    pub w_l: f64,
    pub w_u: f64,
    pub se_w_l: f64,
    pub se_w_u: f64,
}

const CHUNK: u64 = 1 << 16;
const MIN_DRAWS: u64 = 100_000;

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    miss_l: u64,
    miss_u: u64,
    wl: f64,
    wl2: f64,
    wu: f64,
    wu2: f64,
}

impl Sums {
    fn merge(mut self, o: Sums) -> Sums {
        self.miss_l += o.miss_l;
        self.miss_u += o.miss_u;
        self.wl += o.wl;
        self.wl2 += o.wl2;
        self.wu += o.wu;
        self.wu2 += o.wu2;
        self
    }
}

fn run_chunk(proc: &dyn IntervalProcedure, design: &OracleDesign, seed: u64, chunk: u64, draws: u64) -> Result<Sums> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut tables: HashMap<u64, Arc<dyn BoundTable>> = HashMap::new();
    let mut s = Sums::default();
    for _ in 0..draws {
        let (n, p) = match *design {
            OracleDesign::Conditional { n, p } => (n, p),
            OracleDesign::LocalAverage { n, model } => {
                let z: f64 = StandardNormal.sample(&mut rng);
                (n, invlogit(model.mu + model.sigma * z))
            }
            OracleDesign::RandomSize(m) => {
                let z: f64 = StandardNormal.sample(&mut rng);
                (m.realized(z), m.p)
            }
        };
        let binom = Binomial::new(n, p).map_err(|e| Error::Domain(e.to_string()))?;
        let x = binom.sample(&mut rng);
        let table = match tables.get(&n) {
            Some(t) => t,
            None => tables.entry(n).or_insert(proc.table(n)?),
        };
        let (lower, upper) = (table.lower(x)?, table.upper(x)?);
        let point = x as f64 / n as f64;
        s.miss_l += u64::from(lower > p);
        s.miss_u += u64::from(upper < p);
        let (wl, wu) = (point - lower, upper - point);
        s.wl += wl;
        s.wl2 += wl * wl;
        s.wu += wu;
        s.wu2 += wu * wu;
    }
    Ok(s)
}

/// Simulate `draws` experiments from `seed`. Draws are split in fixed chunks,
/// each on its own ChaCha stream, so results do not depend on thread count.
pub fn monte_carlo_oracle(
    proc: &dyn IntervalProcedure,
    design: OracleDesign,
    draws: u64,
    seed: u64,
) -> Result<OracleReport> {
    if draws < MIN_DRAWS {
        return Err(Error::Domain(format!(
            "at least {MIN_DRAWS} draws are required, got {draws}"
        )));
    }
    let chunks: Vec<(u64, u64)> = (0..draws.div_ceil(CHUNK))
        .map(|c| (c, CHUNK.min(draws - c * CHUNK)))
        .collect();
    let run = |&(c, k): &(u64, u64)| run_chunk(proc, &design, seed, c, k);
    #[cfg(feature = "parallel")]
    let parts: Vec<Sums> = {
        use rayon::prelude::*;
        chunks.par_iter().map(run).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Sums> = chunks.iter().map(run).collect::<Result<_>>()?;
    let s = parts.into_iter().fold(Sums::default(), Sums::merge);

    let d = draws as f64;
    let rate = |k: u64| {
        let r = k as f64 / d;
        (r, (r * (1.0 - r) / d).sqrt())
    };
    let mean = |sum: f64, sq: f64| {
        let m = sum / d;
        (m, ((sq / d - m * m).max(0.0) / d).sqrt())
    };
    let (alpha_l, se_l) = rate(s.miss_l);
    let (alpha_u, se_u) = rate(s.miss_u);
    let (w_l, se_w_l) = mean(s.wl, s.wl2);
    let (w_u, se_w_u) = mean(s.wu, s.wu2);
    Ok(OracleReport {
        draws,
        alpha_l,
        alpha_u,
        se_l,
        se_u,
        w_l,
        w_u,
        se_w_l,
        se_w_u,
    })
}
