use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::Settings;
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "propci",
    version,
    about = "Binomial proportion confidence intervals and their one-sided errors"
)]
pub struct Cli {
    /// Flat `key = value` settings file; flags take precedence over it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interval for one observed count.
    Interval {
        /// Observed successes.
        #[arg(long)]
        x: u64,
        /// Render the percent line from the clamped bounds.
        #[arg(long)]
        clamp: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// The worked example: eight estimators at 1/225 and 2/46, as CSV.
    Table2 {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// One-sided error curves over λ.
    Curves {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Local-average errors with half-widths, relative to a reference method.
    Halfwidths {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Largest one-sided error over the grid.
    Scan {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check a minimum-count rule: max error where the rule holds vs 1.5·α/2.
    Validity {
        /// Required minimum of min(x, n - x).
        #[arg(long)]
        threshold: u64,
        /// λ points per sample size, log-spaced in [1, n/2].
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Qualitative properties, with live checks on small samples.
    Properties {
        /// Largest n used by the live checks.
        #[arg(long, default_value_t = 40)]
        max_n: u64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Location μ of the logit-normal model with mean p0.
    Calibrate {
        #[arg(long)]
        p0: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Monte Carlo check of the exact error and half-width computations.
    Oracle {
        /// Expected successes; p0 = λ/n.
        #[arg(long, conflicts_with = "p0")]
        lambda: Option<f64>,
        #[arg(long)]
        p0: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// Settings shared by every subcommand. Each flag mirrors a config-file key.
#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Comma-separated method ids, or `all`.
    #[arg(long, visible_alias = "methods", value_name = "IDS")]
    pub method: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    /// Comma-separated sample sizes.
    #[arg(long, value_name = "SIZES")]
    pub n: Option<String>,
    #[arg(long)]
    pub lambda_min: Option<String>,
    #[arg(long)]
    pub lambda_max: Option<String>,
    #[arg(long)]
    pub lambda_points: Option<String>,
    /// Scale of the proportion (or size) variation as an odds ratio.
    #[arg(long)]
    pub or_s: Option<String>,
    /// conditional, local_average or random_size.
    #[arg(long)]
    pub regime: Option<String>,
    /// Reference method for half-width ratios, or `none`.
    #[arg(long)]
    pub reference: Option<String>,
    /// Gauss-Legendre nodes per outcome.
    #[arg(long)]
    pub nodes: Option<String>,
    #[arg(long)]
    pub abs_p: Option<String>,
    #[arg(long)]
    pub abs_prob: Option<String>,
    #[arg(long)]
    pub max_iter: Option<String>,
    /// alpha or half_alpha.
    #[arg(long)]
    pub wilson_level: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub draws: Option<String>,
    /// text, csv or svg.
    #[arg(long)]
    pub format: Option<String>,
    /// Write to this file instead of stdout.
    #[arg(long, short = 'o')]
    pub output: Option<String>,
}

impl CommonArgs {
    /// Apply every given flag on top of `settings`.
    pub fn apply(&self, settings: &mut Settings) -> CliResult<()> {
        let pairs = [
            ("method", &self.method),
            ("alpha", &self.alpha),
            ("n", &self.n),
            ("lambda_min", &self.lambda_min),
            ("lambda_max", &self.lambda_max),
            ("lambda_points", &self.lambda_points),
            ("or_s", &self.or_s),
            ("regime", &self.regime),
            ("reference", &self.reference),
            ("nodes", &self.nodes),
            ("abs_p", &self.abs_p),
            ("abs_prob", &self.abs_prob),
            ("max_iter", &self.max_iter),
            ("wilson_level", &self.wilson_level),
            ("seed", &self.seed),
            ("draws", &self.draws),
            ("format", &self.format),
            ("output", &self.output),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                settings
                    .set(key, v)
                    .map_err(|e| CliError::usage(format!("--{}: {e}", key.replace('_', "-"))))?;
            }
        }
        Ok(())
    }
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Interval { common, .. }
            | Command::Table2 { common }
            | Command::Curves { common }
            | Command::Halfwidths { common }
            | Command::Scan { common }
            | Command::Validity { common, .. }
            | Command::Properties { common, .. }
            | Command::Calibrate { common, .. }
            | Command::Oracle { common, .. } => common,
        }
    }
}
