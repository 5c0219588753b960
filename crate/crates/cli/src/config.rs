//! Run settings: built-in defaults, then a flat `key = value` file, then flags.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use propci_core::estimators::{ConfidenceSpec, Estimator, Method, MethodSpec, SmallCountLevel};
use propci_core::evaluation::{log_spaced, EvaluationGrid, Regime, DEFAULT_QUADRATURE_NODES};
use propci_core::Tolerance;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Svg,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown format `{other}` (expected text, csv or svg)")),
        }
    }
}

pub fn parse_wilson_level(s: &str) -> Result<SmallCountLevel, String> {
    match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
        "alpha" => Ok(SmallCountLevel::Alpha),
        "half_alpha" => Ok(SmallCountLevel::HalfAlpha),
        other => Err(format!("unknown wilson level `{other}` (expected alpha or half_alpha)")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    /// `None` lets each command pick its own method set.
    pub methods: Option<Vec<Method>>,
    pub alpha: f64,
    /// `None` lets each command pick its own sizes.
    pub sample_sizes: Option<Vec<u64>>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_points: usize,
    pub or_s: f64,
    pub regime: Regime,
    pub reference: Option<Method>,
    pub quadrature_nodes: usize,
    pub tolerance: Tolerance,
    pub wilson_level: SmallCountLevel,
    pub seed: u64,
    pub draws: u64,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            methods: None,
            alpha: 0.05,
            sample_sizes: None,
            lambda_min: 0.05,
            lambda_max: 100.0,
            lambda_points: 400,
            or_s: 1.2,
            regime: Regime::LocalAverage,
            reference: Some(Method::ClopperPearsonMidP),
            quadrature_nodes: DEFAULT_QUADRATURE_NODES,
            tolerance: Tolerance::default(),
            wilson_level: SmallCountLevel::default(),
            seed: 1,
            draws: 1_000_000,
            format: None,
            output: None,
        }
    }
}

pub const DEFAULT_SAMPLE_SIZES: [u64; 3] = [32, 64, 2048];

fn parse<T: FromStr>(v: &str) -> Result<T, String>
where
    T::Err: Display,
{
    v.trim()
        .parse::<T>()
        .map_err(|e| format!("invalid value `{}`: {e}", v.trim()))
}

fn parse_list<T: FromStr>(v: &str) -> Result<Vec<T>, String>
where
    T::Err: Display,
{
    let items: Vec<T> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse)
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

impl Settings {
    /// Assign one setting from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "method" | "methods" => {
                self.methods = Some(if v.eq_ignore_ascii_case("all") {
                    Method::ALL.to_vec()
                } else {
                    parse_list(v)?
                })
            }
            "alpha" => self.alpha = parse(v)?,
            "n" | "sample_sizes" => self.sample_sizes = Some(parse_list(v)?),
            "lambda_min" => self.lambda_min = parse(v)?,
            "lambda_max" => self.lambda_max = parse(v)?,
            "lambda_points" => self.lambda_points = parse(v)?,
            "or_s" => self.or_s = parse(v)?,
            "regime" => self.regime = parse(v)?,
            "reference" => {
                self.reference = if v.eq_ignore_ascii_case("none") {
                    None
                } else {
                    Some(parse(v)?)
                }
            }
            "nodes" | "quadrature_nodes" => self.quadrature_nodes = parse(v)?,
            "abs_p" => self.tolerance.abs_p = parse(v)?,
            "abs_prob" => self.tolerance.abs_prob = parse(v)?,
            "max_iter" => self.tolerance.max_iter = parse(v)?,
            "wilson_level" => self.wilson_level = parse_wilson_level(v)?,
            "seed" => self.seed = parse(v)?,
            "draws" => self.draws = parse(v)?,
            "format" => self.format = Some(parse(v)?),
            "output" => self.output = Some(PathBuf::from(v)),
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Apply a `key = value` file. Blank lines and `#` comments are skipped.
    pub fn apply_config_text(&mut self, path: &str, text: &str) -> CliResult<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| CliError::Config {
                path: path.to_string(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            self.set(key, value).map_err(err)?;
        }
        Ok(())
    }

    pub fn apply_config_file(&mut self, path: &Path) -> CliResult<()> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.apply_config_text(&path.display().to_string(), &text)
    }

    pub fn conf(&self) -> CliResult<ConfidenceSpec> {
        ConfidenceSpec::new(self.alpha).map_err(|e| CliError::usage(format!("--alpha: {e}")))
    }

    pub fn spec(&self, method: Method) -> MethodSpec {
        MethodSpec::new(method)
            .with_tolerance(self.tolerance)
            .with_wilson_level(self.wilson_level)
    }

    pub fn estimator(&self, method: Method) -> CliResult<Estimator> {
        Ok(Estimator::new(self.spec(method), self.conf()?))
    }

    pub fn sizes_or(&self, default: &[u64]) -> Vec<u64> {
        self.sample_sizes.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn methods_or(&self, default: &[Method]) -> Vec<Method> {
        self.methods.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn single_method(&self) -> CliResult<Method> {
        match self.methods.as_deref() {
            Some([m]) => Ok(*m),
            _ => Err(CliError::usage("--method: exactly one method is required")),
        }
    }

    pub fn single_size(&self) -> CliResult<u64> {
        match self.sample_sizes.as_deref() {
            Some([n]) => Ok(*n),
            _ => Err(CliError::usage("--n: exactly one sample size is required")),
        }
    }

    pub fn grid(&self) -> CliResult<EvaluationGrid> {
        if !(self.lambda_min > 0.0 && self.lambda_max > self.lambda_min) {
            return Err(CliError::usage("--lambda-min/--lambda-max: need 0 < min < max"));
        }
        if self.lambda_points < 2 {
            return Err(CliError::usage("--lambda-points: at least 2 points are required"));
        }
        let lambdas = log_spaced(self.lambda_min, self.lambda_max, self.lambda_points);
        let grid = EvaluationGrid::new(self.sizes_or(&DEFAULT_SAMPLE_SIZES), lambdas, self.alpha, self.or_s)?;
        Ok(grid.with_quadrature_nodes(self.quadrature_nodes))
    }
}
