use std::fmt::Write as _;
use std::io::Write as _;

use propci_core::estimators::{interval, method_properties, BinomialSample, Estimator, IntervalProcedure, Method};
use propci_core::evaluation::{
    calibrate_mu, conditional_errors, conditional_half_widths, error_curve, half_width_curve, local_average,
    max_error_scan, monte_carlo_oracle, random_size_errors, ErrorReport, HalfWidthReport, OracleDesign,
    RandomProportionModel, RandomSampleSizeModel, Regime, ValidityGrid,
};
use propci_core::numerics::{invlogit, logit, normal_rule_on, NORMAL_SPAN};
use propci_core::report::{
    format_percent, format_percent_interval, format_significant as g, worked_example, ReferenceLines,
};

use crate::cli::{Cli, Command};
use crate::config::{Format, Settings};
use crate::error::{CliError, CliResult};
use crate::svg::{self, Figure, Panel, Series};

pub const CURVE_HEADER: &str = "method,regime,n,lambda,p0,alpha_l,alpha_u,two_sided,w_l,w_u,ratio_l,ratio_u";
pub const TABLE_HEADER: &str = "method,x,n,lower_pct,upper_pct,lower_exact,upper_exact";

/// Resolve settings (defaults, then file, then flags) and run the command.
pub fn run(cli: &Cli) -> CliResult<()> {
    let mut settings = Settings::default();
    if let Some(path) = &cli.config {
        settings.apply_config_file(path)?;
    }
    cli.command.common().apply(&mut settings)?;
    let text = execute(&cli.command, &settings)?;
    emit(&settings, &text)
}

/// Produce the command's output as text.
pub fn execute(command: &Command, s: &Settings) -> CliResult<String> {
    match command {
        Command::Interval { x, clamp, .. } => cmd_interval(s, *x, *clamp),
        Command::Table2 { .. } => cmd_table2(s),
        Command::Curves { .. } => cmd_curves(s),
        Command::Halfwidths { .. } => cmd_halfwidths(s),
        Command::Scan { .. } => cmd_scan(s),
        Command::Validity { threshold, points, .. } => cmd_validity(s, *threshold, *points),
        Command::Properties { max_n, .. } => cmd_properties(s, *max_n),
        Command::Calibrate { p0, .. } => cmd_calibrate(s, *p0),
        Command::Oracle { lambda, p0, .. } => cmd_oracle(s, *lambda, *p0),
    }
}

fn emit(s: &Settings, text: &str) -> CliResult<()> {
    match &s.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io {
                    path: "<stdout>".into(),
                    source: e,
                })
        }
    }
}

fn format_of(s: &Settings, default: Format, allowed: &[Format]) -> CliResult<Format> {
    let f = s.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::usage(
            format!("--format: {f:?} output is not available for this command").to_lowercase(),
        ))
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(g).unwrap_or_default()
}

fn cmd_interval(s: &Settings, x: u64, clamp: bool) -> CliResult<String> {
    let method = s.single_method()?;
    let n = s.single_size()?;
    let conf = s.conf()?;
    let sample = BinomialSample::new(x, n).map_err(|e| CliError::usage(format!("--x: {e}")))?;
    let ci = interval(&s.spec(method), sample, &conf)?;
    let (lo, hi) = if clamp {
        (ci.lower, ci.upper)
    } else {
        (ci.lower_raw, ci.upper_raw)
    };
    let mut out = String::new();
    match format_of(s, Format::Text, &[Format::Text, Format::Csv])? {
        Format::Csv => {
            out.push_str("method,x,n,alpha,point,lower_raw,upper_raw,lower,upper\n");
            let _ = writeln!(
                out,
                "{method},{x},{n},{},{},{},{},{},{}",
                g(conf.alpha()),
                g(ci.point),
                g(ci.lower_raw),
                g(ci.upper_raw),
                g(ci.lower),
                g(ci.upper)
            );
        }
        _ => {
            let _ = writeln!(out, "method: {method}");
            let _ = writeln!(out, "sample: {x}/{n}");
            let _ = writeln!(out, "alpha: {}", g(conf.alpha()));
            let _ = writeln!(out, "point: {}", g(ci.point));
            let _ = writeln!(out, "raw: [{}, {}]", g(ci.lower_raw), g(ci.upper_raw));
            let _ = writeln!(out, "clamped: [{}, {}]", g(ci.lower), g(ci.upper));
            let _ = writeln!(out, "percent: {}", format_percent_interval(lo, hi));
        }
    }
    Ok(out)
}

fn cmd_table2(s: &Settings) -> CliResult<String> {
    let rows = worked_example(&s.conf()?)?;
    let mut out = String::new();
    match format_of(s, Format::Csv, &[Format::Text, Format::Csv])? {
        Format::Text => {
            let _ = writeln!(out, "{:<28}{:<20}2/46", "method", "1/225");
            for pair in rows.chunks(2) {
                let _ = writeln!(
                    out,
                    "{:<28}{:<20}{}",
                    pair[0].method.id(),
                    pair[0].rendered(),
                    pair[1].rendered()
                );
            }
        }
        _ => {
            let _ = writeln!(out, "{TABLE_HEADER}");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.method,
                    r.x,
                    r.n,
                    r.lower_pct(),
                    r.upper_pct(),
                    g(r.lower_exact),
                    g(r.upper_exact)
                );
            }
        }
    }
    Ok(out)
}

/// One output row of `curves` / `halfwidths`.
#[derive(Debug, Clone)]
struct CurveRow {
    method: Method,
    regime: Regime,
    n: u64,
    lambda: f64,
    p0: f64,
    errors: ErrorReport,
    widths: Option<HalfWidthReport>,
}

fn curve_csv(rows: &mut [CurveRow]) -> String {
    rows.sort_by(|a, b| {
        a.method
            .id()
            .cmp(b.method.id())
            .then(a.n.cmp(&b.n))
            .then(a.lambda.total_cmp(&b.lambda))
    });
    let mut out = String::with_capacity(rows.len() * 120);
    let _ = writeln!(out, "{CURVE_HEADER}");
    for r in rows.iter() {
        let e = &r.errors;
        let (wl, wu, rl, ru) = match &r.widths {
            Some(w) => (g(w.w_l), g(w.w_u), opt(w.ratio_l), opt(w.ratio_u)),
            None => Default::default(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{wl},{wu},{rl},{ru}",
            r.method,
            r.regime,
            r.n,
            g(r.lambda),
            g(r.p0),
            g(e.alpha_l),
            g(e.alpha_u),
            g(e.two_sided)
        );
    }
    out
}

/// Panels in method order, one colour per sample size, lower dashed and upper solid.
fn curve_panels(
    methods: &[Method],
    sizes: &[u64],
    rows: &[CurveRow],
    value: impl Fn(&CurveRow) -> (f64, f64),
) -> Vec<Panel> {
    methods
        .iter()
        .map(|&m| {
            let mut series = Vec::new();
            for (i, &n) in sizes.iter().enumerate() {
                let pts: Vec<&CurveRow> = rows.iter().filter(|r| r.method == m && r.n == n).collect();
                let color = svg::color_for(n, i);
                series.push(Series {
                    color,
                    dashed: true,
                    points: pts.iter().map(|r| (r.lambda, value(r).0)).collect(),
                });
                series.push(Series {
                    color,
                    dashed: false,
                    points: pts.iter().map(|r| (r.lambda, value(r).1)).collect(),
                });
            }
            Panel {
                title: m.id().to_string(),
                series,
            }
        })
        .collect()
}

fn legend(sizes: &[u64]) -> Vec<(&'static str, String)> {
    sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| (svg::color_for(n, i), format!("n = {n}")))
        .collect()
}

fn cmd_curves(s: &Settings) -> CliResult<String> {
    let format = format_of(s, Format::Csv, &[Format::Csv, Format::Svg])?;
    let grid = s.grid()?;
    let methods = s.methods_or(&Method::HEADLINE);
    let mut rows = Vec::new();
    for &m in &methods {
        for pt in error_curve(&s.estimator(m)?, &grid, s.regime)? {
            rows.push(CurveRow {
                method: m,
                regime: s.regime,
                n: pt.n,
                lambda: pt.lambda,
                p0: pt.p0,
                errors: pt.report,
                widths: None,
            });
        }
    }
    if format == Format::Csv {
        return Ok(curve_csv(&mut rows));
    }
    let lines = ReferenceLines::for_alpha(s.alpha);
    let fig = Figure {
        x_range: (s.lambda_min, s.lambda_max),
        y_range: (0.0, (4.0 * lines.nominal).max(lines.upper_line * 1.2)),
        x_label: "lambda = n p".into(),
        y_label: format!("one-sided error ({})", s.regime),
        hlines: vec![lines.lower_line, lines.nominal, lines.upper_line],
        legend: legend(&grid.sample_sizes),
        panels: curve_panels(&methods, &grid.sample_sizes, &rows, |r| {
            (r.errors.alpha_l, r.errors.alpha_u)
        }),
    };
    Ok(svg::render(&fig))
}

fn cmd_halfwidths(s: &Settings) -> CliResult<String> {
    let format = format_of(s, Format::Csv, &[Format::Csv, Format::Svg])?;
    let grid = s.grid()?;
    let methods = s.methods_or(&Method::HEADLINE);
    let reference = s.reference.map(|m| s.estimator(m)).transpose()?;
    let mut rows = Vec::new();
    for &m in &methods {
        let est = s.estimator(m)?;
        let curve = half_width_curve(&est, &grid, reference.as_ref().map(|r| r as &dyn IntervalProcedure))?;
        for pt in curve {
            rows.push(CurveRow {
                method: m,
                regime: Regime::LocalAverage,
                n: pt.n,
                lambda: pt.lambda,
                p0: pt.p0,
                errors: pt.errors,
                widths: Some(pt.widths),
            });
        }
    }
    if format == Format::Csv {
        return Ok(curve_csv(&mut rows));
    }
    let relative = reference.is_some();
    let value = |r: &CurveRow| {
        let w = r.widths.as_ref().expect("half-width rows carry widths");
        if relative {
            (w.ratio_l.unwrap_or(f64::NAN), w.ratio_u.unwrap_or(f64::NAN))
        } else {
            (w.w_l, w.w_u)
        }
    };
    let top = rows
        .iter()
        .flat_map(|r| {
            let (a, b) = value(r);
            [a, b]
        })
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max);
    let (y_max, hlines, y_label) = if let Some(r) = &reference {
        (top.clamp(1.5, 4.0), vec![1.0], format!("half-width / {}", r.label()))
    } else {
        (
            if top > 0.0 { top * 1.05 } else { 1.0 },
            vec![],
            "local-average half-width".into(),
        )
    };
    let fig = Figure {
        x_range: (s.lambda_min, s.lambda_max),
        y_range: (0.0, y_max),
        x_label: "lambda = n p".into(),
        y_label,
        hlines,
        legend: legend(&grid.sample_sizes),
        panels: curve_panels(&methods, &grid.sample_sizes, &rows, value),
    };
    Ok(svg::render(&fig))
}

fn cmd_scan(s: &Settings) -> CliResult<String> {
    let format = format_of(s, Format::Text, &[Format::Text, Format::Csv])?;
    let grid = s.grid()?;
    let mut out = String::new();
    if format == Format::Csv {
        out.push_str("method,regime,max_error,side,n,lambda,p0\n");
    }
    for m in s.methods_or(&Method::HEADLINE) {
        let r = max_error_scan(&s.estimator(m)?, &grid, s.regime)?;
        let _ = match format {
            Format::Csv => writeln!(
                out,
                "{m},{},{},{},{},{},{}",
                s.regime,
                g(r.max),
                r.side,
                r.n,
                g(r.lambda),
                g(r.p0)
            ),
            _ => writeln!(
                out,
                "{m}: max {} error {} ({}) at n = {}, lambda = {}, p0 = {}",
                r.side,
                g(r.max),
                s.regime,
                r.n,
                g(r.lambda),
                g(r.p0)
            ),
        };
    }
    Ok(out)
}

fn cmd_validity(s: &Settings, threshold: u64, points: usize) -> CliResult<String> {
    let format = format_of(s, Format::Text, &[Format::Text, Format::Csv])?;
    if points < 2 {
        return Err(CliError::usage("--points: at least 2 points are required"));
    }
    let conf = s.conf()?;
    let grid = ValidityGrid {
        sample_sizes: s.sizes_or(&ValidityGrid::default().sample_sizes),
        points,
        or_s: s.or_s,
    };
    let mut out = String::new();
    if format == Format::Csv {
        out.push_str("method,threshold,qualifying_points,max_error,side,n,lambda,limit,result\n");
    }
    for m in s.methods_or(&[Method::Wald]) {
        let est = Estimator::new(s.spec(m), conf);
        let r = propci_core::evaluation::validity_check(&est, threshold, conf.alpha(), &grid)?;
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        let _ = match format {
            Format::Csv => writeln!(
                out,
                "{m},{threshold},{},{},{},{},{},{},{verdict}",
                r.qualifying_points,
                g(r.max_error),
                r.side,
                r.n,
                g(r.lambda),
                g(r.limit)
            ),
            _ => writeln!(
                out,
                "{verdict} {m} min(x, n-x) > {threshold}: max {} error {} at n = {}, lambda = {} over {} points (limit {})",
                r.side,
                g(r.max_error),
                r.n,
                g(r.lambda),
                r.qualifying_points,
                g(r.limit)
            ),
        };
    }
    Ok(out)
}

/// Live checks on every sample up to `max_n`: mirror symmetry and
/// non-decreasing bounds in `x`.
fn live_checks(s: &Settings, m: Method, max_n: u64) -> CliResult<(bool, bool)> {
    let conf = s.conf()?;
    let spec = s.spec(m);
    let (mut equivariant, mut monotone) = (true, true);
    for n in 1..=max_n {
        let cis = (0..=n)
            .map(|x| interval(&spec, BinomialSample::new(x, n)?, &conf))
            .collect::<Result<Vec<_>, _>>()?;
        for x in 0..=n as usize {
            let mirror = &cis[n as usize - x];
            if (cis[x].upper_raw - (1.0 - mirror.lower_raw)).abs() > 1e-9 {
                equivariant = false;
            }
            if x > 0
                && (cis[x].lower_raw < cis[x - 1].lower_raw - 1e-12 || cis[x].upper_raw < cis[x - 1].upper_raw - 1e-12)
            {
                monotone = false;
            }
        }
    }
    Ok((equivariant, monotone))
}

fn cmd_properties(s: &Settings, max_n: u64) -> CliResult<String> {
    let format = format_of(s, Format::Text, &[Format::Text, Format::Csv])?;
    if max_n == 0 {
        return Err(CliError::usage("--max-n: must be at least 1"));
    }
    let yn = |b: bool| if b { "yes" } else { "no" };
    let mark = |b: bool| if b { "✓" } else { "✗" };
    let mut out = String::new();
    if format == Format::Csv {
        out.push_str("method,equivariant,analytic_solution,monotone_in_x,generalizes_multivariate,deterministic,checked_equivariance,checked_nondecreasing\n");
    }
    for m in s.methods_or(&Method::ALL) {
        let p = method_properties(m);
        let (eq, mono) = live_checks(s, m, max_n)?;
        let _ = match format {
            Format::Csv => writeln!(
                out,
                "{m},{},{},{},{},{},{},{}",
                yn(p.equivariant),
                yn(p.analytic_solution),
                yn(p.monotone_in_x),
                yn(p.generalizes_multivariate),
                yn(p.deterministic),
                yn(eq),
                yn(mono)
            ),
            _ => writeln!(
                out,
                "{m}\n  equivariant: {}\n  analytic_solution: {}\n  monotone_in_x: {}\n  generalizes_multivariate: {}\n  deterministic: {}\n  check mirror symmetry (n <= {max_n}): {}\n  check bounds non-decreasing in x (n <= {max_n}): {}",
                yn(p.equivariant),
                yn(p.analytic_solution),
                yn(p.monotone_in_x),
                yn(p.generalizes_multivariate),
                yn(p.deterministic),
                mark(eq),
                mark(mono)
            ),
        };
    }
    Ok(out)
}

fn cmd_calibrate(s: &Settings, p0: f64) -> CliResult<String> {
    format_of(s, Format::Text, &[Format::Text])?;
    let model = RandomProportionModel::new(p0, s.or_s).map_err(|e| CliError::usage(format!("--p0/--or-s: {e}")))?;
    let mu = calibrate_mu(p0, model.sigma)?;
    let mean = if model.is_degenerate() {
        p0
    } else {
        let rule = normal_rule_on(
            mu,
            model.sigma,
            mu - NORMAL_SPAN * model.sigma,
            mu + NORMAL_SPAN * model.sigma,
            128,
        );
        rule.integrate(invlogit) / rule.total_weight()
    };
    let mut out = String::new();
    let _ = writeln!(out, "p0: {}", g(p0));
    let _ = writeln!(out, "or_s: {}", g(s.or_s));
    let _ = writeln!(out, "sigma: {}", g(model.sigma));
    let _ = writeln!(out, "mu: {}", g(mu));
    let _ = writeln!(out, "logit(p0): {}", g(logit(p0)));
    let _ = writeln!(out, "E[P] at mu: {}", g(mean));
    if let Some(sizes) = &s.sample_sizes {
        for n in sizes {
            let _ = writeln!(out, "lambda at n = {n}: {}", g(p0 * *n as f64));
        }
    }
    Ok(out)
}

fn cmd_oracle(s: &Settings, lambda: Option<f64>, p0: Option<f64>) -> CliResult<String> {
    format_of(s, Format::Text, &[Format::Text])?;
    let method = s.single_method()?;
    let n = s.single_size()?;
    let p0 = match (lambda, p0) {
        (Some(l), None) => l / n as f64,
        (None, Some(p)) => p,
        _ => return Err(CliError::usage("--lambda or --p0: one of them is required")),
    };
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(CliError::usage(format!(
            "--lambda/--p0: p0 must lie in (0,1), got {p0}"
        )));
    }
    let est = s.estimator(method)?;
    let (design, exact, widths) = match s.regime {
        Regime::Conditional => {
            let w = conditional_half_widths(&est, n, p0)?;
            (
                OracleDesign::Conditional { n, p: p0 },
                conditional_errors(&est, n, p0)?,
                Some((w.w_l, w.w_u)),
            )
        }
        Regime::LocalAverage => {
            let model = RandomProportionModel::new(p0, s.or_s)?;
            let la = local_average(&est, n, &model, s.quadrature_nodes)?;
            (
                OracleDesign::LocalAverage { n, model },
                la.errors,
                Some((la.w_l, la.w_u)),
            )
        }
        Regime::RandomSize => {
            let model = RandomSampleSizeModel::new(n, s.or_s.ln(), p0)?;
            (OracleDesign::RandomSize(model), random_size_errors(&est, &model)?, None)
        }
    };
    let mc = monte_carlo_oracle(&est, design, s.draws, s.seed)?;
    let mut out = String::new();
    let _ = writeln!(out, "method: {method}");
    let _ = writeln!(
        out,
        "design: {} n = {n}, p0 = {}, or_s = {}",
        s.regime,
        g(p0),
        g(s.or_s)
    );
    let _ = writeln!(out, "draws: {} seed: {}", mc.draws, s.seed);
    let mut line = |name: &str, exact: f64, sim: f64, se: f64| {
        let z = if se > 0.0 { (sim - exact) / se } else { 0.0 };
        let _ = writeln!(
            out,
            "{name}: exact {} simulated {} (se {}) z = {:.2}",
            g(exact),
            g(sim),
            g(se),
            z
        );
    };
    line("alpha_l", exact.alpha_l, mc.alpha_l, mc.se_l);
    line("alpha_u", exact.alpha_u, mc.alpha_u, mc.se_u);
    if let Some((wl, wu)) = widths {
        line("w_l", wl, mc.w_l, mc.se_w_l);
        line("w_u", wu, mc.w_u, mc.se_w_u);
    }
    let _ = writeln!(
        out,
        "simulated errors: {}% lower, {}% upper",
        format_percent(mc.alpha_l),
        format_percent(mc.alpha_u)
    );
    Ok(out)
}
