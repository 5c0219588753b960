//! Exit criteria. Every criterion is evaluated, reported on one line, and the
//! test fails if any of them does.
//!
//! Run with `cargo test -p propci-core --test acceptance -- --nocapture` to
//! see the report.

use std::time::{Duration, Instant};

use propci_core::estimators::{interval, BinomialSample, ConfidenceSpec, Estimator, IntervalProcedure, Method};
use propci_core::evaluation::{
    conditional_errors, local_average, local_average_errors, log_spaced, max_error_scan, monte_carlo_oracle,
    wald_validity_check, EvaluationGrid, OracleDesign, RandomProportionModel, Regime, ValidityGrid,
    DEFAULT_QUADRATURE_NODES,
};
use propci_core::numerics::{invlogit, logit, reg_inc_beta};
use propci_core::report::worked_example;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn conf(alpha: f64) -> ConfidenceSpec {
    ConfidenceSpec::new(alpha).unwrap()
}

fn est(m: Method, alpha: f64) -> Estimator {
    Estimator::new(m, conf(alpha))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

/// Published worked-example cells: (method, x, n, lower, upper).
const WORKED_EXAMPLE_CELLS: [(Method, u64, u64, &str, &str); 16] = [
    (Method::BootPercentile, 1, 225, "0", "1.3"),
    (Method::BootPercentile, 2, 46, "0", "10.9"),
    (Method::BootBasic, 1, 225, "-0.4", "0.9"),
    (Method::BootBasic, 2, 46, "-2.2", "8.7"),
    (Method::Wald, 1, 225, "-0.4", "1.3"),
    (Method::Wald, 2, 46, "-1.5", "10.2"),
    (Method::ClopperPearson, 1, 225, "0.01", "2.4"),
    (Method::ClopperPearson, 2, 46, "0.5", "14.8"),
    (Method::ClopperPearsonMidP, 1, 225, "0.02", "2.2"),
    (Method::ClopperPearsonMidP, 2, 46, "0.7", "13.6"),
    (Method::Wilson, 1, 225, "0.08", "2.5"),
    (Method::Wilson, 2, 46, "1.2", "14.5"),
    (Method::WaldLogitModified, 1, 225, "0.06", "3.1"),
    (Method::WaldLogitModified, 2, 46, "1.1", "15.8"),
    (Method::LikelihoodRatioModified, 1, 225, "0.03", "1.9"),
    (Method::LikelihoodRatioModified, 2, 46, "0.7", "12.8"),
];

fn worked_example_table() -> Outcome {
    let (rows, elapsed) = timed(|| worked_example(&conf(0.05)).unwrap());
    let mut mismatches = Vec::new();
    for (method, x, n, lo, hi) in WORKED_EXAMPLE_CELLS {
        let row = rows
            .iter()
            .find(|r| r.method == method && r.x == x && r.n == n)
            .expect("cell present");
        let close = |v: f64, s: &str| (100.0 * v - s.parse::<f64>().unwrap()).abs() <= 0.05;
        let ok =
            row.lower_pct() == lo && row.upper_pct() == hi && close(row.lower_exact, lo) && close(row.upper_exact, hi);
        if !ok {
            mismatches.push(format!(
                "{} {x}/{n}: got {:.4}% to {:.4}% ({} to {}), published {lo} to {hi}",
                method.id(),
                100.0 * row.lower_exact,
                100.0 * row.upper_exact,
                row.lower_pct(),
                row.upper_pct()
            ));
        }
    }
    let fast = elapsed < Duration::from_secs(1);
    let detail = format!(
        "{}/16 cells match, {:.1} ms{}",
        16 - mismatches.len(),
        elapsed.as_secs_f64() * 1e3,
        if mismatches.is_empty() {
            String::new()
        } else {
            format!("; {}", mismatches.join("; "))
        }
    );
    outcome(mismatches.is_empty() && fast, detail)
}

fn midp_upper_bound() -> Outcome {
    let ci = interval(
        &Method::ClopperPearsonMidP.into(),
        BinomialSample::new(1, 225).unwrap(),
        &conf(0.05),
    )
    .unwrap();
    let pct = 100.0 * ci.upper;
    outcome(
        (pct - 2.18).abs() <= 0.005,
        format!("upper = {pct:.4}% (target 2.18% ± 0.005 pp)"),
    )
}

fn clopper_pearson_conservatism() -> Outcome {
    let cp = est(Method::ClopperPearson, 0.05);
    let grid: Vec<f64> = (0..2000)
        .map(|i| invlogit(logit(1e-5) + (logit(1.0 - 1e-5) - logit(1e-5)) * i as f64 / 1999.0))
        .collect();
    let (worst, elapsed) = timed(|| {
        let mut worst = (0.0f64, 0u64, 0.0f64);
        for n in [32u64, 64, 2048] {
            for &p in &grid {
                let r = conditional_errors(&cp, n, p).unwrap();
                let v = r.alpha_l.max(r.alpha_u);
                if v > worst.0 {
                    worst = (v, n, p);
                }
            }
        }
        worst
    });
    outcome(
        worst.0 <= 0.025 && elapsed < Duration::from_secs(120),
        format!(
            "max one-sided error {:.6} at n = {}, p = {:.6}; {:.1} s",
            worst.0,
            worst.1,
            worst.2,
            elapsed.as_secs_f64()
        ),
    )
}

fn blaker_oscillation() -> Outcome {
    let grid = EvaluationGrid::new(vec![2048], log_spaced(0.05, 30.0, 4000), 0.05, 1.2).unwrap();
    let s = max_error_scan(&est(Method::Blaker, 0.05), &grid, Regime::Conditional).unwrap();
    // The worst error must be on the lower side for the statement to apply.
    let lower_max = if s.side == propci_core::evaluation::Side::Lower {
        s.max
    } else {
        f64::NAN
    };
    outcome(
        (0.045..=0.050).contains(&lower_max),
        format!("max α′_L = {:.5} at λ = {:.4} (side {})", s.max, s.lambda, s.side),
    )
}

fn wald_logit_spike() -> Outcome {
    let model = RandomProportionModel::from_lambda(0.11, 2048, 1.2).unwrap();
    let (r, elapsed) = timed(|| local_average_errors(&est(Method::WaldLogitModified, 0.05), 2048, &model).unwrap());
    outcome(
        (r.alpha_l - 0.097).abs() <= 0.005 && elapsed < Duration::from_secs(60),
        format!(
            "α″_L = {:.5} (target 0.097 ± 0.005), {:.1} ms",
            r.alpha_l,
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn sensitivity_maximum() -> Outcome {
    let lambdas: Vec<f64> = log_spaced(0.05, 8.0, 400).into_iter().filter(|&l| l < 8.0).collect();
    let grid = EvaluationGrid::new(vec![2048], lambdas, 0.05, 1.05).unwrap();
    let s = max_error_scan(&est(Method::ClopperPearsonMidP, 0.05), &grid, Regime::LocalAverage).unwrap();
    outcome(
        (s.max - 0.0381).abs() <= 0.002,
        format!(
            "max α″ = {:.5} at λ = {:.4} ({} side), target 0.0381 ± 0.002",
            s.max, s.lambda, s.side
        ),
    )
}

fn composite_conditional() -> Outcome {
    let (r, elapsed) = timed(|| conditional_errors(&est(Method::CompositeDellas, 0.05), 225, 0.0218).unwrap());
    let coverage = 100.0 * (1.0 - r.two_sided);
    let (l, u) = (100.0 * r.alpha_l, 100.0 * r.alpha_u);
    outcome(
        (coverage - 94.6).abs() <= 0.15
            && (l - 1.1).abs() <= 0.15
            && (u - 4.3).abs() <= 0.15
            && elapsed < Duration::from_secs(1),
        format!(
            "coverage {coverage:.3}%, α′_L {l:.3}%, α′_U {u:.3}%, {:.1} ms",
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn composite_local_average() -> Outcome {
    let model = RandomProportionModel::new(0.0218, 1.2).unwrap();
    let r = local_average_errors(&est(Method::CompositeDellas, 0.05), 225, &model).unwrap();
    let (l, u) = (100.0 * r.alpha_l, 100.0 * r.alpha_u);
    let pass = (l - 0.93).abs() <= 0.2 && (u - 7.4).abs() <= 0.5;
    let mut detail = format!("assuming OR_S = 1.20: α″_L {l:.3}% (0.93 ± 0.2), α″_U {u:.3}% (7.4 ± 0.5)");
    if !pass {
        detail.push_str("; discrepancy may stem from the assumed OR_S");
    }
    outcome(pass, detail)
}

fn wald_validity_rule() -> Outcome {
    let grid = ValidityGrid::default();
    let strict = wald_validity_check(40, conf(0.05), &grid).unwrap();
    let loose = wald_validity_check(5, conf(0.05), &grid).unwrap();
    outcome(
        strict.pass && !loose.pass,
        format!(
            "threshold 40: max {:.5} ({}), threshold 5: max {:.5} ({}), limit {:.4}",
            strict.max_error,
            if strict.pass { "PASS" } else { "FAIL" },
            loose.max_error,
            if loose.pass { "PASS" } else { "FAIL" },
            strict.limit
        ),
    )
}

fn wald_at_lambda_32() -> Outcome {
    let model = RandomProportionModel::from_lambda(32.0, 2048, 1.2).unwrap();
    let r = local_average_errors(&est(Method::Wald, 0.05), 2048, &model).unwrap();
    outcome(
        r.alpha_l > 0.0375 || r.alpha_u > 0.0375,
        format!("α″_L {:.5}, α″_U {:.5} (limit 0.0375)", r.alpha_l, r.alpha_u),
    )
}

/// Named sub-checks of the property criterion.
fn property_suites() -> Outcome {
    let t = Instant::now();
    let checks: Vec<(&str, Result<(), String>)> = vec![
        ("equivariance", equivariance()),
        ("containment", containment()),
        ("alpha nesting", alpha_nesting()),
        ("residuals", residuals()),
        ("brute-force conditional", brute_force_conditional()),
        ("monte carlo", monte_carlo_agreement()),
        ("continuity correction", continuity_containment()),
    ];
    let elapsed = t.elapsed();
    let failed: Vec<String> = checks
        .iter()
        .filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {e}")))
        .collect();
    outcome(
        failed.is_empty() && elapsed < Duration::from_secs(300),
        format!(
            "{}/{} suites hold, {:.1} s{}",
            checks.len() - failed.len(),
            checks.len(),
            elapsed.as_secs_f64(),
            if failed.is_empty() {
                String::new()
            } else {
                format!("; {}", failed.join("; "))
            }
        ),
    )
}

const SMALL_N: u64 = 60;

fn raw(m: Method, x: u64, n: u64, alpha: f64) -> (f64, f64) {
    let ci = interval(&m.into(), BinomialSample::new(x, n).unwrap(), &conf(alpha)).unwrap();
    (ci.lower_raw, ci.upper_raw)
}

fn equivariance() -> Result<(), String> {
    for m in Method::ALL {
        for n in 1..=SMALL_N {
            for x in 0..=n {
                let (l, u) = raw(m, x, n, 0.05);
                let (lm, um) = raw(m, n - x, n, 0.05);
                if (u - (1.0 - lm)).abs() > 1e-12 || (l - (1.0 - um)).abs() > 1e-12 {
                    return Err(format!("{} at {x}/{n}", m.id()));
                }
            }
        }
    }
    Ok(())
}

fn containment() -> Result<(), String> {
    for n in 1..=100 {
        for x in 0..=n {
            let (cl, cu) = raw(Method::ClopperPearson, x, n, 0.05);
            for m in [Method::ClopperPearsonMidP, Method::Blaker] {
                let (l, u) = raw(m, x, n, 0.05);
                if l < cl - 1e-12 || u > cu + 1e-12 {
                    return Err(format!("{} not inside CP at {x}/{n}", m.id()));
                }
            }
        }
    }
    Ok(())
}

fn alpha_nesting() -> Result<(), String> {
    for m in Method::ALL {
        for n in 1..=SMALL_N {
            for x in 0..=n {
                let a = raw(m, x, n, 0.01);
                let b = raw(m, x, n, 0.05);
                let c = raw(m, x, n, 0.10);
                if a.0 > b.0 + 1e-12 || b.0 > c.0 + 1e-12 || a.1 < b.1 - 1e-12 || b.1 < c.1 - 1e-12 {
                    return Err(format!("{} at {x}/{n}", m.id()));
                }
            }
        }
    }
    Ok(())
}

fn residuals() -> Result<(), String> {
    let c = conf(0.05);
    let cases = [
        (1u64, 225u64),
        (2, 46),
        (3, 10),
        (17, 64),
        (31, 64),
        (5, 2048),
        (1000, 2048),
        (39, 40),
    ];
    for (x, n) in cases {
        let (l, _) = raw(Method::ClopperPearson, x, n, 0.05);
        let r = reg_inc_beta(x as f64, (n - x + 1) as f64, l).unwrap() - 0.025;
        check_residual("clopper_pearson", x, n, r)?;
        let (l, _) = raw(Method::ClopperPearsonMidP, x, n, 0.05);
        let tail = |k: u64| {
            if k == 0 {
                1.0
            } else {
                reg_inc_beta(k as f64, (n - k + 1) as f64, l).unwrap()
            }
        };
        check_residual("clopper_pearson_midp", x, n, 0.5 * (tail(x) + tail(x + 1)) - 0.025)?;
        if x < n {
            let (l, _) = raw(Method::LikelihoodRatioModified, x, n, 0.05);
            let p = x as f64 / n as f64;
            let d = x as f64 * (p / l).ln() + (n - x) as f64 * ((1.0 - p) / (1.0 - l)).ln();
            check_residual("likelihood_ratio_modified", x, n, d - 0.5 * c.kappa() * c.kappa())?;
        }
        if x > 1 && x < n {
            let (l, _) = raw(Method::JeffreysModified, x, n, 0.05);
            let r = reg_inc_beta(x as f64 + 0.5, (n - x) as f64 + 0.5, l).unwrap() - 0.025;
            check_residual("jeffreys_modified", x, n, r)?;
        }
    }
    Ok(())
}

fn check_residual(name: &str, x: u64, n: u64, r: f64) -> Result<(), String> {
    if r.abs() <= 1e-8 {
        Ok(())
    } else {
        Err(format!("{name} residual {r:e} at {x}/{n}"))
    }
}

/// Pmf from a running product, independent of the library kernel.
fn product_pmf(x: u64, n: u64, p: f64) -> f64 {
    let c = (0..x).fold(1.0, |c, i| c * (n - i) as f64 / (i + 1) as f64);
    c * p.powi(x as i32) * (1.0 - p).powi((n - x) as i32)
}

fn brute_force_conditional() -> Result<(), String> {
    for m in Method::ALL {
        let e = est(m, 0.05);
        for n in [1u64, 7, 20, 46, 64, 100] {
            let table = e.table(n).unwrap();
            for p in [0.003, 0.05, 0.21, 0.5, 0.77, 0.96] {
                let r = conditional_errors(&e, n, p).unwrap();
                let (mut al, mut au) = (0.0, 0.0);
                for x in 0..=n {
                    let ci = interval(&e.spec, BinomialSample::new(x, n).unwrap(), &e.conf).unwrap();
                    assert_eq!(ci.lower, table.lower(x).unwrap());
                    if ci.lower > p {
                        al += product_pmf(x, n, p);
                    }
                    if ci.upper < p {
                        au += product_pmf(x, n, p);
                    }
                }
                if (r.alpha_l - al).abs() > 1e-12 || (r.alpha_u - au).abs() > 1e-12 {
                    return Err(format!("{} n={n} p={p}", m.id()));
                }
            }
        }
    }
    Ok(())
}

fn monte_carlo_agreement() -> Result<(), String> {
    let configs: [(Method, u64, f64, f64); 10] = [
        (Method::ClopperPearsonMidP, 64, 4.0, 1.2),
        (Method::ClopperPearsonMidP, 32, 4.0, 1.2),
        (Method::Wald, 2048, 32.0, 1.2),
        (Method::WaldLogitModified, 2048, 0.11, 1.2),
        (Method::ClopperPearson, 225, 4.9, 1.2),
        (Method::Blaker, 64, 2.0, 1.1),
        (Method::WilsonModified, 32, 10.0, 1.2),
        (Method::JeffreysModified, 2048, 1.5, 1.05),
        (Method::BootBasic, 64, 8.0, 1.2),
        (Method::CompositeDellas, 225, 4.905, 1.2),
    ];
    for (i, (m, n, lambda, or_s)) in configs.into_iter().enumerate() {
        let e = est(m, 0.05);
        let model = RandomProportionModel::from_lambda(lambda, n, or_s).unwrap();
        let q = local_average(&e, n, &model, DEFAULT_QUADRATURE_NODES).unwrap();
        let mc = monte_carlo_oracle(&e, OracleDesign::LocalAverage { n, model }, 10_000_000, 1000 + i as u64).unwrap();
        let pairs = [
            ("α″_L", q.errors.alpha_l, mc.alpha_l, mc.se_l),
            ("α″_U", q.errors.alpha_u, mc.alpha_u, mc.se_u),
            ("w″_L", q.w_l, mc.w_l, mc.se_w_l),
            ("w″_U", q.w_u, mc.w_u, mc.se_w_u),
        ];
        for (k, (name, exact, sim, se)) in pairs.into_iter().enumerate() {
            // Rates use the larger of the observed and the hypothesized binomial SE.
            let se = if k < 2 {
                se.max((exact * (1.0 - exact) / mc.draws as f64).sqrt())
            } else {
                se
            };
            if (exact - sim).abs() > 3.0 * se {
                return Err(format!(
                    "{} n={n} λ={lambda}: {name} quadrature {exact:.6} vs simulation {sim:.6} ± {se:.2e}",
                    m.id()
                ));
            }
        }
    }
    Ok(())
}

fn continuity_containment() -> Result<(), String> {
    for (cc, plain) in [(Method::WaldCc, Method::Wald), (Method::WilsonCc, Method::Wilson)] {
        for n in 1..=SMALL_N {
            for x in 0..=n {
                let (l, u) = raw(cc, x, n, 0.05);
                let (pl, pu) = raw(plain, x, n, 0.05);
                if l > pl + 1e-12 || u < pu - 1e-12 {
                    return Err(format!("{} at {x}/{n}", cc.id()));
                }
            }
        }
    }
    Ok(())
}

fn confidence_level_comparison() -> Outcome {
    let model = RandomProportionModel::from_lambda(8.0, 64, 1.2).unwrap();
    let at = |alpha: f64| {
        let r = local_average_errors(&est(Method::ClopperPearsonMidP, alpha), 64, &model).unwrap();
        let half = alpha / 2.0;
        let absolute = (r.alpha_l - half).abs() + (r.alpha_u - half).abs();
        let relative = (r.alpha_l / half - 1.0).abs() + (r.alpha_u / half - 1.0).abs();
        (absolute, relative)
    };
    let (abs95, rel95) = at(0.05);
    let (abs90, rel90) = at(0.10);
    outcome(
        abs90 > abs95 && rel90 < rel95,
        format!("absolute bias 90%: {abs90:.5} vs 95%: {abs95:.5}; relative 90%: {rel90:.4} vs 95%: {rel95:.4}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance_criteria() {
    let criteria: Vec<Criterion> = vec![
        ("worked-example table", worked_example_table),
        ("mid-P upper bound for 1/225", midp_upper_bound),
        ("Clopper-Pearson strict conservatism", clopper_pearson_conservatism),
        ("Blaker oscillation", blaker_oscillation),
        ("Wald-logit spike", wald_logit_spike),
        ("OR_S = 1.05 sensitivity maximum", sensitivity_maximum),
        ("composite conditional errors", composite_conditional),
        ("composite local-average errors", composite_local_average),
        ("Wald validity rule", wald_validity_rule),
        ("Wald at λ = 32", wald_at_lambda_32),
        ("property suites", property_suites),
        ("90% vs 95% bias", confidence_level_comparison),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let o = run();
        println!(
            "{} {:>2}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
