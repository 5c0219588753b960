use propci_core::estimators::{ConfidenceSpec, Estimator, Method};
use propci_core::evaluation::{
    conditional_errors, error_curve, half_width_curve, local_average, log_spaced, monte_carlo_oracle,
    random_size_errors, EvaluationGrid, OracleDesign, RandomProportionModel, RandomSampleSizeModel, Regime,
    Uninformative,
};

fn est(m: Method) -> Estimator {
    Estimator::new(m, ConfidenceSpec::new(0.05).unwrap())
}

fn total_variation(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    v.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

#[test]
fn local_average_smooths_conditional_errors() {
    let grid = EvaluationGrid::new(vec![2048], log_spaced(0.05, 100.0, 200), 0.05, 1.2).unwrap();
    for m in Method::ALL {
        let e = est(m);
        let cond = error_curve(&e, &grid, Regime::Conditional).unwrap();
        let local = error_curve(&e, &grid, Regime::LocalAverage).unwrap();
        for side in [0, 1] {
            let pick = |r: &propci_core::ErrorReport| if side == 0 { r.alpha_l } else { r.alpha_u };
            let tc = total_variation(cond.iter().map(|p| pick(&p.report)));
            let tl = total_variation(local.iter().map(|p| pick(&p.report)));
            assert!(tl < tc, "{m} side {side}: local {tl} vs conditional {tc}");
        }
    }
}

#[test]
fn clopper_pearson_is_more_conservative_than_midp() {
    let grid = EvaluationGrid::new(vec![32, 64, 2048], log_spaced(0.05, 100.0, 60), 0.05, 1.2).unwrap();
    let midp = est(Method::ClopperPearsonMidP);
    let cp = half_width_curve(&est(Method::ClopperPearson), &grid, Some(&midp)).unwrap();
    let mp = half_width_curve(&midp, &grid, None).unwrap();
    for (a, b) in cp.iter().zip(&mp) {
        assert_eq!((a.n, a.lambda), (b.n, b.lambda));
        assert!(a.errors.alpha_l <= b.errors.alpha_l + 1e-12, "{a:?}");
        assert!(a.errors.alpha_u <= b.errors.alpha_u + 1e-12, "{a:?}");
        assert!(a.widths.w_l >= b.widths.w_l && a.widths.w_u >= b.widths.w_u);
        assert!(a.widths.ratio_l.unwrap() >= 1.0 && a.widths.ratio_u.unwrap() >= 1.0);
    }
}

#[test]
fn bootstrap_biases_around_wald() {
    let model = RandomProportionModel::from_lambda(4.0, 2048, 1.2).unwrap();
    let two_sided = |m| local_average(&est(m), 2048, &model, 64).unwrap().errors.two_sided;
    let (basic, wald, pct) = (
        two_sided(Method::BootBasic),
        two_sided(Method::Wald),
        two_sided(Method::BootPercentile),
    );
    assert!(basic >= wald, "basic {basic} wald {wald}");
    assert!(pct <= wald, "percentile {pct} wald {wald}");
}

#[test]
fn simulation_agrees_with_quadrature() {
    let midp = est(Method::ClopperPearsonMidP);
    let model = RandomProportionModel::from_lambda(4.0, 64, 1.2).unwrap();
    let q = local_average(&midp, 64, &model, 64).unwrap();
    let mc = monte_carlo_oracle(&midp, OracleDesign::LocalAverage { n: 64, model }, 10_000_000, 7).unwrap();
    assert!((q.errors.alpha_l - mc.alpha_l).abs() <= 3.0 * mc.se_l);
    assert!((q.errors.alpha_u - mc.alpha_u).abs() <= 3.0 * mc.se_u);

    let model = RandomProportionModel::from_lambda(4.0, 32, 1.2).unwrap();
    let q = local_average(&midp, 32, &model, 64).unwrap();
    let mc = monte_carlo_oracle(&midp, OracleDesign::LocalAverage { n: 32, model }, 10_000_000, 8).unwrap();
    assert!((q.w_l - mc.w_l).abs() <= 3.0 * mc.se_w_l, "{} vs {}", q.w_l, mc.w_l);
    assert!((q.w_u - mc.w_u).abs() <= 3.0 * mc.se_w_u, "{} vs {}", q.w_u, mc.w_u);
}

#[test]
fn simulation_without_mixing_matches_conditional() {
    let wilson = est(Method::WilsonModified);
    let flat = RandomProportionModel::new(0.1, 1.0).unwrap();
    let mc = monte_carlo_oracle(&wilson, OracleDesign::LocalAverage { n: 50, model: flat }, 1_000_000, 3).unwrap();
    let exact = conditional_errors(&wilson, 50, 0.1).unwrap();
    assert!((mc.alpha_l - exact.alpha_l).abs() <= 3.0 * mc.se_l.max(1e-6));
    assert!((mc.alpha_u - exact.alpha_u).abs() <= 3.0 * mc.se_u.max(1e-6));
}

#[test]
fn random_size_simulation() {
    let cp = est(Method::ClopperPearson);
    let size = RandomSampleSizeModel::new(64, 1.2f64.ln(), 0.05).unwrap();
    let exact = random_size_errors(&cp, &size).unwrap();
    let mc = monte_carlo_oracle(&cp, OracleDesign::RandomSize(size), 2_000_000, 11).unwrap();
    assert!((mc.alpha_l - exact.alpha_l).abs() <= 3.0 * mc.se_l);
    assert!((mc.alpha_u - exact.alpha_u).abs() <= 3.0 * mc.se_u);
}

#[test]
fn curves_are_deterministic_and_ordered() {
    let grid = EvaluationGrid::new(vec![64, 32], log_spaced(0.5, 50.0, 25), 0.05, 1.2).unwrap();
    let a = error_curve(&est(Method::Blaker), &grid, Regime::RandomSize).unwrap();
    let b = error_curve(&est(Method::Blaker), &grid, Regime::RandomSize).unwrap();
    assert_eq!(a, b);
    assert!(a.iter().take_while(|p| p.n == 64).count() == 25);
    assert!(a.windows(2).all(|w| w[0].n != w[1].n || w[0].lambda < w[1].lambda));
    let u = error_curve(&Uninformative, &grid, Regime::RandomSize).unwrap();
    assert!(u.iter().all(|p| p.report.two_sided == 0.0));
}
