use approx::assert_abs_diff_eq;
use mixcurv::corpus;
use mixcurv::montecarlo::McConfig;
use mixcurv::polytope::Region;
use mixcurv::translative::{order_tuples, tif_lhs, tif_rhs, Integrator, TifSpec, Window};
use mixcurv::Error;

fn squares(k: usize, integrator: Integrator) -> TifSpec {
    let sq = corpus::unit_square();
    TifSpec::new(vec![sq.clone(), sq], k, integrator)
}

#[test]
fn rhs_breakdowns_for_squares() {
    let rhs = tif_rhs(&squares(0, Integrator::Grid { step: 0.1 })).unwrap();
    let entries: Vec<(Vec<usize>, f64)> = rhs.breakdown.iter().map(|e| (e.orders.clone(), e.value)).collect();
    assert_eq!(entries.len(), 3);
    for (orders, value) in entries {
        let want = if orders == [1, 1] { 2.0 } else { 1.0 };
        assert_abs_diff_eq!(value, want, epsilon = 1e-12);
    }
    let rhs = tif_rhs(&squares(1, Integrator::Grid { step: 0.1 })).unwrap();
    assert_eq!(rhs.breakdown.len(), 2);
    assert_abs_diff_eq!(rhs.value, 4.0, epsilon = 1e-12);
    assert_eq!(order_tuples(3, 3, 6).len(), 10);
}

#[test]
fn lhs_is_reproducible_and_scales_like_root_n() {
    let cfg = McConfig::default().with_samples(20_000);
    let a = tif_lhs(&squares(1, Integrator::MonteCarlo(cfg))).unwrap();
    let b = tif_lhs(&squares(1, Integrator::MonteCarlo(cfg))).unwrap();
    assert_eq!(a, b);
    let mut ratios = Vec::new();
    for seed in 0..4 {
        let small = tif_lhs(&squares(1, Integrator::MonteCarlo(cfg.with_seed(seed)))).unwrap();
        let large = tif_lhs(&squares(1, Integrator::MonteCarlo(cfg.with_seed(seed).with_samples(40_000)))).unwrap();
        ratios.push(large.std_error / small.std_error);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!((mean - std::f64::consts::FRAC_1_SQRT_2).abs() <= 0.2 * std::f64::consts::FRAC_1_SQRT_2, "{ratios:?}");
}

#[test]
fn coarse_grid_is_close() {
    let lhs = tif_lhs(&squares(1, Integrator::Grid { step: 0.02 })).unwrap();
    assert!((lhs.value - 4.0).abs() <= 1e-2);
    assert!(lhs.refinement_error.unwrap() <= 5e-2);
}

#[test]
fn test_function_supported_away_from_intersections() {
    let mut spec = squares(0, Integrator::Grid { step: 0.05 });
    spec.regions = vec![Region::boxed(&[5.0, 5.0], &[6.0, 6.0]), Region::All];
    assert_eq!(tif_lhs(&spec).unwrap().value, 0.0);
    assert_eq!(tif_rhs(&spec).unwrap().value, 0.0);
}

#[test]
fn window_must_cover_the_support() {
    let mut spec = squares(0, Integrator::Grid { step: 0.05 });
    spec.window = Some(vec![Window { lower: vec![-0.5, -0.5], upper: vec![0.5, 0.5] }]);
    assert!(matches!(tif_lhs(&spec), Err(Error::Validation(_))));
}

#[test]
fn spec_from_json() {
    let text = r#"{
        "polytopes": [
            {"dim": 2, "vertices": [[0,0],[1,0],[1,1],[0,1]]},
            {"dim": 2, "vertices": [[0,0],[1,0],[1,1],[0,1]]}
        ],
        "k": 0,
        "integrator": {"grid": {"step": 0.05}}
    }"#;
    let spec = TifSpec::from_json(text).unwrap();
    let lhs = tif_lhs(&spec).unwrap();
    assert_abs_diff_eq!(lhs.value, 4.0, epsilon = 1e-6);
}
