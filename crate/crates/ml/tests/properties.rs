use moorcast_core::rng::rng_from_seed;
use moorcast_ml::metrics::{evaluate_angles, evaluate_values};
use moorcast_ml::*;
use proptest::prelude::*;
use rand::Rng;

fn random_data(n: usize, p: usize, seed: u64, f: impl Fn(&[f64]) -> f64) -> Dataset {
    let mut rng = rng_from_seed(seed);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
    let y = rows.iter().map(|r| f(r)).collect();
    Dataset::new((0..p).map(|j| format!("x{j}")).collect(), &rows, y).unwrap()
}

fn y_range(d: &Dataset) -> (f64, f64) {
    d.y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn forest_predictions_stay_inside_the_target_range(seed in any::<u64>(), probe in proptest::collection::vec(-10.0f64..10.0, 3)) {
        let d = random_data(200, 3, seed, |r| r[0] * r[1] + r[2].sin());
        let (lo, hi) = y_range(&d);
        let m = fit_forest(&d, &ForestParams { n_trees: 10, seed, ..ForestParams::default() }).unwrap();
        let p = m.predict(&probe).unwrap();
        prop_assert!(p >= lo - 1e-9 && p <= hi + 1e-9);
    }

    #[test]
    fn tree_predictions_stay_inside_the_target_range(seed in any::<u64>(), probe in proptest::collection::vec(-10.0f64..10.0, 2)) {
        let d = random_data(150, 2, seed, |r| (r[0] - r[1]).abs());
        let (lo, hi) = y_range(&d);
        let p = fit_tree(&d, &TreeParams::default()).unwrap().predict(&probe).unwrap();
        prop_assert!(p >= lo - 1e-9 && p <= hi + 1e-9);
    }

    #[test]
    fn boosting_is_deterministic_for_a_seed(seed in any::<u64>()) {
        let d = random_data(300, 3, seed, |r| r[0].powi(2) - r[2]);
        let p = GbmParams { n_rounds: 30, row_subsample: 0.7, col_subsample: 0.7, seed, ..GbmParams::default() };
        let a = fit_gbm(&d, &p).unwrap().predict_dataset(&d).unwrap();
        let b = fit_gbm(&d, &p).unwrap().predict_dataset(&d).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn boosting_without_subsampling_fits_better_with_more_rounds(seed in any::<u64>()) {
        let d = random_data(300, 2, seed, |r| (2.0 * r[0]).sin() + 0.5 * r[1]);
        let mse = |rounds: usize| {
            let m = fit_gbm(&d, &GbmParams { n_rounds: rounds, early_stopping: None, ..GbmParams::default() }).unwrap();
            evaluate(&m, &d).unwrap().rmse
        };
        prop_assert!(mse(40) <= mse(20) + 1e-12);
    }

    #[test]
    fn least_squares_recovers_an_exact_plane(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0) {
        let d = random_data(50, 2, 1, |r| a * r[0] + b * r[1] + c);
        let m = fit_linear(&d).unwrap();
        prop_assert!(evaluate(&m, &d).unwrap().rmse < 1e-8);
        prop_assert!((m.predict(&[0.0, 0.0]).unwrap() - c).abs() < 1e-8);
    }

    #[test]
    fn wrapped_angle_errors_never_exceed_half_a_turn(
        pairs in proptest::collection::vec((0.0f64..360.0, 0.0f64..360.0), 2..50),
    ) {
        let (y, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let m = evaluate_angles(&y, &p).unwrap();
        prop_assert!(m.mae <= 180.0 + 1e-9);
        prop_assert!(m.residual_max <= 180.0 + 1e-9 && m.residual_min > -180.0 - 1e-9);
    }

    #[test]
    fn angle_metrics_see_through_the_wrap(theta in 0.0f64..360.0, err in -20.0f64..20.0) {
        let y = vec![theta, (theta + 90.0) % 360.0];
        let p: Vec<f64> = y.iter().map(|t| (t + err + 360.0) % 360.0).collect();
        let m = evaluate_angles(&y, &p).unwrap();
        prop_assert!((m.mae - err.abs()).abs() < 1e-9);
    }

    #[test]
    fn perfect_predictions_score_one(values in proptest::collection::vec(-100.0f64..100.0, 3..60)) {
        prop_assume!(values.iter().any(|v| (v - values[0]).abs() > 1e-6));
        let m = evaluate_values(&values, &values).unwrap();
        prop_assert_eq!(m.rmse, 0.0);
        prop_assert!((m.r2 - 1.0).abs() < 1e-12);
    }
}
