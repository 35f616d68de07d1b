use moorcast_core::rng::rng_from_seed;
use moorcast_ml::ensemble::fit_gbm_model;
use moorcast_ml::importance::{permutation_importance, ranking};
use moorcast_ml::metrics::evaluate_values;
use moorcast_ml::search::{cv_mse, kfold, random_search, GbmSpace, SearchSpace};
use moorcast_ml::*;
use rand::Rng;

fn names(p: usize) -> Vec<String> {
    (0..p).map(|j| format!("x{j}")).collect()
}

fn sine_data(n: usize, seed: u64) -> Dataset {
    let mut rng = rng_from_seed(seed);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random_range(0.0..2.0)]).collect();
    let y = rows.iter().map(|r| (2.0 * std::f64::consts::PI * r[0]).sin()).collect();
    Dataset::new(names(1), &rows, y).unwrap()
}

fn step_data() -> Dataset {
    let rows: Vec<Vec<f64>> = (-50..50).map(|i| vec![i as f64 / 10.0 + 0.05]).collect();
    let y = rows.iter().map(|r| if r[0] > 0.0 { 1.0 } else { 0.0 }).collect();
    Dataset::new(names(1), &rows, y).unwrap()
}

#[test]
fn depth_one_tree_fits_a_step_exactly() {
    let d = step_data();
    let m = fit_tree(&d, &TreeParams { max_depth: 1, min_samples_leaf: 1, n_bins: 256 }).unwrap();
    let pred = m.predict_dataset(&d).unwrap();
    let mse: f64 = pred.iter().zip(&d.y).map(|(p, y)| (p - y).powi(2)).sum::<f64>();
    assert_eq!(mse, 0.0);
}

#[test]
fn constant_target_gives_single_leaf() {
    let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, (i % 3) as f64]).collect();
    let d = Dataset::new(names(2), &rows, vec![2.5; 40]).unwrap();
    let m = fit_tree(&d, &TreeParams::default()).unwrap();
    let Estimator::Tree(t) = &m.estimator else { panic!() };
    assert_eq!(t.tree.n_nodes(), 1);
    assert_eq!(m.predict(&[3.0, 1.0]).unwrap(), 2.5);
    let f = fit_forest(&d, &ForestParams { n_trees: 5, ..ForestParams::default() }).unwrap();
    assert_eq!(f.predict(&[100.0, -4.0]).unwrap(), 2.5);
}

use moorcast_ml::model::Estimator;

#[test]
fn zero_learning_rate_and_zero_rounds_predict_the_mean() {
    let d = sine_data(500, 1);
    let mean = d.y.iter().sum::<f64>() / d.n_rows() as f64;
    for p in [
        GbmParams { learning_rate: 0.0, n_rounds: 20, ..GbmParams::default() },
        GbmParams { n_rounds: 0, ..GbmParams::default() },
    ] {
        let m = fit_gbm(&d, &p).unwrap();
        for i in 0..d.n_rows() {
            assert_eq!(m.predict(d.row(i)).unwrap(), mean);
        }
    }
}

#[test]
fn huge_l2_shrinks_to_the_base_score() {
    let d = sine_data(500, 2);
    let mean = d.y.iter().sum::<f64>() / d.n_rows() as f64;
    let m = fit_gbm(&d, &GbmParams { l2_lambda: 1e30, n_rounds: 10, ..GbmParams::default() }).unwrap();
    for i in 0..50 {
        assert!((m.predict(d.row(i)).unwrap() - mean).abs() < 1e-20);
    }
}

#[test]
fn boosting_beats_linear_on_a_sine() {
    let train = sine_data(5000, 3);
    let test = sine_data(2000, 4);
    let p = GbmParams {
        n_rounds: 300,
        learning_rate: 0.1,
        max_depth: 6,
        min_samples_leaf: 10,
        early_stopping: Some(EarlyStopping::default()),
        ..GbmParams::default()
    };
    let g = fit_gbm(&train, &p).unwrap();
    let l = fit_linear(&train).unwrap();
    let mg = evaluate(&g, &test).unwrap();
    let ml = evaluate(&l, &test).unwrap();
    assert!(mg.mae < 0.05, "gbm mae {}", mg.mae);
    assert!(ml.mae > 0.5, "linear mae {}", ml.mae);
}

#[test]
fn early_stopping_keeps_the_best_round() {
    let d = sine_data(3000, 5);
    let p = GbmParams {
        n_rounds: 400,
        learning_rate: 0.3,
        max_depth: 8,
        min_samples_leaf: 2,
        early_stopping: Some(EarlyStopping { validation_fraction: 0.15, patience: 5 }),
        ..GbmParams::default()
    };
    let (m, trace) = fit_gbm_model(&d, &p).unwrap();
    assert!(trace.rounds_run <= p.n_rounds);
    assert_eq!(m.trees.len(), trace.best_round);
    let best = trace.val_mse.iter().copied().fold(f64::INFINITY, f64::min);
    assert_eq!(trace.val_mse[trace.best_round], best);
}

#[test]
fn training_loss_is_monotone_without_subsampling() {
    let d = sine_data(1000, 6);
    let (_, trace) = fit_gbm_model(&d, &GbmParams { n_rounds: 60, max_depth: 4, l1_alpha: 0.01, l2_lambda: 1.0, ..GbmParams::default() }).unwrap();
    for w in trace.train_mse.windows(2) {
        assert!(w[1] <= w[0]);
    }
}

#[test]
fn angular_model_on_constant_direction() {
    let mut rng = rng_from_seed(8);
    let rows: Vec<Vec<f64>> = (0..400).map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(0.0..5.0)]).collect();
    let d = Dataset::new(names(2), &rows, vec![0.0; 400]).unwrap();
    let (e, n) = moorcast_core::dataset::angular_decompose(45.0);
    let am = AngularModel::fit(&d, vec![e; 400], vec![n; 400], &baseline_params(ModelKind::Gbm)).unwrap();
    for i in 0..20 {
        assert!((am.predict(d.row(i)).unwrap() - 45.0).abs() < 0.5);
    }
    let batch = am.predict_dataset(&d).unwrap();
    for (i, b) in batch.iter().enumerate() {
        assert_eq!(*b, am.predict(d.row(i)).unwrap());
    }
    let zero = AngularModel::fit(&d, vec![0.0; 400], vec![0.0; 400], &Params::Linear).unwrap();
    assert!(matches!(zero.predict(d.row(0)), Err(MlError::DegenerateAngle(_))));
}

#[test]
fn feature_mismatch_is_rejected() {
    let d = sine_data(100, 9);
    let m = fit_linear(&d).unwrap();
    let other = Dataset::new(vec!["other".into()], &[vec![1.0]], vec![1.0]).unwrap();
    assert!(matches!(m.predict_dataset(&other), Err(MlError::FeatureMismatch { .. })));
    assert!(m.predict(&[1.0, 2.0]).is_err());
}

#[test]
fn importance_finds_the_only_driver() {
    let mut rng = rng_from_seed(10);
    let rows: Vec<Vec<f64>> = (0..2000).map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)]).collect();
    let y: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let d = Dataset::new(names(2), &rows, y).unwrap();
    let m = fit_gbm(&d, &GbmParams { max_depth: 6, ..GbmParams::default() }).unwrap();
    let imp = permutation_importance(&m, &d, 3, 1).unwrap();
    assert!(imp[0].share > 0.95, "{imp:?}");
    assert_eq!(ranking(&imp)[0], 0);

    // depth-1 tree never splits on the second column
    let t = fit_tree(&d, &TreeParams { max_depth: 1, ..TreeParams::default() }).unwrap();
    let imp = permutation_importance(&t, &d, 2, 1).unwrap();
    assert_eq!(imp[1].mean, 0.0);
    assert_eq!(imp[1].std, 0.0);
}

#[test]
fn random_search_is_deterministic_and_single_trial_returns_its_draw() {
    let d = sine_data(600, 11);
    let space = SearchSpace::Gbm(GbmSpace { n_rounds: 50, ..GbmSpace::default() });
    let a = random_search(&d, &space, 3, 5, 3).unwrap();
    let b = random_search(&d, &space, 3, 5, 3).unwrap();
    assert_eq!(a, b);
    let one = random_search(&d, &space, 1, 5, 3).unwrap();
    assert_eq!(one.best, a.history[0].params);
    assert_eq!(one.history.len(), 1);
    let bad = SearchSpace::Gbm(GbmSpace { learning_rate: (0.5, 0.1), ..GbmSpace::default() });
    assert!(random_search(&d, &bad, 1, 5, 3).is_err());
}

#[test]
fn search_beats_baseline_on_the_sine_benchmark() {
    let d = sine_data(3000, 12);
    let space = SearchSpace::Gbm(GbmSpace { n_rounds: 400, ..GbmSpace::default() });
    let res = random_search(&d, &space, 50, 13, 3).unwrap();
    let folds = kfold(d.n_rows(), 3, moorcast_core::rng::derive_seed(13, u64::MAX)).unwrap();
    let (base, _) = cv_mse(&d, &baseline_params(ModelKind::Gbm), &folds).unwrap();
    assert!(res.best_cv_mse <= base, "{} vs {base}", res.best_cv_mse);
    assert!(res.history.iter().all(|t| t.cv_mse >= res.best_cv_mse));
}

#[test]
fn linear_training_residual_mean_vanishes() {
    let d = sine_data(1000, 14);
    let m = fit_linear(&d).unwrap();
    let pred = m.predict_dataset(&d).unwrap();
    let r = evaluate_values(&d.y, &pred).unwrap();
    let mean = d.y.iter().sum::<f64>() / d.n_rows() as f64;
    let sd = (d.y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / d.n_rows() as f64).sqrt();
    assert!(r.residual_mean.abs() <= 1e-8 * sd);
}
