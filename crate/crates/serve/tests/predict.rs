mod common;

use std::time::Instant;

use moorcast_core::dataset::Split;
use moorcast_ml::Dataset;
use moorcast_serve::domain::BoundSide;
use moorcast_serve::predict::features_for;
use moorcast_serve::{domain_check, predict_responses, PredictOptions, ServeError};

#[test]
fn every_training_row_is_in_domain() {
    let f = common::fixture();
    for i in f.table.rows(Split::Train) {
        assert!(domain_check(&f.bundle.bounds, f.table.features[i].as_slice(), 0.0).ok);
    }
}

#[test]
fn hs1_above_training_max_is_named() {
    let f = common::fixture();
    let s = common::out_of_domain_state();
    let (_, x) = features_for(&f.bundle, &s).unwrap();
    let r = domain_check(&f.bundle.bounds, x.as_slice(), 0.0);
    assert!(!r.ok);
    let v = r.violations.iter().find(|v| v.feature == "hs1").unwrap();
    assert_eq!(v.side, BoundSide::Max);
    assert_eq!(v.value, s.wave1.hs);
}

#[test]
fn validation_state_matches_offline_prediction() {
    let f = common::fixture();
    let opts = PredictOptions::default();
    let val = f.table.rows(Split::Validation);
    let d = Dataset::from_table(&f.table, 0, Split::Validation).unwrap();
    let offline = f.bundle.models.mpm_offset.predict_dataset(&d).unwrap();
    let mut checked = 0;
    for (k, &i) in val.iter().enumerate() {
        let s = common::state(&f.table.ids[i]);
        let x = f.table.features[i];
        if !domain_check(&f.bundle.bounds, x.as_slice(), 0.0).ok {
            continue;
        }
        let r = predict_responses(&f.bundle, s, &opts).unwrap();
        assert_eq!(r.statistics.mpm_offset.to_bits(), offline[k].max(0.0).to_bits());
        assert_eq!(
            r.statistics.offset_dir.to_bits(),
            f.bundle.models.offset_dir.predict(x.as_slice()).unwrap().to_bits()
        );
        checked += 1;
    }
    assert!(checked > 10);
}

#[test]
fn out_of_domain_is_refused_without_numbers() {
    let f = common::fixture();
    let s = common::out_of_domain_state();
    match predict_responses(&f.bundle, &s, &PredictOptions::default()) {
        Err(ServeError::Domain { violations }) => {
            assert!(violations.iter().any(|v| v.feature == "hs1"));
        }
        other => panic!("expected a domain error, got {other:?}"),
    }
}

#[test]
fn override_echoes_the_flag() {
    let f = common::fixture();
    let s = common::out_of_domain_state();
    let opts = PredictOptions {
        allow_extrapolation: true,
        ..PredictOptions::default()
    };
    let r = predict_responses(&f.bundle, &s, &opts).unwrap();
    assert!(r.extrapolation_override);
    assert!(!r.domain_ok);
    assert!(!r.violations.is_empty());

    let r = predict_responses(&f.bundle, common::train_state(), &opts).unwrap();
    assert!(!r.extrapolation_override);
    assert!(r.domain_ok && r.violations.is_empty());
}

#[test]
fn margin_admits_a_nearby_point() {
    let f = common::fixture();
    let b = f.bundle.bounds.iter().find(|b| b.name == "hs1").unwrap();
    let (_, x) = features_for(&f.bundle, common::train_state()).unwrap();
    let mut x = x.0;
    x[0] = b.max + 0.04 * (b.max - b.min);
    assert!(!domain_check(&f.bundle.bounds, &x, 0.0).ok);
    assert!(domain_check(&f.bundle.bounds, &x, 0.05).ok);
}

#[test]
fn report_is_deterministic_and_consistent() {
    let f = common::fixture();
    let s = common::train_state();
    let opts = PredictOptions::default();
    let a = predict_responses(&f.bundle, s, &opts).unwrap();
    let b = predict_responses(&f.bundle, s, &opts).unwrap();
    // wall time is the only field allowed to differ
    assert_eq!(
        serde_json::to_string(&a.statistics).unwrap(),
        serde_json::to_string(&b.statistics).unwrap()
    );
    assert_eq!(a.utilization, b.utilization);
    assert_eq!(a.bundle_version, f.bundle.version());
    assert_eq!(a.id, s.id);
    let lim = f.bundle.limits;
    assert_eq!(a.utilization.mpm_offset, a.statistics.mpm_offset / lim.offset_m);
    assert_eq!(a.utilization.mpm_t_fair, a.statistics.mpm_t_fair / lim.tension_n);
    assert_eq!(a.utilization.mpm_t_anchor, a.statistics.mpm_t_anchor / lim.tension_n);
    assert!(a.utilization.mpm_offset >= 0.0 && a.utilization.mpm_t_fair >= 0.0);
    assert!(a.inference_ms >= 0.0);
}

#[test]
fn single_state_latency_under_one_second() {
    let f = common::fixture();
    let s = common::train_state();
    let start = Instant::now();
    predict_responses(&f.bundle, s, &PredictOptions::default()).unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn invalid_state_is_rejected() {
    let f = common::fixture();
    let mut s = common::train_state().clone();
    s.wind.theta_w = 361.0;
    let err = predict_responses(&f.bundle, &s, &PredictOptions::default()).unwrap_err();
    assert_eq!(err.code(), "invalid_state");
}
