use moorcast_core::metocean::{
    angle_diff_deg, enforce_steepness_limit, jonswap_spectrum, npd_wind_spectrum, parse_metocean_row,
    read_metocean_csv, sample_metocean, steepness, validate_state, wrap_deg, write_metocean_csv, DatasetBounds,
    MetoceanState, SteepnessLimit, WaveSystem, OMEGA_MAX, OMEGA_MIN,
};
use proptest::prelude::*;

fn m0_trapezoid(w: &WaveSystem, n: usize) -> f64 {
    let dw = (OMEGA_MAX - OMEGA_MIN) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| OMEGA_MIN + i as f64 * dw).collect();
    let s = jonswap_spectrum(w, &grid).unwrap();
    s.windows(2).map(|p| 0.5 * (p[0] + p[1]) * dw).sum()
}

#[test]
fn reference_sea_state_has_expected_peak() {
    let w = WaveSystem::new(2.6, 8.44, 0.0);
    let grid: Vec<f64> = (1..=4000).map(|i| OMEGA_MIN + (OMEGA_MAX - OMEGA_MIN) * i as f64 / 4000.0).collect();
    let s = jonswap_spectrum(&w, &grid).unwrap();
    let (k, _) = s.iter().enumerate().fold((0, 0.0), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
    let wp = 2.0 * std::f64::consts::PI / 8.44;
    assert!((grid[k] - wp).abs() < 2.0 * (OMEGA_MAX - OMEGA_MIN) / 4000.0);
}

#[test]
fn wind_spectrum_grows_with_speed() {
    let f = [0.005, 0.01, 0.05];
    let slow = npd_wind_spectrum(10.0, 10.0, &f).unwrap();
    let fast = npd_wind_spectrum(20.0, 10.0, &f).unwrap();
    assert!(slow.iter().zip(&fast).all(|(a, b)| b > a));
    assert!(npd_wind_spectrum(0.0, 10.0, &f).unwrap().iter().all(|v| *v == 0.0));
}

#[test]
fn sampler_is_deterministic_and_inside_the_box() {
    let b = DatasetBounds::reference();
    let a = sample_metocean(500, 42, &b).unwrap();
    assert_eq!(a, sample_metocean(500, 42, &b).unwrap());
    assert_ne!(a, sample_metocean(500, 43, &b).unwrap());
    let sp = SteepnessLimit::default();
    for s in &a {
        assert!(validate_state(s).is_empty(), "{s:?}");
        assert!((0.26..=8.0).contains(&s.wave1.hs) && (2.85..=17.0).contains(&s.wave1.tp));
        assert!(s.current.uc <= 4.65 && s.wind.uw <= 41.76);
        for w in s.waves() {
            if w.hs > 0.0 {
                assert!(steepness(w.hs, w.tp) <= sp.max_steepness(w.tp) + 1e-12);
            }
        }
    }
}

#[test]
fn quartile_directions_hit_their_medians() {
    let states = sample_metocean(4000, 5, &DatasetBounds::reference()).unwrap();
    let mut th: Vec<f64> = states.iter().map(|s| s.wave1.theta_p).collect();
    th.sort_by(f64::total_cmp);
    let median = th[th.len() / 2];
    assert!((median - 223.14).abs() < 3.0, "median {median}");
}

#[test]
fn csv_round_trip_is_lossless() {
    let states = sample_metocean(50, 9, &DatasetBounds::reference()).unwrap();
    let mut buf = Vec::new();
    write_metocean_csv(&mut buf, &states).unwrap();
    assert_eq!(read_metocean_csv(buf.as_slice()).unwrap(), states);
}

#[test]
fn malformed_rows_are_rejected() {
    assert!(parse_metocean_row("s1,2.0,8.0").is_err());
    assert!(parse_metocean_row("s1,-1,8,200,3.3,0.07,0.09,1,12,220,3.3,0.07,0.09,10,190,0.5,100").is_err());
}

#[test]
fn invalid_state_names_every_bad_field() {
    let mut s = MetoceanState::calm("x");
    s.wave1.hs = -1.0;
    s.wind.theta_w = 400.0;
    s.current.uc = f64::NAN;
    let fields: Vec<String> = validate_state(&s).into_iter().map(|v| v.field).collect();
    for f in ["wave1.hs", "wind.theta_w", "current.uc"] {
        assert!(fields.iter().any(|x| x == f), "{fields:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jonswap_integrates_to_hs(hs in 0.26f64..8.0, tp in 2.85f64..17.0, gamma in 1.0f64..5.0) {
        let w = WaveSystem { gamma, ..WaveSystem::new(hs, tp, 0.0) };
        let est = 4.0 * m0_trapezoid(&w, 2048).sqrt();
        prop_assert!((est - hs).abs() <= 0.01 * hs, "hs {} estimate {}", hs, est);
    }

    #[test]
    fn jonswap_scales_with_hs_squared(hs in 0.5f64..6.0, tp in 4.0f64..15.0) {
        let grid = [0.3, 0.6, 0.9];
        let a = jonswap_spectrum(&WaveSystem::new(hs, tp, 0.0), &grid).unwrap();
        let b = jonswap_spectrum(&WaveSystem::new(2.0 * hs, tp, 0.0), &grid).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((y - 4.0 * x).abs() <= 1e-9 * y.abs().max(1e-300));
        }
    }

    #[test]
    fn steepness_clamp_is_idempotent(hs in 0.0f64..20.0, tp in 1.0f64..25.0) {
        let (h1, _) = enforce_steepness_limit(hs, tp);
        let (h2, clamped) = enforce_steepness_limit(h1, tp);
        prop_assert_eq!(h1, h2);
        prop_assert!(!clamped);
        prop_assert!(h1 <= hs);
    }

    #[test]
    fn wrap_lands_in_range(theta in -1e5f64..1e5) {
        let w = wrap_deg(theta);
        prop_assert!((0.0..360.0).contains(&w));
        prop_assert!(angle_diff_deg(w, theta).abs() < 1e-6);
    }

    #[test]
    fn angle_diff_is_antisymmetric(a in 0.0f64..360.0, b in 0.0f64..360.0) {
        let d = angle_diff_deg(a, b);
        prop_assert!(d > -180.0 - 1e-12 && d <= 180.0);
        if d.abs() < 180.0 - 1e-9 {
            prop_assert!((d + angle_diff_deg(b, a)).abs() < 1e-9);
        }
    }
}
