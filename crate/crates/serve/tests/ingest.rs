use chrono::{DateTime, Duration, Utc};
use moorcast_core::metocean::METOCEAN_CSV_HEADER;
use moorcast_serve::ingest::{ingest_buoy, ingest_forecast, window_span_hours, BuoyClient, FileBuoyClient, IngestConfig};
use moorcast_serve::ServeError;
use serde_json::json;

fn now() -> DateTime<Utc> {
    "2026-03-01T12:30:00Z".parse().unwrap()
}

fn payload() -> serde_json::Value {
    json!({
        "timestamp": "2026-03-01T12:00:00Z",
        "wave": [{"hs": 2.6, "tp": 8.44, "dir": 223.0}, {"hs": 1.8, "tp": 13.1, "dir": 225.0}],
        "wind": {"speed": 9.9, "dir": 190.0},
        "current": {"speed": 0.5, "dir": 110.0}
    })
}

fn schema_path(e: ServeError) -> String {
    match e {
        ServeError::Schema { path, .. } => path,
        other => panic!("expected a schema error, got {other:?}"),
    }
}

#[test]
fn nominal_payload() {
    let obs = ingest_buoy(&payload().to_string(), now(), &IngestConfig::default()).unwrap();
    assert_eq!(obs.state.id, "buoy-20260301T120000Z");
    assert_eq!(obs.state.wave1.hs, 2.6);
    assert_eq!(obs.state.wave2.theta_p, 225.0);
    assert_eq!(obs.state.wind.uw, 9.9);
    assert_eq!(obs.state.current.theta_c, 110.0);
    assert!(!obs.swell_missing);
}

#[test]
fn missing_swell_is_flagged() {
    let mut p = payload();
    p["wave"].as_array_mut().unwrap().pop();
    let obs = ingest_buoy(&p.to_string(), now(), &IngestConfig::default()).unwrap();
    assert!(obs.swell_missing);
    assert_eq!(obs.state.wave2.hs, 0.0);
}

#[test]
fn missing_wind_block_names_wind() {
    let mut p = payload();
    p.as_object_mut().unwrap().remove("wind");
    let e = ingest_buoy(&p.to_string(), now(), &IngestConfig::default()).unwrap_err();
    assert_eq!(schema_path(e), "wind");
}

#[test]
fn nested_field_paths() {
    let mut p = payload();
    p["wave"][1]["tp"] = json!("long");
    let e = ingest_buoy(&p.to_string(), now(), &IngestConfig::default()).unwrap_err();
    assert_eq!(schema_path(e), "wave[1].tp");

    let mut p = payload();
    p["current"]["speed"] = json!(-1.0);
    let e = ingest_buoy(&p.to_string(), now(), &IngestConfig::default()).unwrap_err();
    assert_eq!(schema_path(e), "current.speed");

    let mut p = payload();
    p["timestamp"] = json!("yesterday");
    let e = ingest_buoy(&p.to_string(), now(), &IngestConfig::default()).unwrap_err();
    assert_eq!(schema_path(e), "timestamp");
}

#[test]
fn directions_are_wrapped() {
    let mut p = payload();
    p["wind"]["dir"] = json!(370.0);
    let obs = ingest_buoy(&p.to_string(), now(), &IngestConfig::default()).unwrap();
    assert!((obs.state.wind.theta_w - 10.0).abs() < 1e-12);
}

#[test]
fn stale_observation() {
    let cfg = IngestConfig::default();
    assert_eq!(cfg.max_age_s, 3600.0);
    let late = now() + Duration::seconds(3601);
    match ingest_buoy(&payload().to_string(), late, &cfg) {
        Err(ServeError::Stale { age_s, max_age_s }) => {
            assert!(age_s > 3600.0 + 1800.0 - 1.0);
            assert_eq!(max_age_s, 3600.0);
        }
        other => panic!("expected staleness, got {other:?}"),
    }
}

#[test]
fn file_client_reads_payload() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("buoy.json");
    std::fs::write(&path, payload().to_string()).unwrap();
    let client = FileBuoyClient { path };
    let obs = ingest_buoy(&client.fetch().unwrap(), now(), &IngestConfig::default()).unwrap();
    assert_eq!(obs.state.wave1.tp, 8.44);
}

fn forecast_csv(times: &[DateTime<Utc>], time_col: usize) -> String {
    let mut header: Vec<&str> = METOCEAN_CSV_HEADER.to_vec();
    header.insert(time_col, "valid_time");
    let mut out = header.join(",") + "\n";
    for (k, t) in times.iter().enumerate() {
        let mut row: Vec<String> = format!(
            "f{k:02},{},8.0,220,3.3,0.07,0.09,1.5,13.0,225,3.3,0.07,0.09,{},200,0.4,110",
            1.0 + 0.1 * k as f64,
            8.0 + 0.2 * k as f64
        )
        .split(',')
        .map(String::from)
        .collect();
        row.insert(time_col, t.to_rfc3339());
        out += &(row.join(",") + "\n");
    }
    out
}

fn three_hourly(n: usize) -> Vec<DateTime<Utc>> {
    let t0: DateTime<Utc> = "2026-03-01T00:00:00Z".parse().unwrap();
    (0..n).map(|k| t0 + Duration::hours(3 * k as i64)).collect()
}

#[test]
fn window_of_24_three_hourly_rows() {
    let w = ingest_forecast(&forecast_csv(&three_hourly(24), 0)).unwrap();
    assert_eq!(w.len(), 24);
    assert!(w.windows(2).all(|p| p[0].valid_time < p[1].valid_time));
    assert_eq!(w[5].state.id, "f05");
    assert_eq!(window_span_hours(&w), 69.0);
    assert_eq!(IngestConfig::default().forecast_window_h, 72.0);
    assert_eq!(IngestConfig::default().forecast_cadence_h, 12.0);
}

#[test]
fn time_column_in_any_position() {
    let w = ingest_forecast(&forecast_csv(&three_hourly(4), 9)).unwrap();
    assert_eq!(w.len(), 4);
    assert_eq!(w[3].state.wind.uw, 8.6);
}

#[test]
fn duplicate_and_unordered_times() {
    let mut t = three_hourly(5);
    t[3] = t[2];
    let e = ingest_forecast(&forecast_csv(&t, 0)).unwrap_err();
    assert!(e.to_string().contains("duplicate"), "{e}");

    let mut t = three_hourly(5);
    t.swap(1, 2);
    let e = ingest_forecast(&forecast_csv(&t, 0)).unwrap_err();
    assert_eq!(e.code(), "invalid_forecast");
}

#[test]
fn schema_violations_in_forecast() {
    let csv = forecast_csv(&three_hourly(3), 0).replacen("valid_time", "time", 1);
    assert_eq!(schema_path(ingest_forecast(&csv).unwrap_err()), "valid_time");

    let csv = forecast_csv(&three_hourly(3), 0).replace(",200,", ",400,");
    assert_eq!(ingest_forecast(&csv).unwrap_err().code(), "invalid_state");
}
