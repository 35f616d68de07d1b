//! Metocean ingestion: buoy observations and forecast windows.

use std::path::PathBuf;

use chrono::{DateTime, Utc};
use moorcast_core::metocean::{wrap_deg, Current, MetoceanRow, MetoceanState, WaveSystem, Wind, METOCEAN_CSV_HEADER};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Result, ServeError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestConfig {
    /// Oldest acceptable buoy observation, s.
    pub max_age_s: f64,
    /// Forecast refresh interval, h.
    pub forecast_cadence_h: f64,
    /// Forecast horizon, h.
    pub forecast_window_h: f64,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            max_age_s: 3600.0,
            forecast_cadence_h: 12.0,
            forecast_window_h: 72.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuoyObservation {
    pub timestamp: DateTime<Utc>,
    pub state: MetoceanState,
    /// The payload carried no swell system; a zero-height swell was used.
    pub swell_missing: bool,
}

fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| ServeError::schema(join(path, key), "missing"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_owned()
    } else {
        format!("{path}.{key}")
    }
}

fn number(v: &Value, key: &str, path: &str) -> Result<f64> {
    let p = join(path, key);
    let x = field(v, key, path)?
        .as_f64()
        .ok_or_else(|| ServeError::schema(&p, "expected a number"))?;
    if !x.is_finite() {
        return Err(ServeError::schema(p, "not finite"));
    }
    Ok(x)
}

fn non_negative(v: &Value, key: &str, path: &str) -> Result<f64> {
    let x = number(v, key, path)?;
    if x < 0.0 {
        return Err(ServeError::schema(join(path, key), "must be ≥ 0"));
    }
    Ok(x)
}

fn wave(v: &Value, path: &str) -> Result<WaveSystem> {
    let hs = non_negative(v, "hs", path)?;
    let tp = number(v, "tp", path)?;
    if tp <= 0.0 {
        return Err(ServeError::schema(join(path, "tp"), "must be > 0"));
    }
    Ok(WaveSystem::new(hs, tp, wrap_deg(number(v, "dir", path)?)))
}

fn parse_time(s: &str, path: &str) -> Result<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(s.trim())
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| ServeError::schema(path, format!("not an RFC 3339 time: {e}")))
}

/// Map a buoy payload `{timestamp, wave: [{hs, tp, dir}, …], wind: {speed,
/// dir}, current: {speed, dir}}` to a validated state. The first wave entry
/// is the wind sea, the second (optional) the swell.
pub fn ingest_buoy(payload: &str, now: DateTime<Utc>, cfg: &IngestConfig) -> Result<BuoyObservation> {
    let v: Value = serde_json::from_str(payload).map_err(|e| ServeError::schema("", e.to_string()))?;
    if !v.is_object() {
        return Err(ServeError::schema("", "expected an object"));
    }
    let ts = field(&v, "timestamp", "")?
        .as_str()
        .ok_or_else(|| ServeError::schema("timestamp", "expected a string"))?;
    let timestamp = parse_time(ts, "timestamp")?;

    let waves = field(&v, "wave", "")?
        .as_array()
        .ok_or_else(|| ServeError::schema("wave", "expected an array"))?;
    if waves.is_empty() || waves.len() > 2 {
        return Err(ServeError::schema("wave", "expected one or two wave systems"));
    }
    let wave1 = wave(&waves[0], "wave[0]")?;
    let (wave2, swell_missing) = match waves.get(1) {
        Some(w) => (wave(w, "wave[1]")?, false),
        None => (WaveSystem::calm(), true),
    };
    let wind = field(&v, "wind", "")?;
    let current = field(&v, "current", "")?;
    let state = MetoceanState {
        id: format!("buoy-{}", timestamp.format("%Y%m%dT%H%M%SZ")),
        wave1,
        wave2,
        wind: Wind {
            uw: non_negative(wind, "speed", "wind")?,
            theta_w: wrap_deg(number(wind, "dir", "wind")?),
        },
        current: Current {
            uc: non_negative(current, "speed", "current")?,
            theta_c: wrap_deg(number(current, "dir", "current")?),
        },
    };
    state.ensure_valid()?;

    let age_s = (now - timestamp).num_milliseconds() as f64 / 1e3;
    if age_s > cfg.max_age_s {
        return Err(ServeError::Stale {
            age_s,
            max_age_s: cfg.max_age_s,
        });
    }
    Ok(BuoyObservation {
        timestamp,
        state,
        swell_missing,
    })
}

/// Source of raw buoy payloads.
pub trait BuoyClient: Send + Sync {
    fn fetch(&self) -> Result<String>;
}

/// Reads the latest payload from a file; stands in for the network client.
pub struct FileBuoyClient {
    pub path: PathBuf,
}

impl BuoyClient for FileBuoyClient {
    fn fetch(&self) -> Result<String> {
        Ok(std::fs::read_to_string(&self.path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastState {
    pub valid_time: DateTime<Utc>,
    pub state: MetoceanState,
}

/// Parse a forecast CSV: the metocean columns plus `valid_time` (RFC 3339)
/// in any position. Times must be strictly increasing.
pub fn ingest_forecast(csv_text: &str) -> Result<Vec<ForecastState>> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let header = rdr.headers().map_err(|e| ServeError::Forecast(e.to_string()))?.clone();
    let tcol = header
        .iter()
        .position(|h| h == "valid_time")
        .ok_or_else(|| ServeError::schema("valid_time", "missing column"))?;
    let rest: Vec<&str> = header.iter().enumerate().filter(|(i, _)| *i != tcol).map(|(_, h)| h).collect();
    if rest != METOCEAN_CSV_HEADER {
        return Err(ServeError::Forecast(format!(
            "columns must be valid_time plus `{}`",
            METOCEAN_CSV_HEADER.join(",")
        )));
    }
    let met_header = csv::StringRecord::from(METOCEAN_CSV_HEADER.to_vec());
    let mut out: Vec<ForecastState> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| ServeError::Forecast(e.to_string()))?;
        let path = format!("row[{line}]");
        let valid_time = parse_time(&rec[tcol], &format!("{path}.valid_time"))?;
        let fields: csv::StringRecord = rec.iter().enumerate().filter(|(i, _)| *i != tcol).map(|(_, f)| f).collect();
        let row: MetoceanRow = fields
            .deserialize(Some(&met_header))
            .map_err(|e| ServeError::schema(&path, e.to_string()))?;
        let state = MetoceanState::from(row);
        state.ensure_valid()?;
        if let Some(prev) = out.last() {
            if valid_time == prev.valid_time {
                return Err(ServeError::Forecast(format!("duplicate valid_time {valid_time} at {path}")));
            }
            if valid_time < prev.valid_time {
                return Err(ServeError::Forecast(format!("valid_time goes backwards at {path}")));
            }
        }
        out.push(ForecastState { valid_time, state });
    }
    Ok(out)
}

/// Hours between the first and last forecast time.
pub fn window_span_hours(window: &[ForecastState]) -> f64 {
    match (window.first(), window.last()) {
        (Some(a), Some(b)) => (b.valid_time - a.valid_time).num_seconds() as f64 / 3600.0,
        _ => 0.0,
    }
}
