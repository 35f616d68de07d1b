//! HTTP JSON API over a loaded bundle.

use std::sync::{Arc, RwLock};
use std::time::{Duration, Instant};

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use moorcast_core::dataset::FeatureBound;
use moorcast_core::metocean::MetoceanState;
use moorcast_core::CoreError;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bundle::{Limits, ModelBundle};
use crate::error::ServeError;
use crate::ingest::{ingest_forecast, ForecastState};
use crate::predict::{predict_responses, PredictOptions, PredictionReport};

/// One forecast time step: a report, or the reason there is none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastEntry {
    pub valid_time: DateTime<Utc>,
    pub report: Option<PredictionReport>,
    pub error: Option<ErrorBody>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ForecastSnapshot {
    pub ingested_at: Option<DateTime<Utc>>,
    pub entries: Vec<ForecastEntry>,
}

#[derive(Clone)]
pub struct AppState {
    pub bundle: Arc<ModelBundle>,
    pub options: PredictOptions,
    pub started: Instant,
    /// Written only by the forecast poller; handlers clone the inner `Arc`.
    pub forecast: Arc<RwLock<Arc<ForecastSnapshot>>>,
}

impl AppState {
    pub fn new(bundle: ModelBundle, margin: f64) -> Self {
        Self {
            bundle: Arc::new(bundle),
            options: PredictOptions {
                margin,
                allow_extrapolation: false,
            },
            started: Instant::now(),
            forecast: Arc::new(RwLock::new(Arc::new(ForecastSnapshot::default()))),
        }
    }

    pub fn publish_forecast(&self, snap: ForecastSnapshot) {
        *self.forecast.write().expect("forecast lock") = Arc::new(snap);
    }

    pub fn forecast_snapshot(&self) -> Arc<ForecastSnapshot> {
        self.forecast.read().expect("forecast lock").clone()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    pub violations: Vec<Value>,
}

impl From<&ServeError> for ErrorBody {
    fn from(e: &ServeError) -> Self {
        let violations = match e {
            ServeError::Domain { violations } => violations.iter().map(|v| json!(v)).collect(),
            ServeError::Schema { path, message } => vec![json!({ "field": path, "message": message })],
            ServeError::Core(CoreError::InvalidState { violations, .. }) => violations.iter().map(|v| json!(v)).collect(),
            _ => Vec::new(),
        };
        ErrorBody {
            code: e.code().to_owned(),
            message: e.to_string(),
            violations,
        }
    }
}

pub struct ApiError(ServeError);

impl From<ServeError> for ApiError {
    fn from(e: ServeError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            ServeError::Domain { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            ServeError::Schema { .. } | ServeError::Json(_) | ServeError::Core(CoreError::InvalidState { .. }) => {
                StatusCode::BAD_REQUEST
            }
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(ErrorBody::from(&self.0))).into_response()
    }
}

#[derive(Debug, Default, Deserialize)]
pub struct PredictQuery {
    #[serde(default)]
    pub allow_extrapolation: bool,
}

fn options(state: &AppState, q: &PredictQuery) -> PredictOptions {
    PredictOptions {
        allow_extrapolation: q.allow_extrapolation,
        ..state.options
    }
}

async fn run_blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ServeError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError(ServeError::Forecast(format!("worker panicked: {e}"))))?
        .map_err(ApiError)
}

fn parse_body<T: serde::de::DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError(ServeError::schema("body", e.to_string())))
}

async fn predict(
    State(state): State<AppState>,
    Query(q): Query<PredictQuery>,
    body: axum::body::Bytes,
) -> Result<Json<PredictionReport>, ApiError> {
    let s: MetoceanState = parse_body(&body)?;
    let opts = options(&state, &q);
    let bundle = state.bundle.clone();
    Ok(Json(run_blocking(move || predict_responses(&bundle, &s, &opts)).await?))
}

async fn whatif(
    State(state): State<AppState>,
    Query(q): Query<PredictQuery>,
    body: axum::body::Bytes,
) -> Result<Json<Vec<PredictionReport>>, ApiError> {
    let states: Vec<MetoceanState> = parse_body(&body)?;
    let opts = options(&state, &q);
    let bundle = state.bundle.clone();
    let reports = run_blocking(move || {
        states
            .iter()
            .map(|s| predict_responses(&bundle, s, &opts))
            .collect::<Result<Vec<_>, _>>()
    })
    .await?;
    Ok(Json(reports))
}

async fn forecast(State(state): State<AppState>) -> Json<ForecastSnapshot> {
    Json((*state.forecast_snapshot()).clone())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainInfo {
    pub bounds: Vec<FeatureBound>,
    pub margin: f64,
}

async fn domain(State(state): State<AppState>) -> Json<DomainInfo> {
    Json(DomainInfo {
        bounds: state.bundle.bounds.clone(),
        margin: state.options.margin,
    })
}

async fn limits(State(state): State<AppState>) -> Json<Limits> {
    Json(state.bundle.limits)
}

async fn health(State(state): State<AppState>) -> Json<Value> {
    Json(json!({
        "status": "ok",
        "bundle_version": state.bundle.version(),
        "uptime_s": state.started.elapsed().as_secs_f64(),
    }))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/predict", post(predict))
        .route("/whatif", post(whatif))
        .route("/forecast", get(forecast))
        .route("/domain", get(domain))
        .route("/limits", get(limits))
        .route("/health", get(health))
        .with_state(state)
}

/// Predict every forecast step; out-of-domain steps carry their
/// violations and no numbers.
pub fn forecast_snapshot(bundle: &ModelBundle, window: &[ForecastState], opts: &PredictOptions, now: DateTime<Utc>) -> ForecastSnapshot {
    let entries = window
        .iter()
        .map(|f| match predict_responses(bundle, &f.state, opts) {
            Ok(r) => ForecastEntry {
                valid_time: f.valid_time,
                report: Some(r),
                error: None,
            },
            Err(e) => ForecastEntry {
                valid_time: f.valid_time,
                report: None,
                error: Some(ErrorBody::from(&e)),
            },
        })
        .collect();
    ForecastSnapshot {
        ingested_at: Some(now),
        entries,
    }
}

/// Source of forecast CSV text.
pub trait ForecastSource: Send + Sync {
    fn fetch(&self) -> Result<String, ServeError>;
}

pub struct FileForecastSource {
    pub path: std::path::PathBuf,
}

impl ForecastSource for FileForecastSource {
    fn fetch(&self) -> Result<String, ServeError> {
        Ok(std::fs::read_to_string(&self.path)?)
    }
}

/// Ingest once now and then every `cadence`. A failed ingest keeps the
/// previous snapshot.
pub fn spawn_forecast_poller(state: AppState, source: Arc<dyn ForecastSource>, cadence: Duration) -> tokio::task::JoinHandle<()> {
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(cadence);
        loop {
            tick.tick().await;
            let st = state.clone();
            let src = source.clone();
            let result = tokio::task::spawn_blocking(move || -> Result<ForecastSnapshot, ServeError> {
                let window = ingest_forecast(&src.fetch()?)?;
                Ok(forecast_snapshot(&st.bundle, &window, &st.options, Utc::now()))
            })
            .await;
            match result {
                Ok(Ok(snap)) => {
                    tracing::info!(steps = snap.entries.len(), "forecast window ingested");
                    state.publish_forecast(snap);
                }
                Ok(Err(e)) => tracing::warn!(error = %e, "forecast ingest failed"),
                Err(e) => tracing::error!(error = %e, "forecast worker panicked"),
            }
        }
    })
}
