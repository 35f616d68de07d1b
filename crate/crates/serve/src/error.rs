use moorcast_core::CoreError;
use moorcast_ml::MlError;
use thiserror::Error;

use crate::domain::DomainViolation;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("corrupt bundle: {0}")]
    Corrupt(String),
    #[error("incompatible bundle: {0}")]
    Incompatible(String),
    #[error("state outside the training domain ({} violation(s))", violations.len())]
    Domain { violations: Vec<DomainViolation> },
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("observation is {age_s:.0} s old, limit {max_age_s:.0} s")]
    Stale { age_s: f64, max_age_s: f64 },
    #[error("forecast: {0}")]
    Forecast(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Ml(#[from] MlError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl ServeError {
    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        ServeError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Stable machine-readable error code for API responses.
    pub fn code(&self) -> &'static str {
        match self {
            ServeError::Corrupt(_) => "corrupt_bundle",
            ServeError::Incompatible(_) => "incompatible_bundle",
            ServeError::Domain { .. } => "out_of_domain",
            ServeError::Schema { .. } => "schema_violation",
            ServeError::Stale { .. } => "stale_observation",
            ServeError::Forecast(_) => "invalid_forecast",
            ServeError::Core(CoreError::InvalidState { .. }) => "invalid_state",
            ServeError::Core(_) => "physics_error",
            ServeError::Ml(_) => "model_error",
            ServeError::Io(_) => "io_error",
            ServeError::Json(_) => "invalid_json",
        }
    }
}

pub type Result<T, E = ServeError> = std::result::Result<T, E>;
