use moorcast_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MlError {
    #[error("empty dataset")]
    Empty,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("rank-deficient design: {columns:?} collinear with earlier columns")]
    RankDeficient { columns: Vec<String> },
    #[error("feature mismatch: model expects {expected:?}, got {got:?}")]
    FeatureMismatch { expected: Vec<String>, got: Vec<String> },
    #[error("predicted direction vector has norm {0:e}, below 1e-6")]
    DegenerateAngle(f64),
    #[error("r2 undefined: targets have zero variance")]
    UndefinedR2,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("not enough rows: need {need}, have {have}")]
    TooFewRows { need: usize, have: usize },
    #[error(transparent)]
    Core(#[from] CoreError),
}

pub type Result<T, E = MlError> = std::result::Result<T, E>;
