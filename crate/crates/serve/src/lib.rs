//! Serving layer: bundle persistence, ingestion, the domain guard,
//! end-to-end prediction, training orchestration and the HTTP API.

pub mod api;
pub mod bundle;
pub mod domain;
pub mod error;
pub mod ingest;
pub mod predict;
pub mod train;

pub use bundle::{decode_bundle, encode_bundle, load_bundle, save_bundle, Limits, ModelBundle};
pub use domain::{domain_check, DomainReport, DomainViolation};
pub use error::{Result, ServeError};
pub use predict::{predict_responses, PredictOptions, PredictionReport};
pub use train::{train_bundle, TrainOptions, TrainReport};
