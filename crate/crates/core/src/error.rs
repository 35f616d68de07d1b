use thiserror::Error;

/// A single violated invariant, named by field path (e.g. `wave1.hs`).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid metocean state {id}: {}", format_violations(.violations))]
    InvalidState { id: String, violations: Vec<Violation> },

    #[error("line is slack: span {span:.3} m requires non-positive horizontal tension")]
    Slack { span: f64 },

    #[error("anchor uplift: span {span:.3} m exceeds the touchdown limit {limit:.3} m")]
    Uplift { span: f64, limit: f64 },

    #[error("mooring line {index}: {source}")]
    Line {
        index: usize,
        #[source]
        source: Box<CoreError>,
    },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("non-positive stiffness {0:.3e} N/m")]
    NonPositiveStiffness(f64),

    #[error("time integration became non-finite at step {step}")]
    Integration { step: usize },

    #[error("gumbel fit needs at least two distinct values")]
    DegenerateSample,

    #[error("missing QD result for screened state {0}")]
    MissingQd(String),

    #[error("duplicate state id {0}")]
    DuplicateId(String),

    #[error("no direction: zero east/north vector")]
    NoDirection,

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
