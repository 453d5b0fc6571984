use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation left the representable floating-point range.
    #[error("numerical overflow: {0}")]
    Overflow(String),

    /// A requested moment does not exist for the given parameters.
    #[error("moment of order {order} does not exist for {model}")]
    MomentUndefined { order: f64, model: String },

    /// A sample was too degenerate for the requested statistic.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// A root/maximum search could not bracket a solution.
    #[error("bracket failure: {0}")]
    Bracket(String),

    /// Structural validation failed; every violation is listed.
    #[error("validation failed:{}", .0.iter().map(|v| format!("\n  - {v}")).collect::<String>())]
    Validation(Vec<String>),

    /// Image dimensions are inconsistent with the requested operation.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An image contained a non-finite pixel value.
    #[error("non-finite pixel at ({x}, {y})")]
    NonFinitePixel { x: usize, y: usize },

    /// Not enough data points for the requested aggregation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A file did not conform to its documented format.
    #[error("format error in {path}: {message}")]
    Format { path: PathBuf, message: String },

    /// A Monte Carlo task failed; the coordinate locates it.
    #[error("experiment failed at situation {situation}, replication {replication}{}: {source}",
            .filter.as_deref().map(|f| format!(", filter {f}")).unwrap_or_default())]
    Experiment {
        situation: u8,
        replication: u32,
        filter: Option<String>,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Validation failures map to a distinct process exit code in the CLI.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation(_) | Error::Format { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
