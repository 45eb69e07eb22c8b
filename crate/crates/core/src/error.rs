use thiserror::Error;

/// Errors raised by geometry construction, assembly, solves and the driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("point {point:?} lies within {distance:.3e} of the boundary")]
    OnBoundary { point: [f64; 2], distance: f64 },

    #[error("coincident points in kernel evaluation")]
    CoincidentPoints,

    #[error("matrix is numerically singular (pivot {pivot:.3e} at row {row})")]
    Singular { row: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Wraps an error with the name of the pipeline stage that produced it.
    pub fn at(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True for errors caused by bad user input rather than numerical failure.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_) | Error::Geometry(_) | Error::Io(_) | Error::Json(_) => true,
            Error::Stage { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
