//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong when building or evaluating engine objects.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects that must live in the same ambient dimension do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A quantity with a positivity constraint was zero or negative.
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    /// A coordinate, matrix entry, or evaluated value was NaN or infinite.
    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },

    /// A sample specification asked for zero cases.
    #[error("empty sample: {0}")]
    EmptySample(&'static str),

    /// Catch-all for structured parameter problems (sizes, ranges, names).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The grid-accelerated distance path needs a metric that is a monotone
    /// transform of the euclidean distance; this one is not.
    #[error("metric `{0}` is not a monotone transform of the euclidean distance; use the brute-force path")]
    UnsupportedMetric(String),

    /// A `τ` expression failed to parse or evaluate.
    #[error("expression error: {0}")]
    Expr(String),

    /// Malformed point-cloud CSV input.
    #[error("csv error at line {line}: {detail}")]
    Csv { line: usize, detail: String },

    /// A suite or certificate precondition failed before the main run.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Box-counting needs several well-separated scales.
    #[error("degenerate scale list: {0}")]
    DegenerateScales(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
