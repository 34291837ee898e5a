use thiserror::Error;

/// Errors produced anywhere in the synthesis and verification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    Asymmetric(f64),

    #[error("diagonal index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("spectral factorization failed: {0}")]
    FactorizationFailed(String),

    #[error("state roundtrip residual {residual:e} exceeds tolerance {tol:e}")]
    ReconstructionMismatch { residual: f64, tol: f64 },

    #[error("Fourier magnitude mismatch at frequency {freq}: {prev:e} vs {next:e}")]
    MagnitudeMismatch { freq: usize, prev: f64, next: f64 },

    #[error("query {t}: {source}")]
    AtQuery {
        t: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("boundary not bracketed: N={lo}..{hi} are both {side}")]
    BoundaryNotBracketed {
        lo: usize,
        hi: usize,
        side: &'static str,
    },

    #[error("solver indeterminate for k={k}, N={n}: {reason}")]
    Indeterminate { k: usize, n: usize, reason: String },

    #[error("list is not sorted ascending")]
    Unsorted,

    #[error("target lies beyond the last list element")]
    PromiseViolated,

    #[error("base algorithm is not exact (max off-diagonal {max_offdiag:e}, min diagonal {min_diag})")]
    InexactBase { max_offdiag: f64, min_diag: f64 },

    #[error("measurement inconclusive: best outcome probability {0}")]
    AmbiguousMeasurement(f64),

    #[error("malformed artifact: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at_query(t: usize, source: Error) -> Self {
        Error::AtQuery {
            t,
            source: Box::new(source),
        }
    }
}
