use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected dim={expected}, got dim={got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("empty {0}")]
    EmptyInput(&'static str),

    #[error("non-finite coordinate {value} at position {index}")]
    NonFiniteCoordinate { index: usize, value: f64 },

    #[error("invalid grid step {0}")]
    InvalidGridStep(f64),

    #[error("dense node enumeration supports dimension <= 3, got {0}")]
    DenseNodesDimension(usize),

    #[error("dense node enumeration would visit {0} nodes; refusing")]
    DenseNodesTooMany(u128),

    #[error("rank K={k} exceeds table length {len}")]
    RankOutOfRange { k: usize, len: usize },

    #[error("no centers above threshold")]
    NoCenters,

    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("vertical line not representable as a slope/intercept pair")]
    VerticalLine,

    #[error("eigen iteration did not converge after {iters} iterations (residual {residual:e})")]
    NonConvergence { iters: usize, residual: f64 },

    #[error("nothing above any threshold")]
    EmptyTable,

    #[error("unknown synthetic kind {0:?}")]
    UnknownKind(String),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParam {
        name: &'static str,
        reason: String,
    },

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}, column {col}: invalid number {text:?}")]
    BadNumber {
        line: usize,
        col: usize,
        text: String,
    },

    #[error("no data rows")]
    NoDataRows,

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Tag an error with the pipeline stage it came from.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True for malformed-input errors (as opposed to numeric/stage failures).
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::RaggedRow { .. } | Error::BadNumber { .. } | Error::NoDataRows => true,
            Error::Stage { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
