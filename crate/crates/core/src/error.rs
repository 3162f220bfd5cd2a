use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Axis lists or shapes do not fit the requested contraction.
    #[error("cannot contract shape {a:?} with shape {b:?}: {reason}")]
    ContractShape {
        a: Vec<usize>,
        b: Vec<usize>,
        reason: String,
    },

    #[error("matrix is numerically rank deficient at column {column}")]
    RankDeficient { column: usize },

    #[error("cannot move the orthogonality center {direction} from site {center} of {n}")]
    Boundary {
        center: usize,
        n: usize,
        direction: &'static str,
    },

    #[error("dense size guard: {d}^{n} amplitudes exceed the limit of 2^{max_bits}")]
    SizeGuard { n: usize, d: usize, max_bits: u32 },

    /// A site tensor that should be an isometry is not.
    #[error("gauge violated at site {site}: isometry defect {defect:e}")]
    Gauge { site: usize, defect: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("non-finite value in tensor data")]
    NonFinite,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
