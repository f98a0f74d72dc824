use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    #[error("row-count mismatch: {labels} labels but {rows} matrix rows")]
    RowCountMismatch { labels: usize, rows: usize },

    #[error("column-count mismatch: {genes} genes but {cols} matrix columns")]
    ColumnCountMismatch { genes: usize, cols: usize },

    #[error("invalid expression value {value} at cell {row}, gene {col}")]
    InvalidValue { row: usize, col: usize, value: f64 },

    #[error("duplicate gene symbol: {0}")]
    DuplicateGene(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("dataset has no control cells")]
    NoControlCells,

    #[error("dataset has no intervened genes")]
    NoInterventions,

    #[error("empty sample")]
    EmptySample,

    #[error("sample too small: need at least {min}, got {got}")]
    SampleTooSmall { min: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("node index {index} out of range for graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("node-count mismatch: {0} vs {1}")]
    NodeCountMismatch(usize, usize),

    #[error("graph contains a cycle")]
    Cyclic,

    #[error("inconsistent metric sets: {0}")]
    InconsistentMetrics(String),

    #[error("partition block {block} failed: {source}")]
    Block {
        block: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile(path)
        } else {
            Error::Io { path, source }
        }
    }

    /// True for errors caused by caller-supplied parameters rather than by
    /// the content of input data.
    pub fn is_usage_error(&self) -> bool {
        match self {
            Error::InvalidArgument(_) | Error::InconsistentMetrics(_) => true,
            Error::Block { source, .. } => source.is_usage_error(),
            _ => false,
        }
    }
}
