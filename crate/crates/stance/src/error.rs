use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{message} at line {line} of {}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("bundle {}: {message}", path.display())]
    Bundle { path: PathBuf, message: String },
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Core(#[from] stance_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{failed} of {total} experiment cells failed")]
    CellsFailed { failed: usize, total: usize },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit status: 1 usage, 2 data, 3 failed experiment cells.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::CellsFailed { .. } => 3,
            _ => 2,
        }
    }
}
