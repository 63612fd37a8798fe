use thiserror::Error;

/// Failures of the std layer: input problems or a numerical stage failing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: ({i}{j}|{k}{l}) = {value} conflicts with an equivalent record = {previous}")]
    SymmetryViolation { line: usize, i: usize, j: usize, k: usize, l: usize, value: f64, previous: f64 },
    #[error("configuration: {0}")]
    Config(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: qchem_core::Error,
    },
    #[error(transparent)]
    Core(#[from] qchem_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit code: 2 for unusable input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Stage { .. } | Error::Core(_) => 3,
            _ => 2,
        }
    }
}

/// Tag a core failure with the pipeline stage it came from.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for std::result::Result<T, qchem_core::Error> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|source| Error::Stage { stage, source })
    }
}
