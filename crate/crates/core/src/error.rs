use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("unstable dynamics: {0}")]
    Instability(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Fock truncation {dim} too small: top-level population {tail:.3e}")]
    Dimension { dim: usize, tail: f64 },

    #[error("herald with n = {n} is impossible (probability {probability:.3e})")]
    HeraldImpossible { n: u32, probability: f64 },

    #[error("numerical convergence: {0}")]
    Convergence(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wrap an error with the protocol stage it came from.
    pub fn at(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }

    /// Innermost error with stage attributions stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Config(_) | Error::Json(_) | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.into())
    }
}
