use std::path::PathBuf;

/// Errors raised by the solvers and the benchmark harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A time step produced NaN or infinity.
    #[error("{scheme}: non-finite value at {location} (t = {time})")]
    NonFinite {
        scheme: &'static str,
        location: String,
        time: f64,
    },

    /// The DG time step exceeds the stability bound.
    #[error("time step {dt} exceeds the CFL bound {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Output { path: PathBuf, message: String },
}

impl Error {
    /// Whether this error is a solver abort (as opposed to a usage or I/O error).
    pub fn is_abort(&self) -> bool {
        matches!(self, Error::NonFinite { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
