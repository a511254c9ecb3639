use std::fmt;

/// Errors produced by bound computation, simulation, sweeps and certification.
#[derive(Debug)]
pub enum Error {
    /// A parameter is outside its domain (d ≥ 1, ε > 0, 0 < δ < 1, L̃ > 0, ...).
    InvalidParams(String),
    /// A grid or sample count does not fit in 64-bit arithmetic.
    Overflow(String),
    /// The grid is valid but too large to simulate under the configured cap.
    Capacity { cells: u64, max_cells: u64 },
    /// The discretization is coarser than the target function requires.
    LipschitzMismatch { declared: f64, supplied: f64 },
    /// The target function returned a non-finite value.
    Evaluation { function: String, value: f64 },
    /// No builtin function with this name.
    UnknownFunction(String),
    Io(std::io::Error),
    Csv(csv::Error),
    Json(serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::Overflow(msg) => write!(f, "overflow: {msg}"),
            Error::Capacity { cells, max_cells } => write!(
                f,
                "grid has {cells} cells, above the simulation cap of {max_cells}"
            ),
            Error::LipschitzMismatch { declared, supplied } => write!(
                f,
                "function declares Lipschitz constant {declared} but the bound was requested for {supplied}"
            ),
            Error::Evaluation { function, value } => {
                write!(f, "function `{function}` evaluated to {value}")
            }
            Error::UnknownFunction(name) => write!(f, "unknown function `{name}`"),
            Error::Io(e) => write!(f, "i/o error: {e}"),
            Error::Csv(e) => write!(f, "csv error: {e}"),
            Error::Json(e) => write!(f, "json error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            Error::Csv(e) => Some(e),
            Error::Json(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}
