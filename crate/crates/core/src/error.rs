use thiserror::Error;

/// Errors raised by every layer of the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("{what} needs {requested} qubits but the cap is {cap}")]
    Capability {
        what: String,
        requested: usize,
        cap: usize,
    },
    #[error("partition: {0}")]
    Partition(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("topology: {0}")]
    Topology(String),
    #[error("post-selection impossible (probability {0:e})")]
    PostSelection(f64),
    #[error("phase synthesis did not converge (residual {residual:e})")]
    Synthesis { residual: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Capability,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Capability { .. } => ErrorClass::Capability,
            Error::PostSelection(_) | Error::Synthesis { .. } | Error::Numerical(_) => {
                ErrorClass::Numerical
            }
            _ => ErrorClass::Config,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
