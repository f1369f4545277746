use std::fmt;
use std::process::ExitCode;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Io(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Numerical(_) => ExitCode::from(3),
            CliError::Io(_) => ExitCode::from(4),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<kicktop::Error> for CliError {
    fn from(e: kicktop::Error) -> Self {
        use kicktop::Error::*;
        match e {
            InvalidParameter { .. }
            | StepDoesNotDivide { .. }
            | SizeTooLarge { .. }
            | DimensionMismatch { .. }
            | Unnormalized { .. } => CliError::Usage(e.to_string()),
            DegenerateSeparation { .. }
            | DegenerateBoxCount { .. }
            | InsufficientData(_)
            | NonFinite(_)
            | InvariantViolated(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
