use std::fmt;

use crate::io::FormatError;

/// A failed command. The variant fixes the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Flags that cannot work together or a refused precondition.
    Usage(String),
    /// Unreadable, malformed or inconsistent input data.
    Data(String),
    /// A request larger than a configured cap.
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Resource(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (CliError::Usage(m) | CliError::Data(m) | CliError::Resource(m)) = self;
        // Diagnostics stay on one line.
        f.write_str(&m.replace('\n', " "))
    }
}

impl std::error::Error for CliError {}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<reweigh_core::Error> for CliError {
    fn from(e: reweigh_core::Error) -> Self {
        use reweigh_core::Error as E;
        match e {
            E::ResourceLimit { .. } => CliError::Resource(e.to_string()),
            E::Precondition(_) | E::NotFound(_) | E::Parse(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
