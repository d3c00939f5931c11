//! CLI error classes with a stable exit-code contract: configuration
//! problems exit 1, dataset problems exit 2, filesystem problems exit 3.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad configuration: unparseable config file, unknown keys, violated
    /// invariants, unusable flags.
    Config(String),
    /// Bad dataset: missing file, unparseable rows, gaps the policy
    /// rejects, too few slots.
    Data(String),
    /// Filesystem trouble: unwritable output directory, refusing to
    /// overwrite existing files without --force.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
            CliError::Io(msg) => write!(f, "I/O error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<vsf_core::Error> for CliError {
    fn from(err: vsf_core::Error) -> CliError {
        match err {
            vsf_core::Error::Config(_) => CliError::Config(err.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}
