use std::fmt;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Exit status of the tool. Warnings never change it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorKind {
    /// Unreadable input or unwritable output.
    Io,
    /// The data parsed but the fit or calibration failed.
    Fit,
    /// Malformed input or invalid arguments.
    Parse,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Io => 1,
            ErrorKind::Fit => 2,
            ErrorKind::Parse => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Parse, message)
    }

    pub fn io(path: &Path, err: io::Error) -> Self {
        Self::new(ErrorKind::Io, format!("{}: {err}", path.display()))
    }

    /// Library errors: bad arguments are validation failures, everything else a fit failure.
    pub fn from_fit(err: fanofit::Error) -> Self {
        let kind = match err.root() {
            fanofit::Error::InvalidInput(_) | fanofit::Error::ModeMismatch { .. } => ErrorKind::Parse,
            _ => ErrorKind::Fit,
        };
        Self::new(kind, err.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }

    pub fn record(&self, input_path: Option<&str>) -> ErrorRecord {
        ErrorRecord {
            input_path: input_path.map(str::to_owned),
            code: self.kind,
            exit_code: self.exit_code(),
            message: self.message.clone(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Machine-readable failure, written to stderr or embedded in batch output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub input_path: Option<String>,
    pub code: ErrorKind,
    pub exit_code: i32,
    pub message: String,
}

pub type CliResult<T> = Result<T, CliError>;
