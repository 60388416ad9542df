use std::fmt;
use std::path::Path;

use ssmap::climate::ClimateError;
use ssmap::collector::CollectorError;
use ssmap::indicators::IndicatorError;
use ssmap::mapping::MappingError;
use ssmap::sweep::SweepError;

/// Failure category. Each has a stable name and process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    Usage,
    Config,
    Io,
    Climate,
    Model,
    Mapping,
    UnknownField,
    Input,
}

impl ErrorCode {
    pub fn name(self) -> &'static str {
        match self {
            ErrorCode::Usage => "usage",
            ErrorCode::Config => "config",
            ErrorCode::Io => "io",
            ErrorCode::Climate => "climate",
            ErrorCode::Model => "model",
            ErrorCode::Mapping => "mapping",
            ErrorCode::UnknownField => "unknown-field",
            ErrorCode::Input => "input",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCode::Usage => 2,
            ErrorCode::Config => 3,
            ErrorCode::Io => 4,
            ErrorCode::Climate => 5,
            ErrorCode::Model => 6,
            ErrorCode::Mapping => 7,
            ErrorCode::UnknownField => 8,
            ErrorCode::Input => 9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: ErrorCode,
    pub message: String,
}

impl CliError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::new(ErrorCode::Io, format!("{}: {err}", path.display()))
    }

    /// `error[<code>]: <message>` on one line.
    pub fn line(&self) -> String {
        let flat: Vec<&str> = self.message.split_whitespace().collect();
        format!("error[{}]: {}", self.code.name(), flat.join(" "))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.line())
    }
}

impl std::error::Error for CliError {}

impl From<ClimateError> for CliError {
    fn from(e: ClimateError) -> Self {
        match e {
            ClimateError::Io { .. } => Self::new(ErrorCode::Io, e.to_string()),
            _ => Self::new(ErrorCode::Climate, e.to_string()),
        }
    }
}

impl From<CollectorError> for CliError {
    fn from(e: CollectorError) -> Self {
        Self::new(ErrorCode::Model, e.to_string())
    }
}

impl From<IndicatorError> for CliError {
    fn from(e: IndicatorError) -> Self {
        Self::new(ErrorCode::Model, e.to_string())
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        Self::new(ErrorCode::Model, e.to_string())
    }
}

impl From<MappingError> for CliError {
    fn from(e: MappingError) -> Self {
        match e {
            MappingError::UnknownField(_) => Self::new(ErrorCode::UnknownField, e.to_string()),
            _ => Self::new(ErrorCode::Mapping, e.to_string()),
        }
    }
}
