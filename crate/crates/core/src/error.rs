use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A single rejected row, reported together with its siblings so a bad
/// input file can be fixed in one pass.
#[derive(Debug, Clone, PartialEq)]
pub struct RowViolation {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for RowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("duplicate {what} {key:?}")]
    Duplicate { what: &'static str, key: String },

    #[error("dates out of order for {key}: {previous} then {next}")]
    Ordering {
        key: String,
        previous: chrono::NaiveDate,
        next: chrono::NaiveDate,
    },

    #[error("invalid value: {0}")]
    Value(String),

    #[error("{}: {} invalid row(s): {}", path.display(), violations.len(), join(violations))]
    Validation {
        path: PathBuf,
        violations: Vec<RowViolation>,
    },

    #[error("date {date} is outside the trading calendar ({first}..={last})")]
    OutOfRange {
        date: chrono::NaiveDate,
        first: chrono::NaiveDate,
        last: chrono::NaiveDate,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("log return undefined for daily return {0} (must be > -1)")]
    Domain(f64),

    #[error("sharpe ratio undefined: annualized volatility is zero")]
    UndefinedSharpe,

    #[error("configuration error: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

fn join(violations: &[RowViolation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn csv(path: &std::path::Path, e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line()).unwrap_or(0);
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            kind => Error::parse(path, line, format!("{kind:?}")),
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// Process exit code for this error: 2 configuration, 3 data, 4 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Internal(_) => 4,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}
