use std::fmt;
use std::io;
use std::path::PathBuf;

use lzs_core::ErrorCategory;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, key: Option<String>, message: String },
    #[error("{key}: {message}")]
    Validation { key: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {message}")]
    Table { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] lzs_core::Error),
}

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Io = 1,
    Config = 2,
    Solver = 3,
    Fit = 4,
}

impl ExitKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExitKind::Io => "io",
            ExitKind::Config => "config",
            ExitKind::Solver => "solver",
            ExitKind::Fit => "fit",
        }
    }
}

impl CliError {
    pub fn validation(key: &str, message: impl Into<String>) -> Self {
        CliError::Validation { key: key.to_owned(), message: message.into() }
    }

    pub fn kind(&self) -> ExitKind {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } => ExitKind::Config,
            CliError::Io { .. } | CliError::Table { .. } => ExitKind::Io,
            CliError::Core(e) => match e.category() {
                ErrorCategory::Config => ExitKind::Config,
                ErrorCategory::Solver => ExitKind::Solver,
                ErrorCategory::Fit => ExitKind::Fit,
            },
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.kind() as u8
    }

    fn key(&self) -> Option<&str> {
        match self {
            CliError::Parse { key, .. } => key.as_deref(),
            CliError::Validation { key, .. } => Some(key),
            _ => None,
        }
    }

    /// One-line `key=value` rendering for stderr.
    pub fn machine_line(&self) -> MachineLine<'_> {
        MachineLine(self)
    }
}

pub struct MachineLine<'a>(&'a CliError);

impl fmt::Display for MachineLine<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.0;
        let kind = e.kind();
        write!(f, "error kind={} code={}", kind.as_str(), kind as u8)?;
        if let Some(key) = e.key() {
            write!(f, " key={key}")?;
        }
        let message = e.to_string().replace('\\', "\\\\").replace('"', "\\\"").replace('\n', " ");
        write!(f, " message=\"{message}\"")
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
