use std::path::PathBuf;

use ppsf::PpsfError;

/// Process exit statuses.
pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_NUMERICAL: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("{0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io { .. } => EXIT_IO,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<PpsfError> for CliError {
    fn from(e: PpsfError) -> Self {
        match e {
            PpsfError::Dimension { .. }
            | PpsfError::UnsupportedDimension(_)
            | PpsfError::Geometry(_)
            | PpsfError::DegenerateGeometry { .. }
            | PpsfError::Argument(_)
            | PpsfError::Budget(_) => CliError::Validation(vec![e.to_string()]),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
