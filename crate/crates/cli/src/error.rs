use std::path::{Path, PathBuf};

use serde_json::json;

/// Failure of a run, mapped to the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Numerics(#[from] atomfwm::Error),
    #[error("tolerance checks failed: {}", .0.join(", "))]
    Tolerance(Vec<String>),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            // a mode mismatch is a numerical outcome, the rest are fixable
            // by choosing a different grid or parameters
            CliError::Numerics(atomfwm::Error::ModeMismatch { .. }) => 3,
            CliError::Numerics(_) => 2,
            CliError::Tolerance(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Config(_) => "config",
            CliError::Numerics(_) => "numerics",
            CliError::Tolerance(_) => "tolerance",
        }
    }

    /// Machine-readable error record.
    pub fn record(&self) -> serde_json::Value {
        let mut rec = json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        match self {
            CliError::Tolerance(failed) => rec["failed_checks"] = json!(failed),
            CliError::Numerics(e) => rec["detail"] = json!(format!("{e:?}")),
            _ => {}
        }
        rec
    }
}
