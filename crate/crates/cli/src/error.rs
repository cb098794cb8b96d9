use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] shuttlecf::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
        }
    }

    /// Single-line JSON for the diagnostic stream.
    pub fn to_line(&self) -> String {
        let mut obj = serde_json::Map::new();
        obj.insert("error".into(), self.kind().into());
        let path = match self {
            CliError::Io { path, .. } => Some(path.as_path()),
            CliError::Core(shuttlecf::Error::Io { path, .. }) => Some(path.as_path()),
            _ => None,
        };
        if let Some(p) = path {
            obj.insert("path".into(), p.display().to_string().into());
        }
        obj.insert("message".into(), self.to_string().into());
        serde_json::Value::Object(obj).to_string()
    }
}
