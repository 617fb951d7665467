use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum HlabError {
    #[error(transparent)]
    Core(#[from] hlab_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, HlabError>;

impl HlabError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HlabError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for bad input or parameters, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HlabError::Core(e) if !e.is_parameter_error() => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            HlabError::Core(hlab_core::Error::Domain(_)) => "domain",
            HlabError::Core(hlab_core::Error::Regime(_)) => "regime",
            HlabError::Core(hlab_core::Error::NotRegular { .. }) => "not_regular",
            HlabError::Core(hlab_core::Error::Fit(_)) => "fit",
            HlabError::Core(hlab_core::Error::Overflow(_)) => "overflow",
            HlabError::Core(hlab_core::Error::Numerical(_)) => "numerical",
            HlabError::Core(hlab_core::Error::Precision(_)) => "precision",
            HlabError::Io { .. } => "io",
            HlabError::Parse { .. } => "parse",
            HlabError::Json(_) => "json",
            HlabError::Usage(_) => "usage",
        }
    }

    /// Structured form written to stderr by the binary.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Diag<'a> {
            error: &'a str,
            message: String,
            exit_code: i32,
        }
        serde_json::to_string(&Diag {
            error: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        })
        .unwrap_or_else(|_| String::from("{\"error\":\"internal\"}"))
    }
}
