use crate::expr::ParseError;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] abelkit_core::Error),
    #[error("expression `{source_text}`: {error}")]
    Parse { source_text: String, error: ParseError },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{context}: {error}")]
    Io { context: String, error: std::io::Error },
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(context: impl Into<String>, error: std::io::Error) -> Self {
        CliError::Io { context: context.into(), error }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Parse { .. } => "parse_error",
            CliError::Config(_) => "invalid_config",
            CliError::Io { .. } => "io_error",
            CliError::Verification(_) => "verification_failed",
        }
    }

    /// `{"error": {"kind": ..., "message": ..., "offset": ...}}`.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            message: String,
            #[serde(skip_serializing_if = "Option::is_none")]
            offset: Option<usize>,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        let offset = match self {
            CliError::Parse { error, .. } => Some(error.offset),
            _ => None,
        };
        let w = Wrapper { error: Body { kind: self.kind(), message: self.to_string(), offset } };
        serde_json::to_string(&w).unwrap_or_else(|_| format!("{{\"error\":{{\"kind\":\"{}\"}}}}", self.kind()))
    }
}
