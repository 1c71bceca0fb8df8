//! File formats and the `perdel` command line on top of `perdel-core`.

pub mod cli;
pub mod json;
pub mod svg;

pub use perdel_core as core;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A computation rejected its input.
    #[error(transparent)]
    Domain(#[from] perdel_core::Error),
    /// The input could not be read or parsed.
    #[error("{0}")]
    Input(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Input(_) | CliError::Io(_) => 2,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Domain(e) => e.code(),
            CliError::Input(_) => "MalformedInput",
            CliError::Io(_) => "Io",
        }
    }

    /// `{ "error": code, "detail": message }`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "error": self.code(), "detail": self.to_string() })
    }
}
