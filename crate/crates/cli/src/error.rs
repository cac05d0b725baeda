use serde::Serialize;
use thiserror::Error;

/// Failure of a CLI run; the variant fixes the exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

#[derive(Serialize)]
struct Payload<'a> {
    kind: &'static str,
    message: &'a str,
}

#[derive(Serialize)]
struct Envelope<'a> {
    error: Payload<'a>,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Runtime(_) => "runtime",
        }
    }

    /// `{"error": {"kind": ..., "message": ...}}`
    pub fn to_json(&self) -> String {
        let message = self.to_string();
        serde_json::to_string(&Envelope {
            error: Payload {
                kind: self.kind(),
                message: &message,
            },
        })
        .expect("error envelope serializes")
    }
}

impl From<pointer_core::Error> for CliError {
    fn from(e: pointer_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
