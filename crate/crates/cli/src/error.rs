use std::fmt;

use ou_design::Error;
use serde_json::json;

/// Failure with a stable exit code: 2 validation, 3 verification, 4 non-existence.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self { code: 2, kind: "validation", message: message.into() }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        Self { code: 3, kind: "verification", message: message.into() }
    }

    pub fn nonexistence(message: impl Into<String>) -> Self {
        Self { code: 4, kind: "nonexistence", message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { code: 1, kind: "io", message: message.into() }
    }

    /// Single-line JSON for stderr.
    pub fn to_json_line(&self) -> String {
        json!({ "error": self.kind, "exit_code": self.code, "message": self.message }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::FrequencyZero => CliError::validation(
                "omega = 0: the trend information increases with every spacing, so no finite \
                 optimal spacing exists",
            ),
            Error::NonConvergence { .. } => CliError { code: 1, kind: "numerical", message: e.to_string() },
            other => CliError::validation(other.to_string()),
        }
    }
}
