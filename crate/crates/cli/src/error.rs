use reachkit::ReachError;
use serde::Serialize;

/// Machine-readable failure, printed to stderr as one JSON object.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub code: String,
    pub field: Option<String>,
    pub detail: String,
    #[serde(skip)]
    pub capability: bool,
}

impl CliError {
    pub fn validation(field: &str, detail: impl Into<String>) -> Self {
        Self {
            code: "validation".into(),
            field: Some(field.into()),
            detail: detail.into(),
            capability: false,
        }
    }

    pub fn io(what: &str, e: std::io::Error) -> Self {
        Self {
            code: "io".into(),
            field: None,
            detail: format!("{what}: {e}"),
            capability: false,
        }
    }

    pub fn usage(field: Option<String>, detail: impl Into<String>) -> Self {
        Self {
            code: "usage".into(),
            field,
            detail: detail.into(),
            capability: false,
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.capability {
            2
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error serializes")
    }
}

impl From<ReachError> for CliError {
    fn from(e: ReachError) -> Self {
        Self {
            code: e.code().into(),
            field: e.field().map(str::to_string),
            detail: e.to_string(),
            capability: e.is_capability(),
        }
    }
}
