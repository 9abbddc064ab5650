use serde_json::{json, Value};

/// Failure of a CLI run, reported as one JSON object on stderr.
#[derive(Debug)]
pub enum CliError {
    MissingKey(String),
    Config(String),
    UnknownScenario(String),
    InvalidParameters(String),
    HypothesisRefused { message: String, details: Value },
    Numerical(String),
    Io(String),
    Report(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::MissingKey(_) => "missing_key",
            Self::Config(_) => "invalid_config",
            Self::UnknownScenario(_) => "unknown_scenario",
            Self::InvalidParameters(_) => "invalid_parameters",
            Self::HypothesisRefused { .. } => "hypothesis_refused",
            Self::Numerical(_) => "numerical_failure",
            Self::Io(_) => "io",
            Self::Report(_) => "report",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::MissingKey(_) | Self::Config(_) | Self::UnknownScenario(_) => 2,
            Self::InvalidParameters(_) => 3,
            Self::HypothesisRefused { .. } => 4,
            Self::Numerical(_) => 5,
            Self::Io(_) => 6,
            Self::Report(_) => 7,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Self::MissingKey(k) => format!("missing config key `{k}`"),
            Self::UnknownScenario(s) => format!("unknown scenario `{s}`"),
            Self::HypothesisRefused { message, .. } => message.clone(),
            Self::Config(m) | Self::InvalidParameters(m) | Self::Numerical(m) | Self::Io(m) | Self::Report(m) => {
                m.clone()
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "artifact": "error",
            "error": self.code(),
            "exit_code": self.exit_code(),
            "message": self.message(),
        });
        match self {
            Self::MissingKey(k) => v["key"] = json!(k),
            Self::UnknownScenario(s) => v["scenario"] = json!(s),
            Self::HypothesisRefused { details, .. } => v["details"] = details.clone(),
            _ => {}
        }
        v
    }
}

impl From<kinspec::Error> for CliError {
    fn from(e: kinspec::Error) -> Self {
        use kinspec::Error as E;
        let message = e.to_string();
        match e {
            E::InvalidGrid(_)
            | E::InvalidParameter(_)
            | E::InvalidTimeGrid(_)
            | E::Unsupported(_)
            | E::Expression(_)
            | E::GridMismatch(_)
            | E::EmptyCorpus => Self::InvalidParameters(message),
            E::Hypothesis(_) | E::Ellipticity(_) => Self::HypothesisRefused {
                message,
                details: Value::Null,
            },
            E::Io(_) => Self::Io(message),
            _ => Self::Numerical(message),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
