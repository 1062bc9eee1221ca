use masersim_core::io::IoError;
use masersim_core::models::ModelError;
use masersim_core::ode::OdeError;
use masersim_core::sweep::SweepError;
use serde::Serialize;
use thiserror::Error;

/// Failure categories with fixed exit codes: 2 for bad input, 3 for numeric
/// failures, 4 for the filesystem.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("unknown preset `{0}` (expected one of fig1..fig8)")]
    UnknownPreset(String),
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Integration(String),
    #[error("{0}")]
    Analysis(String),
    #[error("{0}")]
    Io(String),
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "ConfigParseError",
            CliError::UnknownPreset(_) => "UnknownPreset",
            CliError::Schema(_) => "SchemaError",
            CliError::Integration(_) => "IntegrationError",
            CliError::Analysis(_) => "AnalysisError",
            CliError::Io(_) => "IoError",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::UnknownPreset(_) | CliError::Schema(_) => 2,
            CliError::Integration(_) | CliError::Analysis(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ErrorReport {
            error: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        })
        .expect("error report serializes")
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Schema(_) | IoError::Csv(_) => CliError::Schema(e.to_string()),
            IoError::Json(_) => CliError::Config(e.to_string()),
            IoError::Io { .. } => CliError::Io(e.to_string()),
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::UnknownPreset(name) => CliError::UnknownPreset(name),
            SweepError::Ode(OdeError::InvalidConfig(_)) => CliError::Config(e.to_string()),
            SweepError::Ode(_) => CliError::Integration(e.to_string()),
            SweepError::ThreadPool(_) => CliError::Io(e.to_string()),
            SweepError::MismatchedGrids(_) => CliError::Analysis(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Config(e.to_string())
    }
}
