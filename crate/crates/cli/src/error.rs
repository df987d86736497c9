use std::fmt;

use codemix::baseline::{BaselineError, ExperimentError};
use codemix::corpus::CorpusError;
use codemix::lid::LidError;
use codemix::metrics::MetricsError;

/// Failure classes, each with its own process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Config,
    Data,
    Internal,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Config => 1,
            Kind::Data => 2,
            Kind::Internal => 3,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Kind::Config => "config",
            Kind::Data => "data",
            Kind::Internal => "internal",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub msg: String,
}

impl CliError {
    pub fn config(msg: impl fmt::Display) -> Self {
        Self { kind: Kind::Config, msg: msg.to_string() }
    }

    pub fn data(msg: impl fmt::Display) -> Self {
        Self { kind: Kind::Data, msg: msg.to_string() }
    }

    pub fn internal(msg: impl fmt::Display) -> Self {
        Self { kind: Kind::Internal, msg: msg.to_string() }
    }

    pub fn context(mut self, ctx: impl fmt::Display) -> Self {
        self.msg = format!("{ctx}: {}", self.msg);
        self
    }

    /// Single-line diagnostic: `codemix: error kind=<kind> code=<n>: <message>`.
    pub fn diagnostic(&self) -> String {
        let msg = self.msg.replace(['\n', '\r'], " ");
        format!("codemix: error kind={} code={}: {msg}", self.kind.as_str(), self.kind.exit_code())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::data(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::data(e)
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::InvalidFraction(_) => CliError::config(e),
            _ => CliError::data(e),
        }
    }
}

impl From<LidError> for CliError {
    fn from(e: LidError) -> Self {
        match e {
            LidError::InvalidSmoothing(_) => CliError::config(e),
            _ => CliError::data(e),
        }
    }
}

impl From<BaselineError> for CliError {
    fn from(e: BaselineError) -> Self {
        match e {
            BaselineError::InvalidHyper(_) => CliError::config(e),
            BaselineError::NonFiniteLoss { .. } => CliError::internal(e),
            _ => CliError::data(e),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::data(e)
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Corpus(e) => e.into(),
            ExperimentError::Baseline(e) => e.into(),
            ExperimentError::Metrics(e) => e.into(),
            ExperimentError::Augment(e) => CliError::data(e),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
