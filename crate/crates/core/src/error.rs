use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// Each variant maps onto a CLI exit status through [`Error::exit_code`]:
/// configuration problems exit with 2, numerical failures with 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("susceptibility is singular at delta_a={delta_a}, delta={delta}, omega_c={omega_c}, gamma={gamma}, gamma_gs={gamma_gs}")]
    Singular {
        delta_a: f64,
        delta: f64,
        omega_c: f64,
        gamma: f64,
        gamma_gs: f64,
    },

    #[error("at probe detuning {delta} rad/s: {source}")]
    AtDetuning {
        delta: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("disorder sample {index}: {source}")]
    AtSample {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("integration failed at t={t:e} s (step {step:e} s): {reason}")]
    Integration { t: f64, step: f64, reason: String },

    #[error("master-equation health check failed: {0}")]
    Health(String),

    #[error("linewidth undefined: {0}")]
    UndefinedLinewidth(String),

    #[error("no transparency: T_eit(0)={t_eit} does not exceed T_2level(0)={t_two_level}")]
    NoTransparency { t_eit: f64, t_two_level: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Wraps a point-level failure with the probe detuning it happened at.
    pub(crate) fn at_detuning(self, delta: f64) -> Self {
        Error::AtDetuning {
            delta,
            source: Box::new(self),
        }
    }

    /// The innermost error, with detuning/sample tags stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtDetuning { source, .. } | Error::AtSample { source, .. } => source.root(),
            other => other,
        }
    }

    /// Module that produced the error, for machine-readable reports.
    pub fn module(&self) -> &'static str {
        match self.root() {
            Error::Singular { .. } => "susceptibility",
            Error::Integration { .. } | Error::Health(_) | Error::Unsupported(_) => "lindblad",
            Error::UndefinedLinewidth(_) | Error::NoTransparency { .. } => "metrics",
            Error::Parse { .. } | Error::Config(_) | Error::Io(_) | Error::Json(_) => "cli-io",
            Error::InvalidInput(_) => "model-core",
            Error::AtDetuning { .. } | Error::AtSample { .. } => unreachable!(),
        }
    }

    /// Short kind tag used in the stderr error record.
    pub fn kind(&self) -> &'static str {
        match self.root() {
            Error::InvalidInput(_) => "invalid-input",
            Error::Singular { .. } => "singularity",
            Error::Unsupported(_) => "unsupported-configuration",
            Error::Integration { .. } => "integration-failure",
            Error::Health(_) => "health-check",
            Error::UndefinedLinewidth(_) => "undefined-linewidth",
            Error::NoTransparency { .. } => "no-transparency",
            Error::Parse { .. } => "parse",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::AtDetuning { .. } | Error::AtSample { .. } => unreachable!(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Parse { .. } | Error::Config(_) | Error::InvalidInput(_) => 2,
            Error::Io(_) | Error::Json(_) => 1,
            _ => 3,
        }
    }
}
