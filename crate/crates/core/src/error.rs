use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse grouping used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Invalid parameters or inputs.
    Config,
    /// Time integration or steady-state failures.
    Solver,
    /// Least-squares and calibration failures.
    Fit,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("transition frequency is not positive at flux {flux}")]
    NonPositiveFrequency { flux: f64 },

    #[error("lab-frame evolution requires an absolute drive frequency")]
    MissingDriveFrequency,

    #[error("detuning {detuning} exceeds modulation amplitude {amplitude}")]
    DetuningExceedsAmplitude { detuning: f64, amplitude: f64 },

    #[error("argument {value} of {function} is outside the supported range")]
    OutOfValidityRange { function: &'static str, value: f64 },

    #[error("argument {value} of {function} is outside the domain")]
    OutOfDomain { function: &'static str, value: f64 },

    #[error("step size underflow at t = {t:e} s (h = {h:e} s)")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("projected step count {steps} exceeds the limit")]
    ExcessiveStepCount { steps: u64 },

    #[error("Bloch vector norm {norm} exceeds bound at t = {t:e} s")]
    InvariantViolation { t: f64, norm: f64 },

    #[error("steady state not reached: last windows {last} and {previous} differ")]
    NotConverged { last: f64, previous: f64 },

    #[error("sweep cell {index} ({axis} = {value}) failed: {source}")]
    SweepCell {
        index: usize,
        axis: &'static str,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("fit diverged: {0}")]
    FitDiverged(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("no population minimum found in curve at omega = {omega} rad/s")]
    NoMinimumFound { omega: f64 },

    #[error("need curves for at least two distinct modulation frequencies, got {0}")]
    InsufficientCurves(usize),

    #[error("abscissa values are degenerate")]
    DegenerateAbscissa,

    #[error("grid is not mirror-symmetric in detuning: {0}")]
    AsymmetricGrid(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidParameter { .. }
            | Error::NonPositiveFrequency { .. }
            | Error::MissingDriveFrequency
            | Error::DetuningExceedsAmplitude { .. }
            | Error::OutOfValidityRange { .. }
            | Error::OutOfDomain { .. }
            | Error::AsymmetricGrid(_) => ErrorCategory::Config,
            Error::StepSizeUnderflow { .. }
            | Error::ExcessiveStepCount { .. }
            | Error::InvariantViolation { .. }
            | Error::NotConverged { .. } => ErrorCategory::Solver,
            Error::SweepCell { source, .. } => source.category(),
            Error::FitDiverged(_)
            | Error::InsufficientData(_)
            | Error::NoMinimumFound { .. }
            | Error::InsufficientCurves(_)
            | Error::DegenerateAbscissa => ErrorCategory::Fit,
        }
    }
}
