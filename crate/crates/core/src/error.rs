use thiserror::Error;

/// Errors raised by the geometry, quadrature and bound-verification routines.
///
/// The variant name is part of the command-line contract: the CLI prints it
/// verbatim so scripts can match on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("InvalidCurve: {0}")]
    InvalidCurve(String),
    #[error("InvalidInput: {0}")]
    InvalidInput(String),
    #[error("DimensionMismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("DistanceTooSmall: curve passes within {distance:e} of the center (guard {guard:e})")]
    DistanceTooSmall { distance: f64, guard: f64 },
    #[error("CodimensionError: signed rotation needs codimension 2, subspace has codimension {0}")]
    CodimensionError(usize),
    #[error("CurvesTooClose: curves come within {distance:e} of each other (guard {guard:e})")]
    CurvesTooClose { distance: f64, guard: f64 },
    #[error("NotClosed: {0}")]
    NotClosed(String),
    #[error("QuadratureInconclusive: raw value {raw} is {residual} away from the nearest integer (error estimate {error_estimate:e})")]
    QuadratureInconclusive { raw: f64, residual: f64, error_estimate: f64 },
    #[error("NotPlanar: out-of-plane deviation {0:e}")]
    NotPlanar(f64),
    #[error("NonTransversal: {0}")]
    NonTransversal(String),
    #[error("StepUnderflow: step {step:e} at t = {t} is below the minimum {min_step:e}")]
    StepUnderflow { t: f64, step: f64, min_step: f64 },
    #[error("SampleBudgetExceeded: more than {0} samples requested")]
    SampleBudgetExceeded(usize),
    #[error("NonFinite: {0}")]
    NonFinite(String),
    #[error("PreconditionLength: curve length {length} does not exceed the required {required}")]
    PreconditionLength { length: f64, required: f64 },
    #[error("WitnessNotFound: {0}")]
    WitnessNotFound(String),
    #[error("NotStationary: |v(x0)| = {0:e}")]
    NotStationary(f64),
    #[error("NotInvariant: field has an orthogonal component of norm {0:e} on the subspace")]
    NotInvariant(f64),
    #[error("EigenvalueSignError: largest eigenvalue real part {0} is not negative")]
    EigenvalueSignError(f64),
    #[error("Io: {0}")]
    Io(String),
    #[error("Parse: {0}")]
    Parse(String),
}

impl Error {
    /// Short variant name, e.g. `"DistanceTooSmall"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidCurve(_) => "InvalidCurve",
            Error::InvalidInput(_) => "InvalidInput",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DistanceTooSmall { .. } => "DistanceTooSmall",
            Error::CodimensionError(_) => "CodimensionError",
            Error::CurvesTooClose { .. } => "CurvesTooClose",
            Error::NotClosed(_) => "NotClosed",
            Error::QuadratureInconclusive { .. } => "QuadratureInconclusive",
            Error::NotPlanar(_) => "NotPlanar",
            Error::NonTransversal(_) => "NonTransversal",
            Error::StepUnderflow { .. } => "StepUnderflow",
            Error::SampleBudgetExceeded(_) => "SampleBudgetExceeded",
            Error::NonFinite(_) => "NonFinite",
            Error::PreconditionLength { .. } => "PreconditionLength",
            Error::WitnessNotFound(_) => "WitnessNotFound",
            Error::NotStationary(_) => "NotStationary",
            Error::NotInvariant(_) => "NotInvariant",
            Error::EigenvalueSignError(_) => "EigenvalueSignError",
            Error::Io(_) => "Io",
            Error::Parse(_) => "Parse",
        }
    }

    /// True for errors caused by the numerics rather than by the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepUnderflow { .. }
                | Error::SampleBudgetExceeded(_)
                | Error::NonFinite(_)
                | Error::QuadratureInconclusive { .. }
                | Error::WitnessNotFound(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
