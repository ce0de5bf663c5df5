use thiserror::Error;

/// Every failure the library can report.
///
/// Variant names double as the diagnostic names printed by the CLI, see
/// [`Error::name`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("point {index} breaks strict monotonicity of the break chain")]
    NonMonotone { index: usize },
    #[error("break {index} is collinear with its neighbours")]
    CollinearBreak { index: usize },
    #[error("argument {0} lies outside the domain")]
    OutOfDomain(String),
    #[error("break tuple does not define a piecewise linear map")]
    InvalidTuple,
    #[error("invalid sampling configuration: {0}")]
    InvalidConfig(String),
    #[error("interval ({lo}, {hi}) is degenerate or leaves [0,1]")]
    DegenerateInterval { lo: String, hi: String },
    #[error("closure of V is the whole interval, so C(U,V) is everything")]
    VacuousCase,
    #[error("expected {expected} adversaries, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },
    #[error("intervals {0} and {1} overlap")]
    DisjointnessViolated(usize, usize),
    #[error("intervals {0} and {1} are closer than the longer of the two")]
    SeparationViolated(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("certificate check failed at k={k} ({side}): {detail}")]
    CertificateFailure {
        k: usize,
        side: String,
        detail: String,
    },
    #[error("derivative integrates to {actual}, expected {expected}")]
    AreaMismatch { expected: String, actual: String },
    #[error("derivative profile is not strictly positive at x={0}")]
    NonPositiveDerivative(String),
    #[error("Hölder case test is undecided on interval {0}")]
    CaseUndecided(usize),
    #[error("interval {0} has a length whose power is irrational")]
    IrrationalPower(usize),
    #[error("map is not periodic with period 2: {0}")]
    NotPeriodic(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable identifier of the error kind.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonMonotone { .. } => "NonMonotone",
            Error::CollinearBreak { .. } => "CollinearBreak",
            Error::OutOfDomain(_) => "OutOfDomain",
            Error::InvalidTuple => "InvalidTuple",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::DegenerateInterval { .. } => "DegenerateInterval",
            Error::VacuousCase => "VacuousCase",
            Error::ArityMismatch { .. } => "ArityMismatch",
            Error::DisjointnessViolated(..) => "DisjointnessViolated",
            Error::SeparationViolated(..) => "SeparationViolated",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::CertificateFailure { .. } => "CertificateFailure",
            Error::AreaMismatch { .. } => "AreaMismatch",
            Error::NonPositiveDerivative(_) => "NonPositiveDerivative",
            Error::CaseUndecided(_) => "CaseUndecided",
            Error::IrrationalPower(_) => "IrrationalPower",
            Error::NotPeriodic(_) => "NotPeriodic",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
