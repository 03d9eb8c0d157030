use thiserror::Error;

/// Failure modes shared by every stage of the pipeline.
///
/// Each variant maps to a stable machine-readable code (see [`Error::code`])
/// and to an exit class used by the command-line front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("outside domain: {0}")]
    Domain(String),
    #[error("capacity exceeded: {requested} points requested, cap is {cap}")]
    Capacity { requested: u64, cap: u64 },
    #[error("tail mass {ratio:.3e} exceeds tolerance {tol:.1e}")]
    TailMass { ratio: f64, tol: f64 },
    #[error("bad symbol: {0}")]
    Symbol(String),
    #[error("no pointwise evaluator: {0}")]
    Evaluator(String),
    #[error("accuracy target missed: estimate {estimate:.3e} > target {target:.1e}")]
    Accuracy { estimate: f64, target: f64 },
    #[error("insufficient coverage: {0}")]
    Coverage(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("denominator vanishes: min |g| = {min:.3e} below margin {margin:.1e}")]
    Denominator { min: f64, margin: f64 },
    #[error("tail bound {bound:.3e} above tolerance {tol:.1e}; try N >= {suggested}")]
    Truncation { bound: f64, tol: f64, suggested: u64 },
    #[error("oscillation under-resolved: need at least {required} nodes per axis, got {given}")]
    Resolution { required: usize, given: usize },
    #[error("too few points: {0}")]
    Size(String),
    #[error("malformed input: {0}")]
    Input(String),
}

/// Coarse grouping of errors, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Precondition,
    Accuracy,
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parameter(_) => "E_PARAM",
            Error::Domain(_) => "E_DOMAIN",
            Error::Capacity { .. } => "E_CAPACITY",
            Error::TailMass { .. } => "E_TAIL_MASS",
            Error::Symbol(_) => "E_SYMBOL",
            Error::Evaluator(_) => "E_EVALUATOR",
            Error::Accuracy { .. } => "E_ACCURACY",
            Error::Coverage(_) => "E_COVERAGE",
            Error::Precondition(_) => "E_PRECONDITION",
            Error::Degenerate(_) => "E_DEGENERATE",
            Error::Denominator { .. } => "E_DENOMINATOR",
            Error::Truncation { .. } => "E_TRUNCATION",
            Error::Resolution { .. } => "E_RESOLUTION",
            Error::Size(_) => "E_SIZE",
            Error::Input(_) => "E_INPUT",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Accuracy { .. } | Error::Truncation { .. } | Error::Resolution { .. } => {
                ErrorClass::Accuracy
            }
            _ => ErrorClass::Precondition,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, err: impl FnOnce() -> Error) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(err())
    }
}
