use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not in GL+(n): det = {det:e}")]
    NotInGLPlus { det: f64 },

    #[error("point lies on a singular point of the map (distance {distance:e})")]
    SingularPoint { distance: f64 },

    #[error("map is orientation reversing at this point: det = {det:e}")]
    NonOrientationPreserving { det: f64 },

    #[error("matrix is not conformal: residual {residual:e} exceeds tolerance {tol:e}")]
    NotConformal { residual: f64, tol: f64 },

    #[error("energy is not differentiable here: {0}")]
    NotDifferentiable(String),

    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),

    #[error("g11*g22 = {0:e} is negative; condition i) is violated")]
    NegativeRadicand(f64),

    #[error("rank-one segment leaves GL+(n) at t = {t}")]
    LeavesGLPlus { t: f64 },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("splice point c = {c} must exceed e")]
    InvalidSplice { c: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] IoError),
}

/// `std::io::Error` is neither `Clone` nor `PartialEq`; keep the message only.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct IoError(pub String);

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(IoError(e.to_string()))
    }
}
