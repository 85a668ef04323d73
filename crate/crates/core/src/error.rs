use thiserror::Error;

/// Failures raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("precision exhausted after {obtained} of {requested} digits")]
    PrecisionExhausted { obtained: usize, requested: usize },
    #[error("invalid digit stream: {0}")]
    InvalidDigits(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("degenerate parameter: rotation number is 0 mod 1")]
    DegenerateParameter,
    #[error("root finder did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("resonant denominator at order {order}")]
    ResonantDenominator { order: usize },
    #[error("unstable radius estimate (regression residual {residual:.3e})")]
    UnstableEstimate { residual: f64 },
    #[error("series diverges at normalized radius {r}")]
    SeriesDivergence { r: f64 },
    #[error("the cell containing 0 is not in the confined set")]
    ZeroComponent,
    #[error("bounding box too small: non-escaping cell on the boundary")]
    BboxTooSmall,
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("empty reference set")]
    EmptyU,
    #[error("radius {radius:.3e} below resolution ({min:.3e} required)")]
    RadiusBelowResolution { radius: f64, min: f64 },
    #[error("ball exceeds bounding box")]
    BallOutsideBbox,
    #[error("insufficient scales: {got} given, at least {need} required")]
    InsufficientScales { got: usize, need: usize },
    #[error("nonzero fixed point solve failed")]
    NoSigma,
    #[error("Abel residual {median:.3e} exceeds chart tolerance {tolerance:.1e}")]
    AbelResidualExceeded { median: f64, tolerance: f64 },
    #[error("rotation parameter {alpha} outside (0, {alpha_max})")]
    AlphaOutOfRange { alpha: f64, alpha_max: f64 },
    #[error("map family not supported by Fatou charts")]
    UnsupportedFamily,
    #[error("point outside the validated petal")]
    OutsidePetal,
    #[error("Newton iteration diverged")]
    NewtonDivergence,
    #[error("no return to the sector within {k1_max} iterations")]
    NoReturn { k1_max: usize },
    #[error("point outside the renormalization domain")]
    OutsideDomain,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("series of order {order} too short for a radius estimate")]
    SeriesTooShort { order: usize },
    #[error("malformed raster: {0}")]
    MalformedRaster(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
