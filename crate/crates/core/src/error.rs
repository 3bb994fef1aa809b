use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("inertia parameter a[{index}] = {value} is not positive")]
    NonPositiveInertia { index: usize, value: f64 },
    #[error("geometry ratio epsilon must be nonzero and finite")]
    InvalidEpsilon,
    #[error("position vector is zero")]
    ZeroPosition,
    #[error("velocity vector is zero")]
    ZeroVelocity,
    #[error("state is off the unit sphere: |(g,g) - 1| = {0:e}")]
    OffSphere(f64),
    #[error("vector is not tangent: |(g,v)| = {0:e}")]
    NotTangent(f64),
    #[error("linear system is singular")]
    SingularSystem,
    #[error("scalar field vanishes or changes sign at q = {0:?}")]
    FieldVanishes(Vec<f64>),
    #[error("point {0:?} left the declared domain box")]
    DomainExit(Vec<f64>),
    #[error("tolerance {0:e} outside [1e-13, 1e-3]")]
    InvalidTolerance(f64),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("constraint violation {residual:e} at t = {t}")]
    ConstraintViolation { t: f64, residual: f64 },
    #[error("multiplier changes sign near t = {0}")]
    MultiplierSignChange(f64),
    #[error("value {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("index ({i}, {j}) out of range for n = {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },
    #[error("inertia parameters must be strictly decreasing")]
    NotStrictlyDecreasing,
    #[error("point is not generic: coordinate {0} vanishes")]
    NonGeneric(usize),
    #[error("coordinates violate interlacing at index {0}")]
    Interlacing(usize),
    #[error("operation requires n = 3, got {0}")]
    RequiresThreeDimensions(usize),
    #[error("evaluation hits a pole at z = {0}")]
    PoleHit(f64),
    #[error("kinetic energy {got} does not match the required value {expected}")]
    EnergyMismatch { expected: f64, got: f64 },
    #[error("degenerate initial frame")]
    DegenerateFrame,
    #[error("trajectory needs at least two samples")]
    TooShort,
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
