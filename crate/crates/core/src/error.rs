use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("exponent budget exceeded at λ = {lambda}")]
    Overflow { lambda: Complex64 },

    #[error("λ = 0 is excluded; the closed-form parameterisation degenerates there")]
    ZeroFrequency,

    #[error("cofactor ({row},{col}) disagrees with its signed minor (relative error {rel_err:.3e})")]
    CofactorMismatch { row: usize, col: usize, rel_err: f64 },

    #[error("quadrature rule too coarse: need at least {required} panels, got {panels}")]
    QuadratureTooCoarse { required: usize, panels: usize },

    #[error("coupling matrix is numerically singular at λ = {lambda} (rcond {rcond:.3e})")]
    SingularCoupling { lambda: Complex64, rcond: f64 },

    #[error("contour passes through (or too close to) a zero near λ = {near}")]
    ContourThroughZero { near: Complex64 },

    #[error("winding number {value} did not settle on an integer")]
    NonIntegerWinding { value: f64 },

    #[error("Newton iteration diverged from λ = {start}")]
    NewtonDivergence { start: Complex64 },

    #[error("imaginary-axis clearance {margin:.3e} below floor {floor:.3e} at s = {s}")]
    ClearanceViolation { s: f64, margin: f64, floor: f64 },

    #[error("initial profile violates the domain constraints: {}", violations.join("; "))]
    ProfileViolatesDomain { violations: Vec<String> },

    #[error("heat component does not vanish at the reflection seam (|w(3/2)| = {residual:.3e})")]
    ReflectionSeam { residual: f64 },

    #[error("zero pivot in banded factorisation at row {row}")]
    FactorizationFailure { row: usize },

    #[error("shift s = {s} is too close to the discrete spectrum")]
    ShiftNearSpectrum { s: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("fit needs at least {need} points, got {got}")]
    InsufficientPoints { got: usize, need: usize },

    #[error("energy fell below {floor:e} before the fit window; nothing to fit")]
    EnergyUnderflow { floor: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
