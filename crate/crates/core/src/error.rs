use thiserror::Error;

/// Failures raised by the kinematics, synthesis and scenario layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("light-front momentum p_minus = {0} must be positive")]
    NonPositiveMinus(f64),
    #[error("momentum is off shell: p0 = {p0}, E_p = {energy}")]
    OffShell { p0: f64, energy: f64 },
    #[error("evanescent mode at eta = {eta}, p_perp = {p_perp}: negative radicand {radicand:e}")]
    EvanescentMode { eta: f64, p_perp: f64, radicand: f64 },
    #[error("singular slice: v_a = {v_a} equals p3/E at eta = {eta}")]
    SingularSlice { v_a: f64, eta: f64 },
    #[error("designer denominator vanishes for v_fstar = {v_fstar}")]
    DesignerSingular { v_fstar: f64 },
    #[error("v_a = 1 is not allowed here")]
    LuminalVa,
    #[error("x_minus = {x} outside cached range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },
    #[error("grid step {step} exceeds resolution bound {bound}")]
    Resolution { step: f64, bound: f64 },
    #[error("paraxial approximation invalid: <p1^2> = {p1_sq:e} vs bound {bound:e}")]
    ParaxialInvalid { p1_sq: f64, bound: f64 },
    #[error("no distinguishable peak in slice x_minus = {x_minus}")]
    FlatSlice { x_minus: f64 },
    #[error("peak never leaves the envelope within [{lo}, {hi}]")]
    NoIntersection { lo: f64, hi: f64 },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(path: &str, message: impl Into<String>) -> Self {
        Error::Invalid {
            path: path.to_string(),
            message: message.into(),
        }
    }

    /// True for errors raised by a numerical guard rather than by bad input.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::EvanescentMode { .. }
                | Error::SingularSlice { .. }
                | Error::DesignerSingular { .. }
                | Error::Resolution { .. }
                | Error::ParaxialInvalid { .. }
                | Error::NoIntersection { .. }
                | Error::FlatSlice { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
