use thiserror::Error;

/// Errors raised by the solvers and experiment drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("convolution window [{lo}, {hi}] exceeds path support [{t_min}, {t_max}]")]
    WindowOutsidePath { lo: f64, hi: f64, t_min: f64, t_max: f64 },

    #[error("Newton iteration failed to converge after {iterations} iterations (residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("traveling wave profile is not strictly increasing (min slope {min_slope:e})")]
    NonMonotone { min_slope: f64 },

    #[error("focal singularity: |det(I - qA)| = {det:e} below 1e-10")]
    Singular { det: f64 },

    #[error("CFL violation: dt = {dt:e} exceeds stable limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("initial radius {r0} not resolvable: need {lo} <= R0 <= {hi}")]
    NotResolvable { r0: f64, lo: f64, hi: f64 },

    #[error("no interface: field has no sign change")]
    NoInterface,

    #[error("wave-speed argument {delta} outside admissible range [-{delta0}, {delta0}]")]
    DeltaOutOfRange { delta: f64, delta0: f64 },

    #[error("non-finite value at time {time}: {what}")]
    NonFinite { time: f64, what: String },

    #[error("stopping time reached before any sample was recorded")]
    EmptyTrace,

    #[error("sandwich violated at t = 0 (margin {margin:e})")]
    SandwichViolated { margin: f64 },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}

impl Error {
    /// Stable snake-case tag of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::WindowOutsidePath { .. } => "window_outside_path",
            Error::NewtonDivergence { .. } => "newton_divergence",
            Error::NonMonotone { .. } => "non_monotone",
            Error::Singular { .. } => "singular",
            Error::Cfl { .. } => "cfl",
            Error::NotResolvable { .. } => "not_resolvable",
            Error::NoInterface => "no_interface",
            Error::DeltaOutOfRange { .. } => "delta_out_of_range",
            Error::NonFinite { .. } => "non_finite",
            Error::EmptyTrace => "empty_trace",
            Error::SandwichViolated { .. } => "sandwich_violated",
            Error::Io(_) => "io",
        }
    }
}
