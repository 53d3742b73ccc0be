use thiserror::Error;

/// Errors raised by the simulator and the closed-form calculator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("entry count {len} does not match shape {rows}x{cols}")]
    BadShape { rows: usize, cols: usize, len: usize },

    #[error("duplicate subsystem label {0}")]
    DuplicateLabel(String),

    #[error("subsystem {0} is not part of the layout")]
    UnknownLabel(String),

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("parameter {name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("integrand returned non-finite value {value} at theta'={theta_prime}, phi'={phi_prime}")]
    NonFinite {
        value: f64,
        theta_prime: f64,
        phi_prime: f64,
    },

    #[error("Kraus set is not complete (residual {0:e})")]
    IncompleteKraus(f64),

    #[error("post-selection probability {0:e} is too small to normalize")]
    DegeneratePostSelection(f64),

    #[error("derivative is singular at c_z = 1")]
    SingularDerivative,

    #[error("inconsistent coherence pair: c_z = {c_z}, c_x = {c_x}")]
    InconsistentCoherence { c_z: f64, c_x: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
