use thiserror::Error;

/// Errors raised by evaluation, zero location, certification and persistence.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid nome q = {re}+{im}i: require 0 < |q| < 1")]
    InvalidQ { re: f64, im: f64 },

    #[error("invalid tolerance {0}: must be positive and finite")]
    InvalidTolerance(f64),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("direct summation would overflow (peak log-term {log_peak:.1}); use the identity path")]
    Overflow { log_peak: f64 },

    #[error("series did not reach the requested tolerance within {0} terms")]
    TruncationCap(usize),

    #[error("contour passes too close to a zero (min |f| / max |f| = {ratio:e})")]
    ContourNearZero { ratio: f64 },

    #[error("winding number did not settle after {samples} samples")]
    WindingNotConverged { samples: usize },

    #[error("derivative vanishes near x = {re}+{im}i; suspected multiple zero")]
    DerivativeVanishing { re: f64, im: f64 },

    #[error("Newton iteration exceeded {0} iterations")]
    MaxIterations(usize),

    #[error("Newton iteration diverged")]
    Divergence,

    #[error("q iterate left the punctured unit disk")]
    LeftUnitDisk,

    #[error("singular Jacobian")]
    SingularJacobian,

    #[error("converged point fails the residual gate ({residual:e} > {gate:e})")]
    ResidualGate { residual: f64, gate: f64 },

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("zero count mismatch in ring {k}: winding says {expected}, located {found}")]
    CountMismatch { k: u32, expected: i64, found: i64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of a numerical procedure (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Overflow { .. }
                | Error::TruncationCap(_)
                | Error::ContourNearZero { .. }
                | Error::WindingNotConverged { .. }
                | Error::DerivativeVanishing { .. }
                | Error::MaxIterations(_)
                | Error::Divergence
                | Error::LeftUnitDisk
                | Error::SingularJacobian
                | Error::ResidualGate { .. }
                | Error::CountMismatch { .. }
        )
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}
