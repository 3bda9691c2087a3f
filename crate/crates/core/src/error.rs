use alloc::string::String;

/// Errors raised by the control and simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid selection indices: {0}")]
    InvalidSelection(String),

    #[error("unknown path `{name}` (catalog: sinusoid, cassini, lemniscate, cylinder_intersection, torus_knot)")]
    UnknownPath { name: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("empty parameter window [{0}, {1}]")]
    EmptyWindow(f64, f64),

    #[error("A M^-1 B is singular at t = {t} (q = {q})")]
    SingularInputMap { t: f64, q: String },

    #[error("inertia matrix is not positive definite at t = {t}")]
    NotPositiveDefinite { t: f64 },

    #[error("point {point} is outside the reach of the arm ({reason})")]
    Unreachable { point: String, reason: &'static str },

    #[error("forward kinematics root-solve did not converge (residual {residual:e} after {iterations} iterations)")]
    RootSolve { iterations: usize, residual: f64 },

    #[error("state became non-finite at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },

    #[error("assumption violated: {0}")]
    AssumptionViolated(&'static str),

    #[error("series too short: need at least 2 samples, got {0}")]
    SeriesTooShort(usize),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}
