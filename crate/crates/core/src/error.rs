use thiserror::Error;

use crate::diagnostics::IterationRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("certificate unavailable at this scale: {rows}x{cols} exceeds the cap of {cap} entries")]
    CertificateUnavailable { rows: usize, cols: usize, cap: usize },

    #[error("degenerate problem: unbounded stepsize (L_k = 0 and ||A|| = 0 at the first iteration)")]
    UnboundedStepsize,

    #[error("stepsize validity gate failed: (1/tau - L)(1/sigma) = {lhs:.6e} < ||A||^2 = {rhs:.6e}")]
    GateFailed { lhs: f64, rhs: f64 },

    #[error("non-finite iterate at iteration {k}")]
    NonFiniteIterate {
        k: usize,
        last_finite: Option<Box<IterationRecord>>,
    },

    #[error("ergodic accumulator fed out of order: expected iteration {expected}, got {got}")]
    OutOfOrder { expected: usize, got: usize },

    #[error("negative ergodic weight {weight:.3e} at iteration {k}")]
    NegativeWeight { k: usize, weight: f64 },

    #[error(
        "reference solution did not meet its gate: residual {residual:.3e} > {gate:.3e} after {iterations} iterations"
    )]
    ReferenceGate {
        residual: f64,
        gate: f64,
        iterations: usize,
    },

    #[error("missing {0}")]
    Missing(&'static str),
}

pub(crate) fn ensure_len(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { context, expected, got });
    }
    Ok(())
}

pub(crate) fn ensure_finite(context: &str, v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(context.to_string()))
    }
}
