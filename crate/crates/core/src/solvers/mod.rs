//! Saddle-point solvers. Every solver reports one [`IterationRecord`] per
//! iteration, in order, through a caller-supplied observer.

mod apda;
mod cva;
mod fista;
mod stepsize;

use serde::Serialize;

use crate::diagnostics::IterationRecord;

pub use apda::{apda_run, ApdaConfig, FaultInjection};
pub use cva::{cva_gate, cva_run, CvaConfig};
pub use fista::fista_run;
pub use stepsize::{
    apda_stepsize, local_lipschitz, stepsize_floor, PrevStep, Step, StepsizeAudit, StepsizeVariant, Violation,
};

/// Read-only view handed to observers after each iteration `k`.
#[derive(Debug)]
pub struct IterationView<'a> {
    pub record: &'a IterationRecord,
    /// `x_k`
    pub x: &'a [f64],
    /// `y_k`
    pub y: &'a [f64],
    /// `(x_{k+1}, y_{k+1})`, absent when the run stopped at `k`.
    pub next: Option<(&'a [f64], &'a [f64])>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    MaxIters,
}

/// Work counters: one gradient, one `A` and one `A^T` per iteration for the
/// primal-dual solvers (plus the warm-up step for APDA).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct WorkCounters {
    pub gradients: usize,
    pub forward: usize,
    pub adjoint: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub iterations: usize,
    pub stop: StopReason,
    pub final_objective: f64,
    pub final_residual: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub work: WorkCounters,
    pub invariant_violations: usize,
    pub first_violation: Option<String>,
    pub wall_time_ns: u64,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub summary: RunSummary,
}
