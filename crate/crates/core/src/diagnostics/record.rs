use serde::Serialize;

/// One row of a solver trace. Optional entries are absent for solvers that
/// have no such quantity (FISTA has no dual variable, for instance).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    pub tau: f64,
    pub sigma: Option<f64>,
    pub theta: Option<f64>,
    pub lipschitz: Option<f64>,
    /// `f(x_k)`
    pub f_value: f64,
    /// `F(x_k) = f(x_k) + g(A x_k)`
    pub objective: f64,
    /// `||grad f(x_k) + A^T y_k||`
    pub primal_residual: f64,
    /// `||y_k - prox_{sigma g*}(y_k + sigma A x_k)|| / sigma`
    pub dual_residual: Option<f64>,
    /// `||x_k - x*||^2 + (1/beta) ||y_k - y*||^2` when a reference is known.
    pub energy: Option<f64>,
    pub wall_time_ns: u64,
}

impl IterationRecord {
    /// Combined residual used by the stopping rule.
    pub fn residual(&self) -> f64 {
        let d = self.dual_residual.unwrap_or(0.0);
        (self.primal_residual.powi(2) + d * d).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.tau.is_finite()
            && self.f_value.is_finite()
            && self.objective.is_finite()
            && self.primal_residual.is_finite()
            && self.dual_residual.is_none_or(f64::is_finite)
    }
}
