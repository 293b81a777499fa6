use std::time::Instant;

use serde::Serialize;

use super::{IterationView, RunSummary, SolveOutcome, StopReason, WorkCounters};
use crate::diagnostics::IterationRecord;
use crate::error::{ensure_len, Error, Result};
use crate::problems::SaddleProblem;
use crate::vecops;

/// Relative slack on the stepsize condition, so that the boundary
/// parametrization `tau = 1/(||A||/p + L)`, `sigma = 1/(p ||A||)` passes.
const GATE_SLACK: f64 = 1e-12;

/// Fixed-stepsize Condat-Vu configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CvaConfig {
    pub tau: f64,
    pub sigma: f64,
    /// Global Lipschitz constant of `grad f`.
    pub lipschitz: f64,
    pub norm_a: f64,
    pub max_iters: usize,
    pub residual_tol: f64,
    /// Run even if the stepsize condition fails.
    pub override_gate: bool,
}

impl CvaConfig {
    /// `tau = 1/(||A||/p + L)`, `sigma = 1/(p ||A||)`.
    pub fn from_ratio(p: f64, lipschitz: f64, norm_a: f64) -> Result<Self> {
        if !(p > 0.0) || !(norm_a > 0.0) || !(lipschitz >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "ratio parametrization needs p > 0, ||A|| > 0, L >= 0 (p={p}, ||A||={norm_a}, L={lipschitz})"
            )));
        }
        Ok(Self {
            tau: 1.0 / (norm_a / p + lipschitz),
            sigma: 1.0 / (p * norm_a),
            lipschitz,
            norm_a,
            max_iters: 1000,
            residual_tol: 0.0,
            override_gate: false,
        })
    }
}

/// Checks `(1/tau - L) / sigma >= ||A||^2`; returns both sides.
pub fn cva_gate(config: &CvaConfig) -> Result<(f64, f64)> {
    if !(config.tau > 0.0) || !(config.sigma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "stepsizes must be positive (tau={}, sigma={})",
            config.tau, config.sigma
        )));
    }
    let lhs = (1.0 / config.tau - config.lipschitz) / config.sigma;
    let rhs = config.norm_a * config.norm_a;
    if lhs >= rhs * (1.0 - GATE_SLACK) {
        Ok((lhs, rhs))
    } else {
        Err(Error::GateFailed { lhs, rhs })
    }
}

/// Condat-Vu with fixed stepsizes and `theta = 1`, in the same update order
/// as the adaptive method:
///
/// ```text
/// y_{k+1} = prox_{sigma g*}(y_k + sigma A (2 x_k - x_{k-1}))
/// x_{k+1} = x_k - tau (grad f(x_k) + A^T y_{k+1})
/// ```
///
/// with `x_{-1} = x_0`.
pub fn cva_run<F>(
    problem: &SaddleProblem,
    x0: &[f64],
    y0: &[f64],
    config: &CvaConfig,
    mut on_iteration: F,
) -> Result<SolveOutcome>
where
    F: FnMut(&IterationView<'_>),
{
    match cva_gate(config) {
        Ok(_) => {}
        Err(Error::GateFailed { lhs, rhs }) if config.override_gate => {
            log::warn!("running past a failed stepsize condition: {lhs:.6e} < {rhs:.6e}");
        }
        Err(e) => return Err(e),
    }
    if config.max_iters == 0 {
        return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
    }
    let (n, m) = (problem.primal_dim(), problem.dual_dim());
    ensure_len("cva x0", n, x0.len())?;
    ensure_len("cva y0", m, y0.len())?;
    let start = Instant::now();
    let op = &problem.op;
    let (tau, sigma) = (config.tau, config.sigma);
    let beta = sigma / tau;
    let mut work = WorkCounters::default();

    let mut x = x0.to_vec();
    let mut y = y0.to_vec();
    let mut aty = op.adjoint_apply(y0)?;
    let mut ax_prev = op.apply(x0)?;
    work.adjoint += 1;
    work.forward += 1;

    let mut grad = vec![0.0; n];
    let mut ax = vec![0.0; m];
    let mut dual_buf = vec![0.0; m];
    let mut y_next = vec![0.0; m];
    let mut aty_next = vec![0.0; n];
    let mut x_next = vec![0.0; n];
    let mut stop = StopReason::MaxIters;
    let mut iterations = 0;

    for k in 1..=config.max_iters {
        iterations = k;
        let f_value = problem.f.value_and_gradient_into(&x, &mut grad)?;
        work.gradients += 1;
        op.apply_into(&x, &mut ax)?;
        work.forward += 1;

        let primal_residual = grad
            .iter()
            .zip(&aty)
            .map(|(g, a)| (g + a) * (g + a))
            .sum::<f64>()
            .sqrt();
        for ((d, yi), ai) in dual_buf.iter_mut().zip(&y).zip(&ax) {
            *d = yi + sigma * ai;
        }
        problem.reg.prox_g_conj_in_place(sigma, &mut dual_buf)?;
        let record = IterationRecord {
            k,
            tau,
            sigma: Some(sigma),
            theta: Some(1.0),
            lipschitz: None,
            f_value,
            objective: f_value + problem.reg.value(&ax),
            primal_residual,
            dual_residual: Some(vecops::dist(&y, &dual_buf) / sigma),
            energy: problem.energy(&x, &y, beta),
            wall_time_ns: start.elapsed().as_nanos() as u64,
        };

        if record.residual() <= config.residual_tol {
            on_iteration(&IterationView {
                record: &record,
                x: &x,
                y: &y,
                next: None,
            });
            stop = StopReason::Converged;
            break;
        }

        for (((yn, yi), ai), ap) in y_next.iter_mut().zip(&y).zip(&ax).zip(&ax_prev) {
            *yn = yi + sigma * (2.0 * ai - ap);
        }
        problem.reg.prox_g_conj_in_place(sigma, &mut y_next)?;
        op.adjoint_apply_into(&y_next, &mut aty_next)?;
        work.adjoint += 1;
        for (((xn, xi), gi), ai) in x_next.iter_mut().zip(&x).zip(&grad).zip(&aty_next) {
            *xn = xi - tau * (gi + ai);
        }

        if !record.is_finite() || !vecops::all_finite(&x_next) || !vecops::all_finite(&y_next) {
            let last_finite = record.is_finite().then(|| Box::new(record));
            return Err(Error::NonFiniteIterate { k, last_finite });
        }

        on_iteration(&IterationView {
            record: &record,
            x: &x,
            y: &y,
            next: Some((&x_next, &y_next)),
        });

        std::mem::swap(&mut x, &mut x_next);
        std::mem::swap(&mut ax_prev, &mut ax);
        std::mem::swap(&mut y, &mut y_next);
        std::mem::swap(&mut aty, &mut aty_next);
    }

    let (rp, rd) = problem.residuals(&x, &y, sigma)?;
    let summary = RunSummary {
        iterations,
        stop,
        final_objective: problem.objective(&x)?,
        final_residual: (rp * rp + rd * rd).sqrt(),
        tau_min: tau,
        tau_max: tau,
        work,
        invariant_violations: 0,
        first_violation: None,
        wall_time_ns: start.elapsed().as_nanos() as u64,
    };
    Ok(SolveOutcome { x, y, summary })
}
