use std::time::Instant;

use super::{IterationView, RunSummary, SolveOutcome, StopReason, WorkCounters};
use crate::diagnostics::IterationRecord;
use crate::error::{ensure_len, Error, Result};
use crate::problems::SmoothObjective;
use crate::prox::Regularizer;
use crate::vecops;

/// FISTA for `min f(x) + g(x)` (identity coupling) with step `1/L`:
///
/// ```text
/// x_{k+1} = prox_{g/L}(z_k - grad f(z_k) / L)
/// t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2
/// z_{k+1} = x_{k+1} + ((t_k - 1) / t_{k+1}) (x_{k+1} - x_k)
/// ```
///
/// with `z_1 = x_0 = x_1`, `t_1 = 1`. The recorded primal residual is the
/// gradient-mapping norm `L ||x_{k+1} - z_k||`; the dual slot is empty.
/// Stops when that residual is at most `residual_tol`.
pub fn fista_run<F>(
    f: &SmoothObjective,
    reg: &Regularizer,
    x0: &[f64],
    lipschitz: f64,
    max_iters: usize,
    residual_tol: f64,
    mut on_iteration: F,
) -> Result<SolveOutcome>
where
    F: FnMut(&IterationView<'_>),
{
    if !(lipschitz > 0.0) || !lipschitz.is_finite() {
        return Err(Error::InvalidArgument(format!("FISTA needs L > 0, got {lipschitz}")));
    }
    if max_iters == 0 {
        return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
    }
    let n = f.dim();
    ensure_len("fista x0", n, x0.len())?;
    if let Some(d) = reg.fixed_dim() {
        ensure_len("fista regularizer", n, d)?;
    }
    let start = Instant::now();
    let step = 1.0 / lipschitz;
    let mut work = WorkCounters::default();

    let mut x = x0.to_vec();
    let mut z = x0.to_vec();
    let mut x_next = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut t = 1.0f64;
    let mut stop = StopReason::MaxIters;
    let mut iterations = 0;

    for k in 1..=max_iters {
        iterations = k;
        let f_value = f.value(&x)?;
        f.value_and_gradient_into(&z, &mut grad)?;
        work.gradients += 1;
        let trial: Vec<f64> = z.iter().zip(&grad).map(|(zi, gi)| zi - step * gi).collect();
        x_next.copy_from_slice(&reg.prox_g(step, &trial)?);
        let record = IterationRecord {
            k,
            tau: step,
            sigma: None,
            theta: None,
            lipschitz: None,
            f_value,
            objective: f_value + reg.value(&x),
            primal_residual: lipschitz * vecops::dist(&x_next, &z),
            dual_residual: None,
            energy: None,
            wall_time_ns: start.elapsed().as_nanos() as u64,
        };
        if !record.is_finite() || !vecops::all_finite(&x_next) {
            let last_finite = record.is_finite().then(|| Box::new(record));
            return Err(Error::NonFiniteIterate { k, last_finite });
        }
        let converged = record.primal_residual <= residual_tol;
        on_iteration(&IterationView {
            record: &record,
            x: &x,
            y: &[],
            next: Some((&x_next, &[])),
        });

        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let momentum = (t - 1.0) / t_next;
        for ((zi, xn), xi) in z.iter_mut().zip(&x_next).zip(&x) {
            *zi = xn + momentum * (xn - xi);
        }
        t = t_next;
        std::mem::swap(&mut x, &mut x_next);
        if converged {
            stop = StopReason::Converged;
            break;
        }
    }

    let mut g_final = vec![0.0; n];
    let fv = f.value_and_gradient_into(&x, &mut g_final)?;
    let trial: Vec<f64> = x.iter().zip(&g_final).map(|(xi, gi)| xi - step * gi).collect();
    let mapped = reg.prox_g(step, &trial)?;
    let summary = RunSummary {
        iterations,
        stop,
        final_objective: fv + reg.value(&x),
        final_residual: lipschitz * vecops::dist(&mapped, &x),
        tau_min: step,
        tau_max: step,
        work,
        invariant_violations: 0,
        first_violation: None,
        wall_time_ns: start.elapsed().as_nanos() as u64,
    };
    Ok(SolveOutcome {
        x,
        y: Vec::new(),
        summary,
    })
}
