use std::time::Instant;

use log::warn;
use serde::Serialize;

use super::stepsize::{apda_stepsize, local_lipschitz, PrevStep, StepsizeAudit, StepsizeVariant};
use super::{IterationView, RunSummary, SolveOutcome, StopReason, WorkCounters};
use crate::diagnostics::IterationRecord;
use crate::error::{ensure_len, Error, Result};
use crate::problems::SaddleProblem;
use crate::vecops;

/// Steps shorter than this many ulps of `||x||` carry no curvature information.
const ROUNDOFF_STEPS: f64 = 64.0;

/// Deliberate defects used to exercise the self-check machinery.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultInjection {
    #[default]
    None,
    /// Takes the max instead of the min in the stepsize rule.
    InvertGrowthCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApdaConfig {
    /// Dual/primal stepsize ratio `sigma_k / tau_k`.
    pub beta: f64,
    pub c: f64,
    /// Stepsize of the warm-up step that produces `x_1`.
    pub tau_init: f64,
    pub variant: StepsizeVariant,
    pub max_iters: usize,
    /// Stop once the combined optimality residual is at most this.
    pub residual_tol: f64,
    /// Certified upper bound on `||A||`.
    pub norm_a: f64,
    /// Reuse the previous local Lipschitz estimate when `||x_k - x_{k-1}||` is
    /// at roundoff level relative to `||x_k||`; the difference quotient is
    /// then dominated by rounding noise in the gradient.
    pub roundoff_guard: bool,
    #[doc(hidden)]
    #[serde(skip)]
    pub fault: FaultInjection,
}

impl ApdaConfig {
    pub const DEFAULT_C: f64 = 1e-15;
    pub const DEFAULT_TAU_INIT: f64 = 1e-9;

    pub fn new(beta: f64, norm_a: f64) -> Self {
        Self {
            beta,
            c: Self::DEFAULT_C,
            tau_init: Self::DEFAULT_TAU_INIT,
            variant: StepsizeVariant::Base,
            max_iters: 1000,
            residual_tol: 0.0,
            norm_a,
            roundoff_guard: true,
            fault: FaultInjection::None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        // c = 0 is admitted: the boundedness argument and the strongly convex
        // variant do not need c > 0.
        if !(0.0..1.0).contains(&self.c) {
            return bad(format!("c must be in [0, 1), got {}", self.c));
        }
        if !(self.tau_init > 0.0) || !self.tau_init.is_finite() {
            return bad(format!("tau_init must be positive, got {}", self.tau_init));
        }
        if !(self.norm_a >= 0.0) || !self.norm_a.is_finite() {
            return bad(format!("norm_a must be finite and nonnegative, got {}", self.norm_a));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        if !(self.residual_tol >= 0.0) {
            return bad(format!("residual_tol must be nonnegative, got {}", self.residual_tol));
        }
        Ok(())
    }
}

/// Adaptive primal-dual algorithm.
///
/// ```text
/// x_1 = x_0 - tau_init (grad f(x_0) + A^T y_0)
/// for k = 1, 2, ...
///     tau_k   = stepsize rule (L_k, tau_{k-1}, theta_{k-1}),  sigma_k = beta tau_k,  theta_k = tau_k / tau_{k-1}
///     xt_k    = x_k + theta_k (x_k - x_{k-1})
///     y_{k+1} = prox_{sigma_k g*}(y_k + sigma_k A xt_k)
///     x_{k+1} = x_k - tau_k (grad f(x_k) + A^T y_{k+1})
/// ```
///
/// `A xt_k` is formed as `(1 + theta_k) A x_k - theta_k A x_{k-1}` from cached
/// products, so each iteration costs one gradient, one `A` and one `A^T`, and
/// the diagnostics in the emitted records come for free.
pub fn apda_run<F>(
    problem: &SaddleProblem,
    x0: &[f64],
    y0: &[f64],
    config: &ApdaConfig,
    mut on_iteration: F,
) -> Result<SolveOutcome>
where
    F: FnMut(&IterationView<'_>),
{
    config.validate()?;
    let (n, m) = (problem.primal_dim(), problem.dual_dim());
    ensure_len("apda x0", n, x0.len())?;
    ensure_len("apda y0", m, y0.len())?;
    let start = Instant::now();
    let op = &problem.op;
    let beta = config.beta;
    let mut work = WorkCounters::default();

    let mut grad_prev = vec![0.0; n];
    problem.f.value_and_gradient_into(x0, &mut grad_prev)?;
    let mut aty = op.adjoint_apply(y0)?;
    let mut ax_prev = op.apply(x0)?;
    work.gradients += 1;
    work.adjoint += 1;
    work.forward += 1;

    let mut x_prev = x0.to_vec();
    let mut x: Vec<f64> = x0
        .iter()
        .zip(grad_prev.iter().zip(&aty))
        .map(|(xi, (gi, ai))| xi - config.tau_init * (gi + ai))
        .collect();
    let mut y = y0.to_vec();
    if !vecops::all_finite(&x) {
        return Err(Error::NonFiniteIterate {
            k: 1,
            last_finite: None,
        });
    }

    let mut grad = vec![0.0; n];
    let mut ax = vec![0.0; m];
    let mut dual_buf = vec![0.0; m];
    let mut y_next = vec![0.0; m];
    let mut aty_next = vec![0.0; n];
    let mut x_next = vec![0.0; n];

    let mut tau_prev = PrevStep::Infinite;
    let mut theta_prev = 1.0;
    let mut audit = StepsizeAudit::new(config);
    let mut reported = 0;
    let (mut tau_min, mut tau_max) = (f64::INFINITY, 0.0f64);
    let mut stop = StopReason::MaxIters;
    let mut iterations = 0;
    let mut last_sigma = f64::NAN;
    let mut last_lipschitz: Option<f64> = None;

    for k in 1..=config.max_iters {
        iterations = k;
        let f_value = problem.f.value_and_gradient_into(&x, &mut grad)?;
        work.gradients += 1;
        let mut lipschitz = local_lipschitz(&x, &x_prev, &grad, &grad_prev).map_err(|e| match e {
            Error::NonFinite(_) => Error::NonFinite(format!("gradient at iteration {k}")),
            other => other,
        })?;
        if config.roundoff_guard {
            if let Some(prev_l) = last_lipschitz {
                let scale = vecops::norm(&x).max(vecops::norm(&x_prev));
                if vecops::dist(&x, &x_prev) <= ROUNDOFF_STEPS * f64::EPSILON * scale {
                    lipschitz = prev_l;
                }
            }
        }
        last_lipschitz = Some(lipschitz);
        let step = apda_stepsize(lipschitz, tau_prev, theta_prev, config)?;
        let (tau, sigma, theta) = (step.tau, step.sigma, step.theta);
        last_sigma = sigma;
        tau_min = tau_min.min(tau);
        tau_max = tau_max.max(tau);

        audit.observe(k, tau, theta, lipschitz);
        if audit.violation_count > reported {
            reported = audit.violation_count;
            if let Some(v) = audit.violations.last() {
                if reported <= 3 {
                    warn!("stepsize invariant violated: {v}");
                }
            }
        }

        op.apply_into(&x, &mut ax)?;
        work.forward += 1;

        // Diagnostics at (x_k, y_k).
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
        let dual_residual = vecops::dist(&y, &dual_buf) / sigma;
        let record = IterationRecord {
            k,
            tau,
            sigma: Some(sigma),
            theta: Some(theta),
            lipschitz: Some(lipschitz),
            f_value,
            objective: f_value + problem.reg.value(&ax),
            primal_residual,
            dual_residual: Some(dual_residual),
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

        // y_{k+1} = prox_{sigma g*}(y_k + sigma A xt_k)
        for (((yn, yi), ai), ap) in y_next.iter_mut().zip(&y).zip(&ax).zip(&ax_prev) {
            *yn = yi + sigma * ((1.0 + theta) * ai - theta * ap);
        }
        problem.reg.prox_g_conj_in_place(sigma, &mut y_next)?;
        op.adjoint_apply_into(&y_next, &mut aty_next)?;
        work.adjoint += 1;
        // x_{k+1} = x_k - tau (grad f(x_k) + A^T y_{k+1})
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

        std::mem::swap(&mut x_prev, &mut x);
        std::mem::swap(&mut x, &mut x_next);
        std::mem::swap(&mut grad_prev, &mut grad);
        std::mem::swap(&mut ax_prev, &mut ax);
        std::mem::swap(&mut y, &mut y_next);
        std::mem::swap(&mut aty, &mut aty_next);
        tau_prev = PrevStep::Finite(tau);
        theta_prev = theta;
    }

    let (rp, rd) = problem.residuals(&x, &y, last_sigma)?;
    let summary = RunSummary {
        iterations,
        stop,
        final_objective: problem.objective(&x)?,
        final_residual: (rp * rp + rd * rd).sqrt(),
        tau_min,
        tau_max,
        work,
        invariant_violations: audit.violation_count,
        first_violation: audit.violations.first().map(|v| v.to_string()),
        wall_time_ns: start.elapsed().as_nanos() as u64,
    };
    Ok(SolveOutcome { x, y, summary })
}
