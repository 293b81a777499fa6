use serde::Serialize;

use super::apda::{ApdaConfig, FaultInjection};
use crate::error::{ensure_len, Error, Result};
use crate::vecops;

/// Relative slack for the growth-cap comparison.
const GROWTH_SLACK: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepsizeVariant {
    /// `tau_k = min{ 1 / (2 sqrt(L_k^2 + (beta/(1-c)) ||A||^2)), tau_{k-1} sqrt(1 + theta_{k-1}) }`
    Base,
    /// `tau_k = min{ 1 / (2 sqrt(4 L_k^2 + beta ||A||^2)), tau_{k-1} sqrt(1 + theta_{k-1}/2) }`
    StronglyConvex,
}

/// Previous primal stepsize; `tau_0` is an infinite sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrevStep {
    Infinite,
    Finite(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub tau: f64,
    pub sigma: f64,
    pub theta: f64,
}

/// `||grad_cur - grad_prev|| / ||x_cur - x_prev||`, or 0 for coincident iterates.
pub fn local_lipschitz(x_cur: &[f64], x_prev: &[f64], grad_cur: &[f64], grad_prev: &[f64]) -> Result<f64> {
    ensure_len("local lipschitz iterates", x_cur.len(), x_prev.len())?;
    ensure_len("local lipschitz gradients", x_cur.len(), grad_cur.len())?;
    ensure_len("local lipschitz gradients", x_cur.len(), grad_prev.len())?;
    if !vecops::all_finite(grad_cur) {
        return Err(Error::NonFinite("gradient at the current iterate".into()));
    }
    if !vecops::all_finite(grad_prev) {
        return Err(Error::NonFinite("gradient at the previous iterate".into()));
    }
    let dx = vecops::dist(x_cur, x_prev);
    if dx == 0.0 {
        return Ok(0.0);
    }
    Ok(vecops::dist(grad_cur, grad_prev) / dx)
}

fn curvature_term(l_k: f64, config: &ApdaConfig) -> f64 {
    let a2 = config.norm_a * config.norm_a;
    let inner = match config.variant {
        StepsizeVariant::Base => l_k * l_k + config.beta / (1.0 - config.c) * a2,
        StepsizeVariant::StronglyConvex => 4.0 * l_k * l_k + config.beta * a2,
    };
    1.0 / (2.0 * inner.sqrt())
}

fn growth_factor(theta_prev: f64, variant: StepsizeVariant) -> f64 {
    match variant {
        StepsizeVariant::Base => (1.0 + theta_prev).sqrt(),
        StepsizeVariant::StronglyConvex => (1.0 + 0.5 * theta_prev).sqrt(),
    }
}

/// Adaptive stepsize update. Returns `(tau_k, sigma_k = beta tau_k, theta_k = tau_k / tau_{k-1})`
/// with `theta_k = 0` after the infinite sentinel.
pub fn apda_stepsize(l_k: f64, tau_prev: PrevStep, theta_prev: f64, config: &ApdaConfig) -> Result<Step> {
    if !(l_k >= 0.0) || !l_k.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "local Lipschitz estimate must be finite and >= 0, got {l_k}"
        )));
    }
    let first = curvature_term(l_k, config);
    let (tau, theta) = match tau_prev {
        PrevStep::Infinite => {
            if first.is_infinite() {
                return Err(Error::UnboundedStepsize);
            }
            (first, 0.0)
        }
        PrevStep::Finite(prev) => {
            let growth = prev * growth_factor(theta_prev, config.variant);
            let tau = match config.fault {
                FaultInjection::None => first.min(growth),
                FaultInjection::InvertGrowthCap => first.max(growth).min(f64::MAX),
            };
            (tau, tau / prev)
        }
    };
    Ok(Step {
        tau,
        sigma: config.beta * tau,
        theta,
    })
}

/// `1 / (2 sqrt(L_max^2 + (beta/(1-c)) ||A||^2))` (base) or
/// `1 / (2 sqrt(4 L_max^2 + beta ||A||^2))` (strongly convex): no stepsize of
/// a run whose local estimates stay below `L_max` falls under this value.
pub fn stepsize_floor(l_max: f64, config: &ApdaConfig) -> f64 {
    curvature_term(l_max, config)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub k: usize,
    pub check: &'static str,
    pub value: f64,
    pub limit: f64,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "k={} {}: {:.17e} vs limit {:.17e}",
            self.k, self.check, self.value, self.limit
        )
    }
}

/// Independent per-iteration check of the stepsize invariants:
///
/// * `tau_k L_k < 1/2` (base) or `< 1/4` (strongly convex)
/// * `tau_k <= tau_{k-1} sqrt(1 + theta_{k-1})` (resp. `sqrt(1 + theta_{k-1}/2)`)
/// * `theta_k <= 2`
/// * `tau_k < 1 / (L_k + sqrt(L_k^2 + 2 (beta/(1-c)) ||A||^2))`, and for the
///   strongly convex variant also `tau_k < 1 / (2 L_k + sqrt(4 L_k^2 + 2 beta ||A||^2))`
///
/// Without coupling (`||A|| = 0`) the strict inequalities hold with equality
/// when the curvature term binds, so they are checked non-strictly.
#[derive(Debug, Clone, Serialize)]
pub struct StepsizeAudit {
    variant: StepsizeVariant,
    beta: f64,
    c: f64,
    norm_a: f64,
    prev: Option<(f64, f64)>,
    pub checked: usize,
    pub violation_count: usize,
    /// First few violations, in iteration order.
    pub violations: Vec<Violation>,
}

const KEPT_VIOLATIONS: usize = 16;

impl StepsizeAudit {
    pub fn new(config: &ApdaConfig) -> Self {
        Self {
            variant: config.variant,
            beta: config.beta,
            c: config.c,
            norm_a: config.norm_a,
            prev: None,
            checked: 0,
            violation_count: 0,
            violations: Vec::new(),
        }
    }

    fn flag(&mut self, k: usize, check: &'static str, value: f64, limit: f64, ok: bool) {
        if !ok {
            self.violation_count += 1;
            if self.violations.len() < KEPT_VIOLATIONS {
                self.violations.push(Violation { k, check, value, limit });
            }
        }
    }

    pub fn observe(&mut self, k: usize, tau: f64, theta: f64, l_k: f64) {
        self.checked += 1;
        let strict = self.norm_a > 0.0;
        let below = |v: f64, lim: f64| if strict { v < lim } else { v <= lim };

        let tl_limit = match self.variant {
            StepsizeVariant::Base => 0.5,
            StepsizeVariant::StronglyConvex => 0.25,
        };
        self.flag(k, "tau*L", tau * l_k, tl_limit, below(tau * l_k, tl_limit));

        if let Some((tau_prev, theta_prev)) = self.prev {
            let cap = tau_prev * growth_factor(theta_prev, self.variant);
            self.flag(k, "growth cap", tau, cap, tau <= cap * (1.0 + GROWTH_SLACK));
        }
        self.flag(k, "theta <= 2", theta, 2.0, theta <= 2.0);

        let a2 = self.norm_a * self.norm_a;
        let interval = 1.0 / (l_k + (l_k * l_k + 2.0 * self.beta / (1.0 - self.c) * a2).sqrt());
        self.flag(k, "valid interval", tau, interval, below(tau, interval));
        if self.variant == StepsizeVariant::StronglyConvex {
            let sc = 1.0 / (2.0 * l_k + (4.0 * l_k * l_k + 2.0 * self.beta * a2).sqrt());
            self.flag(k, "strongly convex interval", tau, sc, below(tau, sc));
        }
        self.prev = Some((tau, theta));
    }

    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(beta: f64, c: f64, norm_a: f64, variant: StepsizeVariant) -> ApdaConfig {
        ApdaConfig {
            c,
            variant,
            ..ApdaConfig::new(beta, norm_a)
        }
    }

    #[test]
    fn lipschitz_ratio() {
        assert_eq!(
            local_lipschitz(&[1.0, 0.0], &[0.0, 0.0], &[2.0, 0.0], &[0.0, 0.0]).unwrap(),
            2.0
        );
        assert_eq!(local_lipschitz(&[1.0], &[1.0], &[3.0], &[3.0]).unwrap(), 0.0);
        assert!(local_lipschitz(&[1.0], &[0.0], &[f64::NAN], &[0.0]).is_err());
    }

    #[test]
    fn first_step_without_coupling() {
        let cfg = config(1.0, 0.0, 0.0, StepsizeVariant::Base);
        let s = apda_stepsize(1.0, PrevStep::Infinite, 1.0, &cfg).unwrap();
        assert_eq!(s.tau, 0.5);
        assert_eq!(s.theta, 0.0);
        assert_eq!(s.sigma, 0.5);
    }

    #[test]
    fn curvature_term_binds() {
        let cfg = config(1.0, 0.0, 1.0, StepsizeVariant::Base);
        let s = apda_stepsize(0.0, PrevStep::Finite(1e9), 1.0, &cfg).unwrap();
        assert_eq!(s.tau, 0.5);
        assert_eq!(s.theta, 0.5e-9);
    }

    #[test]
    fn strongly_convex_first_term() {
        let cfg = config(4.0, 0.0, 1.0, StepsizeVariant::StronglyConvex);
        let s = apda_stepsize(1.0, PrevStep::Infinite, 1.0, &cfg).unwrap();
        assert!((s.tau - 1.0 / (2.0 * 8f64.sqrt())).abs() < 1e-16);
        assert!((s.tau - 0.1767767).abs() < 1e-7);
    }

    #[test]
    fn degenerate_first_step() {
        let cfg = config(1.0, 0.0, 0.0, StepsizeVariant::Base);
        assert!(matches!(
            apda_stepsize(0.0, PrevStep::Infinite, 1.0, &cfg),
            Err(Error::UnboundedStepsize)
        ));
        // later iterations fall back to the growth term
        let s = apda_stepsize(0.0, PrevStep::Finite(0.25), 1.0, &cfg).unwrap();
        assert!((s.tau - 0.25 * 2f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn audit_flags_growth_violation() {
        let cfg = config(1.0, 0.0, 1.0, StepsizeVariant::Base);
        let mut audit = StepsizeAudit::new(&cfg);
        audit.observe(1, 0.1, 0.0, 1.0);
        audit.observe(2, 0.2, 2.0, 1.0);
        assert!(!audit.is_clean());
        assert_eq!(audit.violations[0].check, "growth cap");
    }
}
