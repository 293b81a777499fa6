use serde::Serialize;

use crate::error::{Error, Result};

/// Constants of the linear convergence guarantee for the strongly convex
/// stepsize variant.
///
/// ```text
/// s = sqrt(4 L^2 + beta ||A||^2)       t = sqrt(4 mu^2 + beta ||A||^2)
/// p = 1/2    q = mu / (4 s)    r = beta smin^2 mu / (beta smin^2 mu + 8 s^2 t + 4 L^2 s)
/// T = smin^2 mu / (8 s^2 t + 4 L^2 s)
/// energy_k <= (1 - min{p, q, r})^k * M
/// ```
///
/// Without coupling (`||A|| = 0`) there is no dual variable to contract and
/// `r` drops out, leaving `1 - min{p, q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateCertificate {
    pub mu: f64,
    pub lipschitz: f64,
    pub beta: f64,
    pub norm_a: f64,
    pub sigma_min: f64,
    pub s: f64,
    pub t: f64,
    pub p: f64,
    pub q: f64,
    pub r: Option<f64>,
    pub big_t: f64,
    pub contraction: f64,
}

impl RateCertificate {
    pub fn new(mu: f64, lipschitz: f64, beta: f64, norm_a: f64, sigma_min: f64) -> Result<Self> {
        if !(mu > 0.0) {
            return Err(Error::Missing("strong convexity constant mu > 0"));
        }
        let coupled = norm_a > 0.0;
        if coupled && !(sigma_min > 0.0) {
            return Err(Error::Missing("smallest singular value sigma_min > 0"));
        }
        if !(lipschitz >= mu) || !(beta > 0.0) || !(norm_a >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rate certificate needs 0 < mu <= L and beta > 0 (mu={mu}, L={lipschitz}, beta={beta})"
            )));
        }
        let a2 = beta * norm_a * norm_a;
        let s = (4.0 * lipschitz * lipschitz + a2).sqrt();
        let t = (4.0 * mu * mu + a2).sqrt();
        let p: f64 = 0.5;
        let q = mu / (4.0 * s);
        let denom = 8.0 * s * s * t + 4.0 * lipschitz * lipschitz * s;
        let num = beta * sigma_min * sigma_min * mu;
        let r = coupled.then(|| num / (num + denom));
        let big_t = sigma_min * sigma_min * mu / denom;
        let contraction = 1.0 - p.min(q).min(r.unwrap_or(f64::INFINITY));
        Ok(Self {
            mu,
            lipschitz,
            beta,
            norm_a,
            sigma_min,
            s,
            t,
            p,
            q,
            r,
            big_t,
            contraction,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearRateReport {
    pub checked: usize,
    pub violations: usize,
    pub first_violation: Option<usize>,
    /// `min_k (bound_k - energy_k) / bound_k`; negative means violated.
    pub worst_margin: f64,
    pub contraction: f64,
    pub m2: f64,
    /// Least-squares slope of `ln(energy_k)` against `k` above the precision floor.
    pub empirical_log_slope: Option<f64>,
    pub theoretical_log_rate: f64,
}

impl LinearRateReport {
    pub fn holds(&self) -> bool {
        self.violations == 0 && self.empirical_log_slope.is_none_or(|s| s <= self.theoretical_log_rate)
    }
}

/// Checks `energy_k <= contraction^k * m2` for every sample with `k >= 2`.
pub fn linear_rate_check(energies: &[(usize, f64)], cert: &RateCertificate, m2: f64) -> LinearRateReport {
    let log_rho = cert.contraction.ln();
    let mut checked = 0;
    let mut violations = 0;
    let mut first_violation = None;
    let mut worst_margin = f64::INFINITY;
    for &(k, e) in energies.iter().filter(|(k, _)| *k >= 2) {
        checked += 1;
        let bound = (k as f64 * log_rho).exp() * m2;
        let margin = (bound - e) / bound;
        worst_margin = worst_margin.min(margin);
        if !(e <= bound) {
            violations += 1;
            first_violation.get_or_insert(k);
        }
    }
    // Fit only where the energy is well above the accuracy of the reference.
    let floor = m2 * 1e-16;
    let pts: Vec<(f64, f64)> = energies
        .iter()
        .filter(|(k, e)| *k >= 2 && *e > floor)
        .map(|&(k, e)| (k as f64, e.ln()))
        .collect();
    LinearRateReport {
        checked,
        violations,
        first_violation,
        worst_margin,
        contraction: cert.contraction,
        m2,
        empirical_log_slope: least_squares_slope(&pts),
        theoretical_log_rate: log_rho,
    }
}

fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Gap of the ergodic pair at iteration `k`, evaluated at the reference point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapSample {
    pub k: usize,
    pub weight_sum: f64,
    pub gap: f64,
}

/// Inputs of the `O(1/k)` ergodic bound
/// `G(X_k, Y_k) <= M(B) sqrt(L^2 + (beta / (1 - c)) ||A||^2) / k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapBoundParams {
    pub lipschitz: f64,
    pub beta: f64,
    pub c: f64,
    pub norm_a: f64,
    pub m_ball: f64,
}

impl GapBoundParams {
    /// `M(B)` for the product of balls of radius `radius` around the
    /// reference point:
    /// `sup ||x_1 - x||^2 + (1/beta) ||y_1 - y||^2 + 1/2 ||x_1 - x_0||^2`.
    pub fn m_of_ball(dist_x1: f64, dist_y1: f64, step_x1_x0: f64, beta: f64, radius: f64) -> f64 {
        (dist_x1 + radius).powi(2) + (dist_y1 + radius).powi(2) / beta + 0.5 * step_x1_x0.powi(2)
    }

    pub fn bound(&self, k: usize) -> f64 {
        let scale = (self.lipschitz.powi(2) + self.beta / (1.0 - self.c) * self.norm_a.powi(2)).sqrt();
        self.m_ball * scale / k as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GapBoundReport {
    pub checked: usize,
    pub violations: usize,
    pub first_violation: Option<usize>,
    /// `max_k G_k / bound_k`
    pub worst_ratio: f64,
    /// Gap strictly decreases along the dyadic subsequence `k = 1, 2, 4, ...`.
    pub dyadic_decreasing: bool,
    pub params: GapBoundParams,
}

impl GapBoundReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

pub fn gap_bound_check(samples: &[GapSample], params: &GapBoundParams) -> GapBoundReport {
    let mut violations = 0;
    let mut first_violation = None;
    let mut worst_ratio: f64 = 0.0;
    for s in samples {
        let bound = params.bound(s.k);
        let ratio = s.gap / bound;
        worst_ratio = worst_ratio.max(ratio);
        if !(s.gap <= bound) {
            violations += 1;
            first_violation.get_or_insert(s.k);
        }
    }
    let dyadic: Vec<f64> = samples
        .iter()
        .filter(|s| s.k.is_power_of_two())
        .map(|s| s.gap)
        .collect();
    let dyadic_decreasing = dyadic.windows(2).all(|w| w[1] < w[0]);
    GapBoundReport {
        checked: samples.len(),
        violations,
        first_violation,
        worst_ratio,
        dyadic_decreasing,
        params: *params,
    }
}
