use crate::error::{ensure_len, Error, Result};

/// Relative tolerance on the nonnegativity of the ergodic weights; the weight
/// is exactly zero (up to rounding) whenever the growth cap binds.
const WEIGHT_SLACK: f64 = 1e-12;

/// Running stepsize-weighted averages of the primal-dual iterates.
///
/// After feeding iterations `1..=k`:
///
/// ```text
/// S_k = sum_i tau_i
/// X_k = (tau_k (1 + theta_k) x_k + sum_{i<k} (tau_i (1 + theta_i) - tau_{i+1} theta_{i+1}) x_i) / S_k
/// Y_k = sum_i tau_i y_{i+1} / S_k
/// ```
///
/// The weight of `x_i` is only final once `tau_{i+1} theta_{i+1}` is known, so
/// the latest primal iterate is held as pending.
#[derive(Debug, Clone)]
pub struct ErgodicAccumulator {
    k: usize,
    s: f64,
    settled: Vec<f64>,
    pending_x: Vec<f64>,
    pending_weight: f64,
    y_sum: Vec<f64>,
}

impl ErgodicAccumulator {
    pub fn new(primal_dim: usize, dual_dim: usize) -> Self {
        Self {
            k: 0,
            s: 0.0,
            settled: vec![0.0; primal_dim],
            pending_x: vec![0.0; primal_dim],
            pending_weight: 0.0,
            y_sum: vec![0.0; dual_dim],
        }
    }

    /// Feeds iteration `k` (which must be the next one): `x_k` and the dual
    /// iterate `y_{k+1}` produced with stepsize `tau_k` and ratio `theta_k`.
    pub fn update(&mut self, k: usize, tau: f64, theta: f64, x: &[f64], y_next: &[f64]) -> Result<()> {
        if k != self.k + 1 {
            return Err(Error::OutOfOrder {
                expected: self.k + 1,
                got: k,
            });
        }
        ensure_len("ergodic primal", self.settled.len(), x.len())?;
        ensure_len("ergodic dual", self.y_sum.len(), y_next.len())?;
        if self.k > 0 {
            let w = self.pending_weight - tau * theta;
            if w < -WEIGHT_SLACK * self.pending_weight {
                return Err(Error::NegativeWeight { k: self.k, weight: w });
            }
            for (s, p) in self.settled.iter_mut().zip(&self.pending_x) {
                *s += w * p;
            }
        }
        self.pending_x.copy_from_slice(x);
        self.pending_weight = tau * (1.0 + theta);
        self.s += tau;
        for (s, y) in self.y_sum.iter_mut().zip(y_next) {
            *s += tau * y;
        }
        self.k = k;
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn weight_sum(&self) -> f64 {
        self.s
    }

    pub fn x_bar(&self) -> Vec<f64> {
        self.settled
            .iter()
            .zip(&self.pending_x)
            .map(|(s, p)| (s + self.pending_weight * p) / self.s)
            .collect()
    }

    pub fn y_bar(&self) -> Vec<f64> {
        self.y_sum.iter().map(|v| v / self.s).collect()
    }
}
