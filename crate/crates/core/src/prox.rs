//! Regularizers `g` and the proximal maps of `g` and its conjugate `g*`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_len, Error, Result};
use crate::vecops;

/// Relative slack used when testing membership of the dual ball.
const FEASIBILITY_SLACK: f64 = 1e-12;

/// Strided grouping: group `j` holds indices `j, j + groups, j + 2*groups, ...`
/// (`group_size` entries). For the discrete gradient this pairs the
/// horizontal and vertical difference of each pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupLayout {
    pub groups: usize,
    pub group_size: usize,
}

impl GroupLayout {
    pub fn pixel_pairs(pixels: usize) -> Self {
        Self {
            groups: pixels,
            group_size: 2,
        }
    }

    pub fn dim(&self) -> usize {
        self.groups * self.group_size
    }

    fn norm_of(&self, z: &[f64], j: usize) -> f64 {
        (0..self.group_size)
            .map(|t| z[j + t * self.groups].powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn scale(&self, z: &mut [f64], j: usize, factor: f64) {
        for t in 0..self.group_size {
            z[j + t * self.groups] *= factor;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegularizerKind {
    /// `lambda * ||z||_1`
    L1,
    /// `lambda * sum_G ||z_G||_2` (isotropic TV when composed with the gradient)
    GroupL21(GroupLayout),
    /// `g = 0`, so `g*` is the indicator of `{0}`
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularizer {
    pub kind: RegularizerKind,
    pub lambda: f64,
}

impl Regularizer {
    pub fn l1(lambda: f64) -> Result<Self> {
        Self::new(RegularizerKind::L1, lambda)
    }

    pub fn group_l21(lambda: f64, layout: GroupLayout) -> Result<Self> {
        Self::new(RegularizerKind::GroupL21(layout), lambda)
    }

    pub fn zero() -> Self {
        Self {
            kind: RegularizerKind::Zero,
            lambda: 0.0,
        }
    }

    pub fn new(kind: RegularizerKind, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "regularization weight must be finite and nonnegative, got {lambda}"
            )));
        }
        Ok(Self { kind, lambda })
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            RegularizerKind::L1 => "l1",
            RegularizerKind::GroupL21(_) => "group-l2-1",
            RegularizerKind::Zero => "zero",
        }
    }

    /// Dimension the regularizer is tied to, if any.
    pub fn fixed_dim(&self) -> Option<usize> {
        match self.kind {
            RegularizerKind::GroupL21(layout) => Some(layout.dim()),
            _ => None,
        }
    }

    fn check(&self, z: &[f64]) -> Result<()> {
        if let Some(d) = self.fixed_dim() {
            ensure_len("group layout", d, z.len())?;
        }
        ensure_finite("proximal input", z)
    }

    /// `g(z)`
    pub fn value(&self, z: &[f64]) -> f64 {
        match self.kind {
            RegularizerKind::L1 => self.lambda * z.iter().map(|v| v.abs()).sum::<f64>(),
            RegularizerKind::GroupL21(layout) => {
                self.lambda * (0..layout.groups).map(|j| layout.norm_of(z, j)).sum::<f64>()
            }
            RegularizerKind::Zero => 0.0,
        }
    }

    /// `g*(y)`: zero on the dual ball, `+inf` outside it.
    pub fn conj_value(&self, y: &[f64]) -> f64 {
        let radius = self.lambda * (1.0 + FEASIBILITY_SLACK) + f64::EPSILON;
        let feasible = match self.kind {
            RegularizerKind::L1 => vecops::norm_inf(y) <= radius,
            RegularizerKind::GroupL21(layout) => (0..layout.groups).all(|j| layout.norm_of(y, j) <= radius),
            RegularizerKind::Zero => y.iter().all(|&v| v == 0.0),
        };
        if feasible {
            0.0
        } else {
            f64::INFINITY
        }
    }

    /// `prox_{t g}(z)`
    pub fn prox_g(&self, t: f64, z: &[f64]) -> Result<Vec<f64>> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("prox step must be positive, got {t}")));
        }
        self.check(z)?;
        let mut out = z.to_vec();
        let thresh = t * self.lambda;
        match self.kind {
            RegularizerKind::L1 => {
                for v in &mut out {
                    *v = v.signum() * (v.abs() - thresh).max(0.0);
                }
            }
            RegularizerKind::GroupL21(layout) => {
                for j in 0..layout.groups {
                    let n = layout.norm_of(&out, j);
                    let factor = if n == 0.0 { 0.0 } else { (1.0 - thresh / n).max(0.0) };
                    layout.scale(&mut out, j, factor);
                }
            }
            RegularizerKind::Zero => {}
        }
        Ok(out)
    }

    /// `prox_{sigma g*}(z)`: projection onto the dual ball, which does not
    /// depend on `sigma` for these kinds.
    pub fn prox_g_conj(&self, sigma: f64, z: &[f64]) -> Result<Vec<f64>> {
        let mut out = z.to_vec();
        self.prox_g_conj_in_place(sigma, &mut out)?;
        Ok(out)
    }

    pub fn prox_g_conj_in_place(&self, sigma: f64, z: &mut [f64]) -> Result<()> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "dual step must be positive, got {sigma}"
            )));
        }
        self.check(z)?;
        let lambda = self.lambda;
        match self.kind {
            RegularizerKind::L1 => {
                for v in z.iter_mut() {
                    *v = v.clamp(-lambda, lambda);
                }
            }
            RegularizerKind::GroupL21(layout) => {
                for j in 0..layout.groups {
                    let n = layout.norm_of(z, j);
                    if n == 0.0 {
                        layout.scale(z, j, 0.0);
                    } else if n > lambda {
                        layout.scale(z, j, lambda / n);
                    }
                }
            }
            RegularizerKind::Zero => z.fill(0.0),
        }
        Ok(())
    }

    /// `z - sigma * prox_{g/sigma}(z/sigma)`, the Moreau-identity route to the
    /// conjugate prox. Kept as a cross-check for [`Regularizer::prox_g_conj`].
    pub fn prox_conj_via_moreau(&self, sigma: f64, z: &[f64]) -> Result<Vec<f64>> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "dual step must be positive, got {sigma}"
            )));
        }
        let scaled = vecops::scale(1.0 / sigma, z);
        let p = self.prox_g(1.0 / sigma, &scaled)?;
        Ok(z.iter().zip(&p).map(|(zi, pi)| zi - sigma * pi).collect())
    }
}
