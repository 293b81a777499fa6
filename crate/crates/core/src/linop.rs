//! Linear operators `A` with their adjoints and operator-norm certificates.
//!
//! Images are vectorized row-major: pixel `(i, j)` of an `h x w` image lives
//! at index `i * w + j`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{ensure_len, Error, Result};
use crate::sparse::CsrMatrix;
use crate::vecops;

/// Default cap (in matrix entries) for dense materialization.
pub const DENSE_CAP: usize = 4096 * 4096;

/// Layout of the 2-D forward-difference operator: all horizontal differences
/// first, then all vertical ones, each in row-major pixel order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GradientLayout {
    pub height: usize,
    pub width: usize,
}

impl GradientLayout {
    pub fn pixels(&self) -> usize {
        self.height * self.width
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    Dense(DenseMatrix),
    Sparse(CsrMatrix),
    Identity,
    Zero,
    /// Row selection of the identity: keeps `indices` (sorted, distinct).
    Mask(Vec<usize>),
    Gradient(GradientLayout),
    /// `outer(inner(x))`
    Composition(Box<LinearOperator>, Box<LinearOperator>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    in_dim: usize,
    out_dim: usize,
    kind: OperatorKind,
    norm_hint: Option<f64>,
}

/// Options for [`LinearOperator::operator_norm`].
#[derive(Debug, Clone, Copy)]
pub struct NormOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
    /// Multiplier applied to the power-iteration estimate. `None` means
    /// `1 + 10 * tol`.
    pub safety_factor: Option<f64>,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 10_000,
            seed: 0,
            safety_factor: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    /// Upper bound handed to the solvers.
    pub certified: f64,
    /// Raw power-iteration value (equal to `certified` for exact hints).
    pub estimate: f64,
    pub iterations: usize,
    pub from_hint: bool,
}

impl LinearOperator {
    pub fn dense(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        ensure_len("dense operator data", rows * cols, data.len())?;
        Ok(Self {
            in_dim: cols,
            out_dim: rows,
            kind: OperatorKind::Dense(DenseMatrix { rows, cols, data }),
            norm_hint: None,
        })
    }

    pub fn sparse(m: CsrMatrix) -> Self {
        Self {
            in_dim: m.cols(),
            out_dim: m.rows(),
            kind: OperatorKind::Sparse(m),
            norm_hint: None,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            in_dim: n,
            out_dim: n,
            kind: OperatorKind::Identity,
            norm_hint: Some(1.0),
        }
    }

    pub fn zero(out_dim: usize, in_dim: usize) -> Self {
        Self {
            in_dim,
            out_dim,
            kind: OperatorKind::Zero,
            norm_hint: Some(0.0),
        }
    }

    /// Selects `indices` of a length-`dim` vector, in index order.
    pub fn mask(dim: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("mask indices must be distinct".into()));
        }
        if let Some(&last) = indices.last() {
            if last >= dim {
                return Err(Error::InvalidArgument(format!(
                    "mask index {last} out of range for dimension {dim}"
                )));
            }
        }
        let hint = if indices.is_empty() { 0.0 } else { 1.0 };
        Ok(Self {
            in_dim: dim,
            out_dim: indices.len(),
            kind: OperatorKind::Mask(indices),
            norm_hint: Some(hint),
        })
    }

    /// Forward differences with Neumann boundary on an `height x width` image.
    pub fn gradient(height: usize, width: usize) -> Self {
        let layout = GradientLayout { height, width };
        Self {
            in_dim: layout.pixels(),
            out_dim: 2 * layout.pixels(),
            kind: OperatorKind::Gradient(layout),
            norm_hint: Some(8f64.sqrt()),
        }
    }

    /// `outer ∘ inner`
    pub fn compose(outer: LinearOperator, inner: LinearOperator) -> Result<Self> {
        ensure_len("composition", outer.in_dim, inner.out_dim)?;
        Ok(Self {
            in_dim: inner.in_dim,
            out_dim: outer.out_dim,
            kind: OperatorKind::Composition(Box::new(outer), Box::new(inner)),
            norm_hint: None,
        })
    }

    /// Attaches a caller-certified upper bound on `||A||`.
    pub fn with_norm_hint(mut self, bound: f64) -> Self {
        self.norm_hint = Some(bound);
        self
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn norm_hint(&self) -> Option<f64> {
        self.norm_hint
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, OperatorKind::Identity)
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            OperatorKind::Dense(_) => "dense",
            OperatorKind::Sparse(_) => "sparse-csr",
            OperatorKind::Identity => "identity",
            OperatorKind::Zero => "zero",
            OperatorKind::Mask(_) => "mask",
            OperatorKind::Gradient(_) => "discrete-gradient",
            OperatorKind::Composition(..) => "composition",
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.out_dim];
        self.apply_into(x, &mut out)?;
        Ok(out)
    }

    pub fn adjoint_apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.in_dim];
        self.adjoint_apply_into(y, &mut out)?;
        Ok(out)
    }

    /// `out = A x`
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        ensure_len("apply input", self.in_dim, x.len())?;
        ensure_len("apply output", self.out_dim, out.len())?;
        match &self.kind {
            OperatorKind::Dense(m) => {
                for (r, o) in out.iter_mut().enumerate() {
                    *o = vecops::dot(&m.data[r * m.cols..(r + 1) * m.cols], x);
                }
            }
            OperatorKind::Sparse(m) => m.mul_vec_into(x, out),
            OperatorKind::Identity => out.copy_from_slice(x),
            OperatorKind::Zero => out.fill(0.0),
            OperatorKind::Mask(idx) => {
                for (o, &i) in out.iter_mut().zip(idx) {
                    *o = x[i];
                }
            }
            OperatorKind::Gradient(layout) => gradient_forward(*layout, x, out),
            OperatorKind::Composition(outer, inner) => {
                let mid = inner.apply(x)?;
                outer.apply_into(&mid, out)?;
            }
        }
        Ok(())
    }

    /// `out = A^T y`
    pub fn adjoint_apply_into(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        ensure_len("adjoint input", self.out_dim, y.len())?;
        ensure_len("adjoint output", self.in_dim, out.len())?;
        match &self.kind {
            OperatorKind::Dense(m) => {
                out.fill(0.0);
                for (r, &yr) in y.iter().enumerate() {
                    vecops::axpy(yr, &m.data[r * m.cols..(r + 1) * m.cols], out);
                }
            }
            OperatorKind::Sparse(m) => m.mul_t_vec_into(y, out),
            OperatorKind::Identity => out.copy_from_slice(y),
            OperatorKind::Zero => out.fill(0.0),
            OperatorKind::Mask(idx) => {
                out.fill(0.0);
                for (&v, &i) in y.iter().zip(idx) {
                    out[i] = v;
                }
            }
            OperatorKind::Gradient(layout) => gradient_adjoint(*layout, y, out),
            OperatorKind::Composition(outer, inner) => {
                let mid = outer.adjoint_apply(y)?;
                inner.adjoint_apply_into(&mid, out)?;
            }
        }
        Ok(())
    }

    /// Row-major dense copy of the operator (`out_dim x in_dim`).
    pub fn to_dense(&self, cap: usize) -> Result<DenseMatrix> {
        let (rows, cols) = (self.out_dim, self.in_dim);
        if rows.saturating_mul(cols) > cap {
            return Err(Error::CertificateUnavailable { rows, cols, cap });
        }
        if let OperatorKind::Dense(m) = &self.kind {
            return Ok(m.clone());
        }
        let mut data = vec![0.0; rows * cols];
        let mut e = vec![0.0; cols];
        let mut col = vec![0.0; rows];
        for j in 0..cols {
            e[j] = 1.0;
            self.apply_into(&e, &mut col)?;
            e[j] = 0.0;
            for (i, v) in col.iter().enumerate() {
                data[i * cols + j] = *v;
            }
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Upper bound on `||A||` suitable for the stepsize rules.
    ///
    /// Kinds with a known norm return it directly (`sqrt(8)` for the discrete
    /// gradient is a bound, not the exact value). Everything else runs seeded
    /// power iteration on `A^T A` and inflates the result by the safety factor.
    pub fn operator_norm(&self, opts: &NormOptions) -> Result<f64> {
        Ok(self.estimate_norm(opts)?.certified)
    }

    pub fn estimate_norm(&self, opts: &NormOptions) -> Result<NormEstimate> {
        if self.in_dim == 0 || self.out_dim == 0 {
            return Err(Error::InvalidArgument(
                "operator norm of a zero-dimensional operator".into(),
            ));
        }
        if let Some(h) = self.norm_hint {
            return Ok(NormEstimate {
                certified: h,
                estimate: h,
                iterations: 0,
                from_hint: true,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut v: Vec<f64> = (0..self.in_dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let n0 = vecops::norm(&v);
        v.iter_mut().for_each(|x| *x /= n0);

        let mut w = vec![0.0; self.out_dim];
        let mut u = vec![0.0; self.in_dim];
        let mut lambda = 0.0;
        let mut iterations = 0;
        for it in 1..=opts.max_iters {
            iterations = it;
            self.apply_into(&v, &mut w)?;
            self.adjoint_apply_into(&w, &mut u)?;
            let next = vecops::norm_sq(&w);
            if !next.is_finite() {
                return Err(Error::NonFinite("power iteration".into()));
            }
            let un = vecops::norm(&u);
            if un == 0.0 {
                lambda = next;
                break;
            }
            let converged = it > 1 && (next - lambda).abs() <= opts.tol * next;
            lambda = next;
            if converged {
                break;
            }
            for (vi, ui) in v.iter_mut().zip(&u) {
                *vi = ui / un;
            }
        }
        let estimate = lambda.sqrt();
        let factor = opts.safety_factor.unwrap_or(1.0 + 10.0 * opts.tol);
        Ok(NormEstimate {
            certified: estimate * factor,
            estimate,
            iterations,
            from_hint: false,
        })
    }

    /// Smallest singular value via the eigenvalues of the smaller Gram matrix
    /// (`A A^T` when `out_dim <= in_dim`). Only for small instances.
    pub fn smallest_singular_value(&self, cap: usize) -> Result<f64> {
        if self.in_dim == 0 || self.out_dim == 0 {
            return Err(Error::InvalidArgument(
                "singular value of a zero-dimensional operator".into(),
            ));
        }
        let dense = self.to_dense(cap)?;
        let a = DMatrix::from_row_slice(dense.rows, dense.cols, &dense.data);
        let gram = if dense.rows <= dense.cols {
            &a * a.transpose()
        } else {
            a.transpose() * &a
        };
        let eig = SymmetricEigen::new(gram);
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if !min.is_finite() {
            return Err(Error::NonFinite("singular value decomposition".into()));
        }
        Ok(min.max(0.0).sqrt())
    }
}

fn gradient_forward(layout: GradientLayout, x: &[f64], out: &mut [f64]) {
    let GradientLayout { height: h, width: w } = layout;
    let n = h * w;
    let (horiz, vert) = out.split_at_mut(n);
    for i in 0..h {
        for j in 0..w {
            let p = i * w + j;
            horiz[p] = if j + 1 < w { x[p + 1] - x[p] } else { 0.0 };
            vert[p] = if i + 1 < h { x[p + w] - x[p] } else { 0.0 };
        }
    }
}

// Negative divergence matching the forward stencil above.
fn gradient_adjoint(layout: GradientLayout, y: &[f64], out: &mut [f64]) {
    let GradientLayout { height: h, width: w } = layout;
    let n = h * w;
    let (horiz, vert) = y.split_at(n);
    for i in 0..h {
        for j in 0..w {
            let p = i * w + j;
            let mut v = 0.0;
            if j + 1 < w {
                v -= horiz[p];
            }
            if j > 0 {
                v += horiz[p - 1];
            }
            if i + 1 < h {
                v -= vert[p];
            }
            if i > 0 {
                v += vert[p - w];
            }
            out[p] = v;
        }
    }
}
