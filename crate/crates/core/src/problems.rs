//! Smooth objectives `f`, problem assembly, and seeded instance generators
//! for the experiment families (sparse logistic regression, TV inpainting,
//! real phase retrieval, and quadratic certificate instances).

use log::warn;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{ensure_finite, ensure_len, Error, Result};
use crate::linop::{DenseMatrix, LinearOperator, NormOptions};
use crate::prox::{GroupLayout, Regularizer};
use crate::solvers::{cva_run, CvaConfig, StopReason};
use crate::sparse::CsrMatrix;
use crate::vecops;

/// `log(1 + exp(-s))` without overflow.
pub fn log1p_exp_neg(s: f64) -> f64 {
    if s >= 0.0 {
        (-s).exp().ln_1p()
    } else {
        -s + s.exp().ln_1p()
    }
}

/// `1 / (1 + exp(s))` without overflow.
fn sigmoid_neg(s: f64) -> f64 {
    if s >= 0.0 {
        let e = (-s).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + s.exp())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SmoothObjective {
    /// `sum_i log(1 + exp(-b_i <q_i, x>))`
    Logistic { q: CsrMatrix, labels: Vec<f64> },
    /// `1/2 ||P x - b||^2` with `P` a row-selection operator.
    MaskedLeastSquares { mask: LinearOperator, observed: Vec<f64> },
    /// `1/(4m) sum_i (b_i - <a_i, x>^2)^2`, rows of `measurements` are the
    /// vectorized `A_i`.
    PhaseRetrieval {
        measurements: CsrMatrix,
        observed: Vec<f64>,
    },
    /// `1/2 x^T H x + <h, x>`
    Quadratic {
        hessian: DenseMatrix,
        linear: Vec<f64>,
        mu: f64,
        lipschitz: f64,
    },
}

impl SmoothObjective {
    pub fn logistic(q: CsrMatrix, labels: Vec<f64>) -> Result<Self> {
        ensure_len("logistic labels", q.rows(), labels.len())?;
        if q.rows() == 0 || q.cols() == 0 {
            return Err(Error::InvalidArgument("logistic data is empty".into()));
        }
        ensure_finite("logistic data", q.values())?;
        if let Some(bad) = labels.iter().find(|&&b| b != 1.0 && b != -1.0) {
            return Err(Error::InvalidArgument(format!(
                "labels must be in {{-1, +1}}, found {bad}"
            )));
        }
        Ok(Self::Logistic { q, labels })
    }

    pub fn masked_least_squares(mask: LinearOperator, observed: Vec<f64>) -> Result<Self> {
        ensure_len("masked observations", mask.out_dim(), observed.len())?;
        ensure_finite("masked observations", &observed)?;
        Ok(Self::MaskedLeastSquares { mask, observed })
    }

    pub fn phase_retrieval(measurements: CsrMatrix, observed: Vec<f64>) -> Result<Self> {
        ensure_len("phase retrieval observations", measurements.rows(), observed.len())?;
        if measurements.rows() == 0 {
            return Err(Error::InvalidArgument(
                "phase retrieval needs m > 0 measurements".into(),
            ));
        }
        ensure_finite("phase retrieval data", measurements.values())?;
        ensure_finite("phase retrieval observations", &observed)?;
        Ok(Self::PhaseRetrieval { measurements, observed })
    }

    /// `H` must be symmetric positive semidefinite.
    pub fn quadratic(hessian: DenseMatrix, linear: Vec<f64>) -> Result<Self> {
        if hessian.rows != hessian.cols {
            return Err(Error::InvalidArgument("hessian must be square".into()));
        }
        ensure_len("quadratic linear term", hessian.rows, linear.len())?;
        ensure_finite("hessian", &hessian.data)?;
        let h = DMatrix::from_row_slice(hessian.rows, hessian.cols, &hessian.data);
        if (&h - h.transpose()).amax() > 1e-12 * h.amax().max(1.0) {
            return Err(Error::InvalidArgument("hessian must be symmetric".into()));
        }
        let eig = SymmetricEigen::new(h).eigenvalues;
        let mu = eig.min();
        let lipschitz = eig.max();
        if mu < -1e-12 * lipschitz.abs().max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "hessian is indefinite (min eigenvalue {mu})"
            )));
        }
        Ok(Self::Quadratic {
            hessian,
            linear,
            mu: mu.max(0.0),
            lipschitz,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Logistic { q, .. } => q.cols(),
            Self::MaskedLeastSquares { mask, .. } => mask.in_dim(),
            Self::PhaseRetrieval { measurements, .. } => measurements.cols(),
            Self::Quadratic { hessian, .. } => hessian.cols,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Logistic { .. } => "logistic",
            Self::MaskedLeastSquares { .. } => "masked-least-squares",
            Self::PhaseRetrieval { .. } => "phase-retrieval",
            Self::Quadratic { .. } => "quadratic",
        }
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self, Self::PhaseRetrieval { .. })
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        ensure_len("objective input", self.dim(), x.len())?;
        Ok(match self {
            Self::Logistic { q, labels } => {
                let mut z = vec![0.0; q.rows()];
                q.mul_vec_into(x, &mut z);
                z.iter().zip(labels).map(|(zi, bi)| log1p_exp_neg(bi * zi)).sum()
            }
            Self::MaskedLeastSquares { mask, observed } => {
                let px = mask.apply(x)?;
                0.5 * vecops::dist_sq(&px, observed)
            }
            Self::PhaseRetrieval { measurements, observed } => {
                let mut s = vec![0.0; measurements.rows()];
                measurements.mul_vec_into(x, &mut s);
                let m = observed.len() as f64;
                s.iter()
                    .zip(observed)
                    .map(|(si, bi)| (bi - si * si).powi(2))
                    .sum::<f64>()
                    / (4.0 * m)
            }
            Self::Quadratic { hessian, linear, .. } => {
                let hx = dense_mul(hessian, x);
                0.5 * vecops::dot(x, &hx) + vecops::dot(linear, x)
            }
        })
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut g = vec![0.0; self.dim()];
        self.value_and_gradient_into(x, &mut g)?;
        Ok(g)
    }

    /// Writes `grad f(x)` into `grad` and returns `f(x)`; shares the
    /// forward product between the two.
    pub fn value_and_gradient_into(&self, x: &[f64], grad: &mut [f64]) -> Result<f64> {
        ensure_len("objective input", self.dim(), x.len())?;
        ensure_len("gradient output", self.dim(), grad.len())?;
        let value = match self {
            Self::Logistic { q, labels } => {
                let mut z = vec![0.0; q.rows()];
                q.mul_vec_into(x, &mut z);
                let mut value = 0.0;
                for (zi, bi) in z.iter_mut().zip(labels) {
                    let s = bi * *zi;
                    value += log1p_exp_neg(s);
                    *zi = -bi * sigmoid_neg(s);
                }
                q.mul_t_vec_into(&z, grad);
                value
            }
            Self::MaskedLeastSquares { mask, observed } => {
                let mut r = mask.apply(x)?;
                for (ri, bi) in r.iter_mut().zip(observed) {
                    *ri -= bi;
                }
                mask.adjoint_apply_into(&r, grad)?;
                0.5 * vecops::norm_sq(&r)
            }
            Self::PhaseRetrieval { measurements, observed } => {
                let mut s = vec![0.0; measurements.rows()];
                measurements.mul_vec_into(x, &mut s);
                let m = observed.len() as f64;
                let mut value = 0.0;
                for (si, bi) in s.iter_mut().zip(observed) {
                    let resid = bi - *si * *si;
                    value += resid * resid;
                    *si = -resid * *si / m;
                }
                measurements.mul_t_vec_into(&s, grad);
                value / (4.0 * m)
            }
            Self::Quadratic { hessian, linear, .. } => {
                let hx = dense_mul(hessian, x);
                let value = 0.5 * vecops::dot(x, &hx) + vecops::dot(linear, x);
                for ((g, h), l) in grad.iter_mut().zip(&hx).zip(linear) {
                    *g = h + l;
                }
                value
            }
        };
        Ok(value)
    }

    /// Global Lipschitz constant of the gradient when one exists and is
    /// computable (`||Q||^2 / 4` for logistic, `1` for masked least squares,
    /// `lambda_max(H)` for quadratics). Phase retrieval has none.
    pub fn global_lipschitz(&self, opts: &NormOptions) -> Result<Option<f64>> {
        Ok(match self {
            Self::Logistic { q, .. } => {
                let n = LinearOperator::sparse(q.clone()).operator_norm(opts)?;
                Some(n * n / 4.0)
            }
            Self::MaskedLeastSquares { mask, .. } => Some(mask.operator_norm(opts)?.powi(2)),
            Self::PhaseRetrieval { .. } => None,
            Self::Quadratic { lipschitz, .. } => Some(*lipschitz),
        })
    }

    /// Exact strong convexity modulus, only known for quadratics.
    pub fn strong_convexity(&self) -> Option<f64> {
        match self {
            Self::Quadratic { mu, .. } => Some(*mu),
            _ => None,
        }
    }
}

fn dense_mul(m: &DenseMatrix, x: &[f64]) -> Vec<f64> {
    (0..m.rows)
        .map(|r| vecops::dot(&m.data[r * m.cols..(r + 1) * m.cols], x))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convexity {
    Convex,
    /// Solvers run heuristically; convexity-dependent checks only warn.
    NonconvexHeuristic,
}

/// Verified saddle point used by the diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub objective: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Row-major grayscale image.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub height: usize,
    pub width: usize,
    pub pixels: Vec<f64>,
}

impl Image {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        ensure_len("image pixels", height * width, pixels.len())?;
        if height == 0 || width == 0 {
            return Err(Error::InvalidArgument("image must be nonempty".into()));
        }
        ensure_finite("image", &pixels)?;
        Ok(Self { height, width, pixels })
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// Deterministic piecewise-constant test image in `[0, 1]`: a background,
    /// an off-center rectangle, a disk and a thin bar.
    pub fn piecewise_constant(height: usize, width: usize) -> Self {
        let (h, w) = (height as f64, width as f64);
        let mut pixels = vec![0.2; height * width];
        for i in 0..height {
            for j in 0..width {
                let (y, x) = (i as f64 + 0.5, j as f64 + 0.5);
                let p = &mut pixels[i * width + j];
                if y > 0.15 * h && y < 0.55 * h && x > 0.1 * w && x < 0.5 * w {
                    *p = 0.8;
                }
                let (dy, dx) = (y - 0.65 * h, x - 0.65 * w);
                if dy * dy + dx * dx < (0.22 * h.min(w)).powi(2) {
                    *p = 0.55;
                }
                if x > 0.8 * w && x < 0.9 * w && y > 0.1 * h {
                    *p = 1.0;
                }
            }
        }
        Self { height, width, pixels }
    }
}

/// Ground-truth image attached to imaging problems.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageInfo {
    pub truth: Image,
    /// Kept pixel indices for inpainting problems.
    pub kept: Option<Vec<usize>>,
}

/// `min_x max_y <A x, y> + f(x) - g*(y)`
#[derive(Debug, Clone)]
pub struct SaddleProblem {
    pub f: SmoothObjective,
    pub reg: Regularizer,
    pub op: LinearOperator,
    pub reference: Option<ReferenceSolution>,
    pub convexity: Convexity,
    pub image: Option<ImageInfo>,
}

impl SaddleProblem {
    pub fn new(f: SmoothObjective, reg: Regularizer, op: LinearOperator, convexity: Convexity) -> Result<Self> {
        ensure_len("operator input vs objective", f.dim(), op.in_dim())?;
        if let Some(d) = reg.fixed_dim() {
            ensure_len("regularizer vs operator output", op.out_dim(), d)?;
        }
        Ok(Self {
            f,
            reg,
            op,
            reference: None,
            convexity,
            image: None,
        })
    }

    pub fn primal_dim(&self) -> usize {
        self.op.in_dim()
    }

    pub fn dual_dim(&self) -> usize {
        self.op.out_dim()
    }

    pub fn is_convex(&self) -> bool {
        self.convexity == Convexity::Convex
    }

    /// `F(x) = f(x) + g(A x)`
    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        Ok(self.f.value(x)? + self.reg.value(&self.op.apply(x)?))
    }

    /// Optimality residuals `(||grad f(x) + A^T y||, ||y - prox_{sigma g*}(y + sigma A x)|| / sigma)`.
    pub fn residuals(&self, x: &[f64], y: &[f64], sigma: f64) -> Result<(f64, f64)> {
        let mut r = self.f.gradient(x)?;
        vecops::axpy(1.0, &self.op.adjoint_apply(y)?, &mut r);
        let ax = self.op.apply(x)?;
        let mut z: Vec<f64> = y.iter().zip(&ax).map(|(yi, ai)| yi + sigma * ai).collect();
        self.reg.prox_g_conj_in_place(sigma, &mut z)?;
        Ok((vecops::norm(&r), vecops::dist(y, &z) / sigma))
    }

    /// `||x - x*||^2 + (1/beta) ||y - y*||^2`
    pub fn energy(&self, x: &[f64], y: &[f64], beta: f64) -> Option<f64> {
        self.reference
            .as_ref()
            .map(|r| vecops::dist_sq(x, &r.x) + vecops::dist_sq(y, &r.y) / beta)
    }
}

/// Protocol for reference saddle points: a long fixed-stepsize Condat-Vu run
/// with `tau = 1/(||A||/p + L)`, `sigma = 1/(p ||A||)`, accepted only if the
/// final residual is below `gate`.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceOptions {
    pub max_iters: usize,
    /// Early stop threshold (tighter than the gate).
    pub tol: f64,
    pub gate: f64,
    pub p: f64,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        Self {
            max_iters: 100_000,
            tol: 1e-13,
            gate: 1e-10,
            p: 1.0,
        }
    }
}

pub fn compute_reference(problem: &SaddleProblem, opts: &ReferenceOptions) -> Result<ReferenceSolution> {
    if !problem.is_convex() {
        return Err(Error::InvalidArgument(
            "reference solutions need a convex problem".into(),
        ));
    }
    let norm_opts = NormOptions::default();
    let lipschitz = problem
        .f
        .global_lipschitz(&norm_opts)?
        .ok_or(Error::Missing("global Lipschitz constant for the reference run"))?;
    let norm_a = problem.op.operator_norm(&norm_opts)?;
    let (tau, sigma) = if norm_a > 0.0 {
        (1.0 / (norm_a / opts.p + lipschitz), 1.0 / (opts.p * norm_a))
    } else {
        (1.0 / lipschitz.max(f64::MIN_POSITIVE), 1.0)
    };
    let config = CvaConfig {
        tau,
        sigma,
        lipschitz,
        norm_a,
        max_iters: opts.max_iters,
        residual_tol: opts.tol,
        override_gate: false,
    };
    let x0 = vec![0.0; problem.primal_dim()];
    let y0 = vec![0.0; problem.dual_dim()];
    let out = cva_run(problem, &x0, &y0, &config, |_| {})?;
    let (rp, rd) = problem.residuals(&out.x, &out.y, sigma)?;
    let residual = (rp * rp + rd * rd).sqrt();
    if !(residual <= opts.gate) {
        return Err(Error::ReferenceGate {
            residual,
            gate: opts.gate,
            iterations: out.summary.iterations,
        });
    }
    if out.summary.stop == StopReason::MaxIters {
        warn!("reference run hit max_iters with residual {residual:.3e}");
    }
    Ok(ReferenceSolution {
        objective: problem.objective(&out.x)?,
        x: out.x,
        y: out.y,
        residual,
        iterations: out.summary.iterations,
    })
}

/// Sparse logistic regression with `A = I` and `g = lambda ||.||_1`,
/// `lambda = lambda_frac * ||Q^T b||_inf`.
pub fn make_logistic_problem(q: CsrMatrix, labels: Vec<f64>, lambda_frac: f64) -> Result<SaddleProblem> {
    if !(lambda_frac > 0.0) {
        return Err(Error::InvalidArgument("lambda_frac must be positive".into()));
    }
    let f = SmoothObjective::logistic(q, labels)?;
    let SmoothObjective::Logistic { q, labels } = &f else {
        unreachable!()
    };
    let mut qtb = vec![0.0; q.cols()];
    q.mul_t_vec_into(labels, &mut qtb);
    let lambda = lambda_frac * vecops::norm_inf(&qtb);
    let d = f.dim();
    SaddleProblem::new(
        f,
        Regularizer::l1(lambda)?,
        LinearOperator::identity(d),
        Convexity::Convex,
    )
}

/// Dense Gaussian features with labels from a noisy planted linear model.
pub fn synthetic_logistic_data(m: usize, d: usize, seed: u64) -> Result<(CsrMatrix, Vec<f64>)> {
    if m == 0 || d == 0 {
        return Err(Error::InvalidArgument("synthetic logistic data needs m, d > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..d)
        .map(|j| {
            if j % 5 == 0 {
                StandardNormal.sample(&mut rng)
            } else {
                0.0
            }
        })
        .collect();
    let data: Vec<f64> = (0..m * d).map(|_| StandardNormal.sample(&mut rng)).collect();
    let labels = (0..m)
        .map(|i| {
            let noise: f64 = StandardNormal.sample(&mut rng);
            let s = vecops::dot(&data[i * d..(i + 1) * d], &w) + 0.5 * noise;
            if s >= 0.0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    Ok((CsrMatrix::from_dense(m, d, &data)?, labels))
}

/// TV inpainting: `1/2 ||b - P_Omega x||^2 + lambda ||D x||_{2,1}` with a
/// seeded uniform mask keeping `ceil(keep_ratio * h * w)` pixels.
pub fn make_inpainting_problem(image: &Image, keep_ratio: f64, lambda: f64, seed: u64) -> Result<SaddleProblem> {
    if !(keep_ratio > 0.0 && keep_ratio <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "keep_ratio must be in (0, 1], got {keep_ratio}"
        )));
    }
    let n = image.len();
    let keep = (keep_ratio * n as f64).ceil() as usize;
    if keep == 0 {
        return Err(Error::InvalidArgument("mask keeps no pixels".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kept = index::sample(&mut rng, n, keep.min(n)).into_vec();
    kept.sort_unstable();
    let observed: Vec<f64> = kept.iter().map(|&i| image.pixels[i]).collect();
    let mask = LinearOperator::mask(n, kept.clone())?;
    let f = SmoothObjective::masked_least_squares(mask, observed)?;
    let reg = Regularizer::group_l21(lambda, GroupLayout::pixel_pairs(n))?;
    let mut p = SaddleProblem::new(
        f,
        reg,
        LinearOperator::gradient(image.height, image.width),
        Convexity::Convex,
    )?;
    p.image = Some(ImageInfo {
        truth: image.clone(),
        kept: Some(kept),
    });
    Ok(p)
}

/// `ceil(d * log10(d))` measurements.
pub fn default_measurement_count(d: usize) -> usize {
    ((d as f64) * (d as f64).log10()).ceil().max(1.0) as usize
}

/// Real phase retrieval with TV regularization. Measurement matrices are
/// sparse Gaussian at the given density, `b_i = <A_i, X>^2`, and a seeded
/// `round(corrupt_frac * m)` subset of `b` is set to zero.
pub fn make_phase_retrieval_problem(
    image: &Image,
    m: usize,
    density: f64,
    corrupt_frac: f64,
    lambda: f64,
    seed: u64,
) -> Result<SaddleProblem> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "phase retrieval needs m > 0 measurements".into(),
        ));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "density must be in (0, 1], got {density}"
        )));
    }
    if !(0.0..1.0).contains(&corrupt_frac) {
        return Err(Error::InvalidArgument(format!(
            "corrupt_frac must be in [0, 1), got {corrupt_frac}"
        )));
    }
    let d = image.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<(usize, f64)>> = (0..m)
        .map(|_| {
            (0..d)
                .filter_map(|j| {
                    let keep = rng.random::<f64>() < density;
                    keep.then(|| (j, StandardNormal.sample(&mut rng)))
                })
                .collect()
        })
        .collect();
    let measurements = CsrMatrix::from_rows(d, &rows)?;
    let mut observed = vec![0.0; m];
    measurements.mul_vec_into(&image.pixels, &mut observed);
    observed.iter_mut().for_each(|s| *s *= *s);
    let corrupt = (corrupt_frac * m as f64).round() as usize;
    for i in index::sample(&mut rng, m, corrupt.min(m)) {
        observed[i] = 0.0;
    }
    let f = SmoothObjective::phase_retrieval(measurements, observed)?;
    let reg = Regularizer::group_l21(lambda, GroupLayout::pixel_pairs(d))?;
    let mut p = SaddleProblem::new(
        f,
        reg,
        LinearOperator::gradient(image.height, image.width),
        Convexity::NonconvexHeuristic,
    )?;
    p.image = Some(ImageInfo {
        truth: image.clone(),
        kept: None,
    });
    Ok(p)
}

/// Regularization weight used by the quadratic certificate instances.
pub const QUADRATIC_TEST_LAMBDA: f64 = 0.25;

/// Strongly convex quadratic `f = 1/2 x^T H x - c^T x` with spectrum of `H`
/// spread evenly over `[mu, L]`, a random dense full-row-rank `A`
/// (`dim_y x dim_x`), `g = lambda ||.||_1`, and a verified reference
/// saddle point.
pub fn make_quadratic_testproblem(
    dim_x: usize,
    dim_y: usize,
    mu: f64,
    lipschitz: f64,
    seed: u64,
) -> Result<SaddleProblem> {
    if !(mu > 0.0) || !(mu <= lipschitz) {
        return Err(Error::InvalidArgument(format!(
            "need 0 < mu <= L, got mu={mu}, L={lipschitz}"
        )));
    }
    if dim_x == 0 || dim_y == 0 || dim_y > dim_x {
        return Err(Error::InvalidArgument(format!(
            "need 0 < dim_y <= dim_x for a full-row-rank coupling, got {dim_y}x{dim_x}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaussian = |n: usize| -> Vec<f64> { (0..n).map(|_| StandardNormal.sample(&mut rng)).collect() };

    let g = DMatrix::from_row_slice(dim_x, dim_x, &gaussian(dim_x * dim_x));
    let q = g.qr().q();
    let spectrum = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim_x, |i, _| {
        if dim_x == 1 {
            mu
        } else {
            mu + (lipschitz - mu) * i as f64 / (dim_x - 1) as f64
        }
    }));
    let h = &q * spectrum * q.transpose();
    let h = (&h + h.transpose()) * 0.5;
    let hessian = DenseMatrix {
        rows: dim_x,
        cols: dim_x,
        data: h.transpose().as_slice().to_vec(),
    };
    let c = gaussian(dim_x);
    let a = gaussian(dim_y * dim_x);
    let linear: Vec<f64> = c.iter().map(|v| -v).collect();

    let f = SmoothObjective::quadratic(hessian, linear)?;
    let op = LinearOperator::dense(dim_y, dim_x, a)?;
    let mut p = SaddleProblem::new(f, Regularizer::l1(QUADRATIC_TEST_LAMBDA)?, op, Convexity::Convex)?;
    p.reference = Some(compute_reference(&p, &ReferenceOptions::default())?);
    Ok(p)
}
