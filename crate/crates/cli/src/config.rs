//! JSON experiment configuration.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub solvers: Vec<SolverSpec>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Starting point: zeros, or standard normal draws from the seed.
    #[serde(default)]
    pub init: Option<InitKind>,
    /// Compute a reference saddle point (convex problems only) so traces
    /// carry the energy column and gap certificates can be evaluated.
    #[serde(default)]
    pub reference: bool,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_record_every() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    Zeros,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// l1-regularized logistic regression; `data` is a LIBSVM file, otherwise
    /// a synthetic `m x d` Gaussian design is generated from the seed.
    Logistic {
        #[serde(default)]
        data: Option<PathBuf>,
        #[serde(default)]
        m: Option<usize>,
        #[serde(default)]
        d: Option<usize>,
        #[serde(default = "default_lambda_frac")]
        lambda_frac: f64,
    },
    /// TV inpainting of a PGM image or of the synthetic piecewise-constant image.
    Inpainting {
        #[serde(default)]
        image: Option<PathBuf>,
        #[serde(default)]
        height: Option<usize>,
        #[serde(default)]
        width: Option<usize>,
        keep_ratio: f64,
        lambda: f64,
    },
    /// TV-regularized real phase retrieval; `measurements` defaults to
    /// `ceil(d log10 d)`.
    PhaseRetrieval {
        #[serde(default)]
        image: Option<PathBuf>,
        #[serde(default)]
        height: Option<usize>,
        #[serde(default)]
        width: Option<usize>,
        #[serde(default)]
        measurements: Option<usize>,
        density: f64,
        corrupt_frac: f64,
        lambda: f64,
    },
    /// Strongly convex quadratic with dense coupling and l1 dual term.
    Quadratic {
        dim_x: usize,
        dim_y: usize,
        mu: f64,
        lipschitz: f64,
    },
}

fn default_lambda_frac() -> f64 {
    0.005
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SolverSpec {
    Apda(ApdaSpec),
    ApdaSc(ApdaSpec),
    /// Either explicit `tau`/`sigma`, or the ratio form `p` with
    /// `tau = 1/(||A||/p + L)`, `sigma = 1/(p ||A||)` (default `p = 1`).
    Cva {
        #[serde(default)]
        tau: Option<f64>,
        #[serde(default)]
        sigma: Option<f64>,
        #[serde(default)]
        p: Option<f64>,
        max_iters: usize,
        #[serde(default)]
        residual_tol: f64,
        #[serde(default)]
        override_gate: bool,
    },
    Fista {
        max_iters: usize,
        #[serde(default)]
        residual_tol: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApdaSpec {
    pub beta: f64,
    pub max_iters: usize,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub tau_init: Option<f64>,
    #[serde(default)]
    pub residual_tol: f64,
}

impl SolverSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Apda(_) => "apda",
            Self::ApdaSc(_) => "apda-sc",
            Self::Cva { .. } => "cva",
            Self::Fista { .. } => "fista",
        }
    }

    /// Whether a sweep over `param` applies to this solver.
    pub fn sweeps(&self, param: SweepParam) -> bool {
        matches!(
            (self, param),
            (Self::Apda(_) | Self::ApdaSc(_), SweepParam::Beta)
                | (Self::Cva { .. }, SweepParam::P | SweepParam::Tau | SweepParam::Sigma)
        )
    }

    /// Copy with the swept parameter set to `value`.
    pub fn with_param(&self, param: SweepParam, value: f64) -> Self {
        let mut s = self.clone();
        match (&mut s, param) {
            (Self::Apda(a) | Self::ApdaSc(a), SweepParam::Beta) => a.beta = value,
            (Self::Cva { p, tau, sigma, .. }, SweepParam::P) => {
                *p = Some(value);
                *tau = None;
                *sigma = None;
            }
            (Self::Cva { tau, .. }, SweepParam::Tau) => *tau = Some(value),
            (Self::Cva { sigma, .. }, SweepParam::Sigma) => *sigma = Some(value),
            _ => {}
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParam {
    /// APDA dual/primal ratio
    Beta,
    /// CVA ratio parametrization (first tuning phase)
    P,
    /// CVA free primal stepsize (second phase; `sigma` fixed in the solver spec)
    Tau,
    /// CVA free dual stepsize (second phase; `tau` fixed in the solver spec)
    Sigma,
}

impl SweepParam {
    /// Default log-spaced range for sweeps given on the command line.
    pub fn default_range(&self) -> (f64, f64) {
        match self {
            Self::Beta | Self::P => (1e-3, 1e3),
            Self::Tau | Self::Sigma => (1e-4, 1e2),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Beta => "beta",
            Self::P => "p",
            Self::Tau => "tau",
            Self::Sigma => "sigma",
        }
    }
}

/// `count` log-spaced points from `min` to `max`, inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let (lo, hi) = (self.min.log10(), self.max.log10());
        (0..self.count)
            .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (self.count - 1) as f64))
            .collect()
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses and validates; relative data paths resolve against the config
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: Self = serde_json::from_str(&text)?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = dir.join(&*path);
                }
            }
        };
        match &mut self.problem {
            ProblemSpec::Logistic { data, .. } => fix(data),
            ProblemSpec::Inpainting { image, .. } | ProblemSpec::PhaseRetrieval { image, .. } => fix(image),
            ProblemSpec::Quadratic { .. } => {}
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.solvers.is_empty() {
            return bad("at least one solver is required".into());
        }
        if self.record_every == 0 {
            return bad("record_every must be positive".into());
        }
        if let Some(s) = &self.sweep {
            if s.count == 0 {
                return bad("sweep count must be at least 1".into());
            }
            if !(s.min > 0.0 && s.max >= s.min && s.max.is_finite()) {
                return bad(format!(
                    "sweep bounds must satisfy 0 < min <= max, got [{}, {}]",
                    s.min, s.max
                ));
            }
            if !self.solvers.iter().any(|v| v.sweeps(s.param)) {
                return bad(format!("no solver takes the swept parameter {}", s.param.as_str()));
            }
        }
        for s in &self.solvers {
            let iters = match s {
                SolverSpec::Apda(a) | SolverSpec::ApdaSc(a) => a.max_iters,
                SolverSpec::Cva { max_iters, .. } | SolverSpec::Fista { max_iters, .. } => *max_iters,
            };
            if iters == 0 {
                return bad(format!("{}: max_iters must be positive", s.name()));
            }
        }
        let check_file = |p: &Option<PathBuf>| -> Result<()> {
            match p {
                Some(path) if !path.is_file() => bad(format!("file not found: {}", path.display())),
                _ => Ok(()),
            }
        };
        match &self.problem {
            ProblemSpec::Logistic { data, m, d, .. } => {
                check_file(data)?;
                if data.is_none() && (m.is_none() || d.is_none()) {
                    return bad("logistic needs either `data` or both `m` and `d`".into());
                }
            }
            ProblemSpec::Inpainting {
                image, height, width, ..
            }
            | ProblemSpec::PhaseRetrieval {
                image, height, width, ..
            } => {
                check_file(image)?;
                if image.is_none() && (height.is_none() || width.is_none()) {
                    return bad("image problems need either `image` or both `height` and `width`".into());
                }
            }
            ProblemSpec::Quadratic { .. } => {}
        }
        if matches!(self.problem, ProblemSpec::PhaseRetrieval { .. }) && self.reference {
            return bad("reference solutions need a convex problem".into());
        }
        if self.solvers.iter().any(|s| matches!(s, SolverSpec::Fista { .. }))
            && !matches!(self.problem, ProblemSpec::Logistic { .. })
        {
            return bad("fista is only available for problems with identity coupling (logistic)".into());
        }
        Ok(())
    }
}
