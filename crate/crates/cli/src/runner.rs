//! Experiment orchestration: problem construction, job expansion over
//! solvers and sweep points, CSV traces and the JSON summary.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use apda_core::diagnostics::{
    gap_bound_check, linear_rate_check, psnr, EnergyMonitor, ErgodicGapMonitor, GapBoundParams, GapBoundReport,
    IterationRecord, LinearRateReport, RateCertificate,
};
use apda_core::linop::NormOptions;
use apda_core::problems::{
    compute_reference, default_measurement_count, make_inpainting_problem, make_logistic_problem,
    make_phase_retrieval_problem, make_quadratic_testproblem, synthetic_logistic_data, Image, ReferenceOptions,
    SaddleProblem,
};
use apda_core::solvers::{
    apda_run, cva_gate, cva_run, fista_run, ApdaConfig, CvaConfig, IterationView, RunSummary, SolveOutcome,
    StepsizeVariant,
};
use apda_core::vecops;
use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, InitKind, ProblemSpec, SolverSpec, SweepParam};
use crate::error::{CliError, Result};
use crate::formats::{load_libsvm, load_pgm};

pub const CSV_HEADER: [&str; 11] = [
    "k",
    "tau",
    "sigma",
    "theta",
    "L_k",
    "f",
    "F",
    "primal_res",
    "dual_res",
    "energy",
    "wall_time_ns",
];

/// Env var capping the worker pool.
pub const THREADS_ENV: &str = "APDA_KIT_THREADS";

/// Largest `rows * cols` for which the smallest singular value is computed.
const SIGMA_MIN_CAP: usize = 1 << 22;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker pool size; `None` means all available cores.
    pub jobs: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentConfig,
    pub problem: ProblemReport,
    pub runs: Vec<JobReport>,
}

impl ExperimentReport {
    pub fn all_ok(&self) -> bool {
        self.runs.iter().all(|r| r.status == JobStatus::Ok)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_ok() {
            0
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProblemReport {
    pub kind: &'static str,
    pub primal_dim: usize,
    pub dual_dim: usize,
    pub norm_a: f64,
    pub lipschitz: Option<f64>,
    pub convex: bool,
    pub reference: Option<ReferenceReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReferenceReport {
    pub objective: f64,
    pub residual: f64,
    pub iterations: usize,
    /// Acceptance gate of the reference run; `None` for built-in references.
    pub gate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobStatus {
    Ok,
    GateFailed,
    NonFinite,
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct GateValues {
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificates {
    pub gap_bound: Option<GapBoundReport>,
    pub linear_rate: Option<LinearRateReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JobReport {
    pub solver: &'static str,
    pub file: String,
    pub sweep: Option<(SweepParam, f64)>,
    pub status: JobStatus,
    /// Trace stops early (error mid-run); the CSV holds the rows written so far.
    pub partial: bool,
    pub error: Option<String>,
    pub gate: Option<GateValues>,
    pub summary: Option<RunSummary>,
    /// PSNR of the final iterate against the ground truth (imaging problems;
    /// phase retrieval takes the better of `x` and `-x`).
    pub psnr: Option<f64>,
    pub certificates: Option<Certificates>,
}

/// Problem plus the constants shared by all jobs.
pub struct Built {
    pub problem: SaddleProblem,
    pub norm_a: f64,
    pub lipschitz: Option<f64>,
    pub x0: Vec<f64>,
    pub y0: Vec<f64>,
    pub reference_gate: Option<ReferenceOptions>,
}

fn image_from(image: &Option<PathBuf>, height: Option<usize>, width: Option<usize>) -> Result<Image> {
    match image {
        Some(path) => load_pgm(path),
        None => Ok(Image::piecewise_constant(
            height.expect("validated"),
            width.expect("validated"),
        )),
    }
}

pub fn build_problem(cfg: &ExperimentConfig) -> Result<Built> {
    let seed = cfg.seed;
    let mut problem = match &cfg.problem {
        ProblemSpec::Logistic {
            data,
            m,
            d,
            lambda_frac,
        } => {
            let (q, b) = match data {
                Some(path) => load_libsvm(path)?,
                None => synthetic_logistic_data(m.expect("validated"), d.expect("validated"), seed)?,
            };
            make_logistic_problem(q, b, *lambda_frac)?
        }
        ProblemSpec::Inpainting {
            image,
            height,
            width,
            keep_ratio,
            lambda,
        } => make_inpainting_problem(&image_from(image, *height, *width)?, *keep_ratio, *lambda, seed)?,
        ProblemSpec::PhaseRetrieval {
            image,
            height,
            width,
            measurements,
            density,
            corrupt_frac,
            lambda,
        } => {
            let img = image_from(image, *height, *width)?;
            let m = measurements.unwrap_or_else(|| default_measurement_count(img.len()));
            make_phase_retrieval_problem(&img, m, *density, *corrupt_frac, *lambda, seed)?
        }
        ProblemSpec::Quadratic {
            dim_x,
            dim_y,
            mu,
            lipschitz,
        } => make_quadratic_testproblem(*dim_x, *dim_y, *mu, *lipschitz, seed)?,
    };
    let norm_opts = NormOptions {
        seed,
        ..NormOptions::default()
    };
    let norm_a = problem.op.operator_norm(&norm_opts)?;
    let lipschitz = problem.f.global_lipschitz(&norm_opts)?;
    let mut reference_gate = None;
    if problem.reference.is_none() && cfg.reference {
        let opts = ReferenceOptions::default();
        info!("computing reference solution");
        problem.reference = Some(compute_reference(&problem, &opts)?);
        reference_gate = Some(opts);
    }

    let default_init = match cfg.problem {
        ProblemSpec::PhaseRetrieval { .. } => InitKind::Gaussian,
        _ => InitKind::Zeros,
    };
    let (x0, y0) = match cfg.init.unwrap_or(default_init) {
        InitKind::Zeros => (vec![0.0; problem.primal_dim()], vec![0.0; problem.dual_dim()]),
        InitKind::Gaussian => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(1);
            let x0 = (0..problem.primal_dim())
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let y0 = (0..problem.dual_dim())
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            (x0, y0)
        }
    };
    Ok(Built {
        problem,
        norm_a,
        lipschitz,
        x0,
        y0,
        reference_gate,
    })
}

fn problem_report(b: &Built) -> ProblemReport {
    ProblemReport {
        kind: b.problem.f.kind_name(),
        primal_dim: b.problem.primal_dim(),
        dual_dim: b.problem.dual_dim(),
        norm_a: b.norm_a,
        lipschitz: b.lipschitz,
        convex: b.problem.is_convex(),
        reference: b.problem.reference.as_ref().map(|r| ReferenceReport {
            objective: r.objective,
            residual: r.residual,
            iterations: r.iterations,
            gate: b.reference_gate.map(|g| g.gate),
        }),
    }
}

#[derive(Debug, Clone)]
pub struct Job {
    pub solver: SolverSpec,
    pub sweep: Option<(SweepParam, f64)>,
    pub file: String,
}

/// One job per solver, or per solver and sweep point for solvers that take
/// the swept parameter. Sweep files carry the value in scientific notation,
/// e.g. `apda_beta_1.000e-3.csv`.
pub fn expand_jobs(cfg: &ExperimentConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    let mut seen = std::collections::HashMap::<&str, usize>::new();
    for solver in &cfg.solvers {
        let count = seen.entry(solver.name()).or_default();
        *count += 1;
        let stem = if *count == 1 {
            solver.name().to_string()
        } else {
            format!("{}-{}", solver.name(), count)
        };
        match &cfg.sweep {
            Some(s) if solver.sweeps(s.param) => {
                for v in s.points() {
                    jobs.push(Job {
                        solver: solver.with_param(s.param, v),
                        sweep: Some((s.param, v)),
                        file: format!("{stem}_{}_{v:.3e}.csv", s.param.as_str()),
                    });
                }
            }
            _ => jobs.push(Job {
                solver: solver.clone(),
                sweep: None,
                file: format!("{stem}.csv"),
            }),
        }
    }
    jobs
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// CSV row for one record; missing quantities are empty fields.
pub fn csv_row(r: &IterationRecord) -> [String; 11] {
    [
        r.k.to_string(),
        format!("{:e}", r.tau),
        fmt_opt(r.sigma),
        fmt_opt(r.theta),
        fmt_opt(r.lipschitz),
        format!("{:e}", r.f_value),
        format!("{:e}", r.objective),
        format!("{:e}", r.primal_residual),
        fmt_opt(r.dual_residual),
        fmt_opt(r.energy),
        r.wall_time_ns.to_string(),
    ]
}

/// Streams thinned records to CSV: `k = 1`, every `every`-th iteration, and
/// whatever record comes last.
struct TraceSink {
    writer: csv::Writer<BufWriter<File>>,
    every: usize,
    last: Option<IterationRecord>,
    last_written: usize,
    error: Option<csv::Error>,
}

impl TraceSink {
    fn create(path: &Path, every: usize) -> Result<Self> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut writer = csv::Writer::from_writer(BufWriter::new(file));
        writer.write_record(CSV_HEADER)?;
        Ok(Self {
            writer,
            every,
            last: None,
            last_written: 0,
            error: None,
        })
    }

    fn write(&mut self, r: &IterationRecord) {
        if self.error.is_none() {
            if let Err(e) = self.writer.write_record(csv_row(r)) {
                self.error = Some(e);
            }
            self.last_written = r.k;
        }
    }

    fn observe(&mut self, r: &IterationRecord) {
        if r.k == 1 || r.k.is_multiple_of(self.every) {
            self.write(r);
        }
        self.last = Some(r.clone());
    }

    fn finish(mut self, extra: Option<&IterationRecord>) -> Result<()> {
        if let Some(r) = self.last.take() {
            if r.k != self.last_written {
                self.write(&r);
            }
        }
        if let Some(r) = extra {
            if r.k != self.last_written {
                self.write(r);
            }
        }
        if let Some(e) = self.error {
            return Err(e.into());
        }
        self.writer.flush().map_err(|e| CliError::Format(e.to_string()))?;
        Ok(())
    }
}

struct Observers<'a> {
    gap: Option<ErgodicGapMonitor<'a>>,
    energy: Option<EnergyMonitor>,
}

impl Observers<'_> {
    fn observe(&mut self, v: &IterationView<'_>) {
        if let Some(g) = &mut self.gap {
            g.observe(v);
        }
        if let Some(e) = &mut self.energy {
            e.observe(v);
        }
    }
}

fn certificates(built: &Built, beta: f64, c: f64, obs: Observers<'_>) -> Option<Certificates> {
    let p = &built.problem;
    let reference = p.reference.as_ref()?;
    let lipschitz = built.lipschitz?;
    let gap_bound = obs.gap.and_then(|g| {
        let x1 = g.x1()?.to_vec();
        let y1 = g.y1()?.to_vec();
        let samples = match g.finish() {
            Ok(s) => s,
            Err(e) => {
                warn!("gap monitor: {e}");
                return None;
            }
        };
        let params = GapBoundParams {
            lipschitz,
            beta,
            c,
            norm_a: built.norm_a,
            m_ball: GapBoundParams::m_of_ball(
                vecops::dist(&x1, &reference.x),
                vecops::dist(&y1, &reference.y),
                vecops::dist(&x1, &built.x0),
                beta,
                0.0,
            ),
        };
        Some(gap_bound_check(&samples, &params))
    });
    let linear_rate = obs.energy.and_then(|em| {
        let mu = p.f.strong_convexity().filter(|&m| m > 0.0)?;
        let sigma_min = if built.norm_a > 0.0 {
            p.op.smallest_singular_value(SIGMA_MIN_CAP).ok()?
        } else {
            0.0
        };
        let cert = RateCertificate::new(mu, lipschitz, beta, built.norm_a, sigma_min).ok()?;
        let m2 = em.m2(p, beta, cert.big_t).ok()?;
        Some(linear_rate_check(em.energies(), &cert, m2))
    });
    Some(Certificates { gap_bound, linear_rate })
}

fn run_job(built: &Built, job: &Job, out_dir: &Path, record_every: usize) -> JobReport {
    let mut report = JobReport {
        solver: job.solver.name(),
        file: job.file.clone(),
        sweep: job.sweep,
        status: JobStatus::Ok,
        partial: false,
        error: None,
        gate: None,
        summary: None,
        psnr: None,
        certificates: None,
    };
    let path = out_dir.join(&job.file);
    let mut sink = match TraceSink::create(&path, record_every) {
        Ok(s) => s,
        Err(e) => {
            report.status = JobStatus::Failed;
            report.error = Some(e.to_string());
            return report;
        }
    };
    let p = &built.problem;
    let with_reference = p.reference.is_some() && p.is_convex();

    let result: std::result::Result<(SolveOutcome, Option<Certificates>), apda_core::Error> = match &job.solver {
        SolverSpec::Apda(spec) | SolverSpec::ApdaSc(spec) => {
            let variant = if matches!(job.solver, SolverSpec::ApdaSc(_)) {
                StepsizeVariant::StronglyConvex
            } else {
                StepsizeVariant::Base
            };
            let cfg = ApdaConfig {
                c: spec.c.unwrap_or(ApdaConfig::DEFAULT_C),
                tau_init: spec.tau_init.unwrap_or(ApdaConfig::DEFAULT_TAU_INIT),
                variant,
                max_iters: spec.max_iters,
                residual_tol: spec.residual_tol,
                ..ApdaConfig::new(spec.beta, built.norm_a)
            };
            let mut obs = Observers {
                gap: with_reference
                    .then(|| ErgodicGapMonitor::new(p, ErgodicGapMonitor::dyadic_schedule(spec.max_iters)).ok())
                    .flatten(),
                energy: (with_reference && variant == StepsizeVariant::StronglyConvex).then(EnergyMonitor::new),
            };
            apda_run(p, &built.x0, &built.y0, &cfg, |v| {
                sink.observe(v.record);
                obs.observe(v);
            })
            .map(|out| {
                let cert = certificates(built, cfg.beta, cfg.c, obs);
                (out, cert)
            })
        }
        SolverSpec::Cva {
            tau,
            sigma,
            p: ratio,
            max_iters,
            residual_tol,
            override_gate,
        } => {
            let base = match (tau, sigma) {
                (Some(t), Some(s)) => Ok(CvaConfig {
                    tau: *t,
                    sigma: *s,
                    lipschitz: built.lipschitz.unwrap_or(0.0),
                    norm_a: built.norm_a,
                    max_iters: *max_iters,
                    residual_tol: *residual_tol,
                    override_gate: *override_gate,
                }),
                _ => match built.lipschitz {
                    Some(l) => CvaConfig::from_ratio(ratio.unwrap_or(1.0), l, built.norm_a).map(|c| CvaConfig {
                        tau: tau.unwrap_or(c.tau),
                        sigma: sigma.unwrap_or(c.sigma),
                        max_iters: *max_iters,
                        residual_tol: *residual_tol,
                        override_gate: *override_gate,
                        ..c
                    }),
                    None => Err(apda_core::Error::Missing(
                        "explicit tau and sigma (no global Lipschitz constant for this problem)",
                    )),
                },
            };
            match base {
                Err(e) => Err(e),
                Ok(cfg) => {
                    if let Ok((lhs, rhs)) | Err(apda_core::Error::GateFailed { lhs, rhs }) = cva_gate(&cfg) {
                        report.gate = Some(GateValues { lhs, rhs });
                    }
                    cva_run(p, &built.x0, &built.y0, &cfg, |v| sink.observe(v.record)).map(|o| (o, None))
                }
            }
        }
        SolverSpec::Fista {
            max_iters,
            residual_tol,
        } => match built.lipschitz {
            Some(l) => fista_run(&p.f, &p.reg, &built.x0, l, *max_iters, *residual_tol, |v| {
                sink.observe(v.record)
            })
            .map(|o| (o, None)),
            None => Err(apda_core::Error::Missing("global Lipschitz constant for FISTA")),
        },
    };

    match result {
        Ok((out, certs)) => {
            report.psnr = image_psnr(p, &out.x);
            report.summary = Some(out.summary);
            report.certificates = certs;
            if let Err(e) = sink.finish(None) {
                report.status = JobStatus::Failed;
                report.error = Some(e.to_string());
            }
        }
        Err(e) => {
            let extra = match &e {
                apda_core::Error::NonFiniteIterate { last_finite, .. } => last_finite.as_deref().cloned(),
                _ => None,
            };
            report.status = match e {
                apda_core::Error::GateFailed { .. } => JobStatus::GateFailed,
                apda_core::Error::NonFiniteIterate { .. } => JobStatus::NonFinite,
                _ => JobStatus::Failed,
            };
            report.partial = sink.last.is_some() || extra.is_some();
            report.error = Some(format!("{} ({}): {e}", job.solver.name(), job.file));
            if let Err(io) = sink.finish(extra.as_ref()) {
                warn!("flushing partial trace {}: {io}", job.file);
            }
        }
    }
    report
}

fn image_psnr(p: &SaddleProblem, x: &[f64]) -> Option<f64> {
    let truth = &p.image.as_ref()?.truth.pixels;
    let direct = psnr(truth, x, 1.0).ok()?;
    if p.is_convex() {
        return Some(direct);
    }
    let flipped: Vec<f64> = x.iter().map(|v| -v).collect();
    Some(direct.max(psnr(truth, &flipped, 1.0).ok()?))
}

/// Worker count: requested (or all cores), capped by `APDA_KIT_THREADS`.
pub fn worker_count(requested: Option<usize>) -> usize {
    let base = requested
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let cap = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    cap.map_or(base, |c| base.min(c))
}

/// Runs every job and writes the CSV traces plus `summary.json` to
/// `cfg.out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentReport> {
    cfg.validate()?;
    let out_dir = &cfg.out_dir;
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let built = build_problem(cfg)?;
    let jobs = expand_jobs(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(opts.jobs))
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    info!("{} job(s) on {} worker(s)", jobs.len(), pool.current_num_threads());
    let runs: Vec<JobReport> = pool.install(|| {
        jobs.par_iter()
            .map(|job| run_job(&built, job, out_dir, cfg.record_every))
            .collect()
    });
    for r in runs.iter().filter(|r| r.status != JobStatus::Ok) {
        warn!("{}: {:?} {}", r.file, r.status, r.error.as_deref().unwrap_or(""));
    }
    let report = ExperimentReport {
        experiment: cfg.clone(),
        problem: problem_report(&built),
        runs,
    };
    let path = out_dir.join("summary.json");
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    serde_json::to_writer_pretty(BufWriter::new(file), &report)?;
    Ok(report)
}

/// Reads a trace written by [`run_experiment`], checking the header.
pub fn read_trace(path: &Path) -> Result<Vec<csv::StringRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(CliError::Format(format!(
            "{}: unexpected CSV header {:?}",
            path.display(),
            header
        )));
    }
    reader.records().map(|r| r.map_err(CliError::from)).collect()
}
