//! Argument parsing and subcommand dispatch.

use std::path::PathBuf;

use apda_core::linop::NormOptions;
use apda_core::solvers::FaultInjection;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{ExperimentConfig, SweepParam, SweepSpec};
use crate::error::{CliError, Result};
use crate::opspec::parse_operator;
use crate::runner::{run_experiment, ExperimentReport, JobStatus, RunOptions};
use crate::selfcheck::{run_checks, CheckGroup, CheckOptions};

#[derive(Debug, Parser)]
#[command(
    name = "apda-kit",
    version,
    about = "Adaptive primal-dual solvers for saddle-point problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every solver of a JSON experiment config.
    Run(RunArgs),
    /// Run a log-spaced parameter sweep over the solvers of a config.
    Sweep(SweepArgs),
    /// Numerical self-checks; exits nonzero if any group fails.
    Check(CheckArgs),
    /// Print a certified upper bound on an operator norm.
    Norm(NormArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Experiment config (JSON).
    pub config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the config output directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads (capped by APDA_KIT_THREADS).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Keep every N-th iteration in the CSV traces (plus the first and last).
    #[arg(long)]
    pub record_every: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// Lower end of the grid (default depends on the parameter).
    #[arg(long)]
    pub min: Option<f64>,
    /// Upper end of the grid.
    #[arg(long)]
    pub max: Option<f64>,
    /// Number of log-spaced points.
    #[arg(long, default_value_t = 40)]
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupArg {
    Adjoint,
    Moreau,
    Gradient,
    Stepsize,
    Energy,
}

impl From<GroupArg> for CheckGroup {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::Adjoint => CheckGroup::Adjoint,
            GroupArg::Moreau => CheckGroup::Moreau,
            GroupArg::Gradient => CheckGroup::Gradient,
            GroupArg::Stepsize => CheckGroup::Stepsize,
            GroupArg::Energy => CheckGroup::Energy,
        }
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Groups to run (default: all).
    #[arg(long = "group", value_enum)]
    pub groups: Vec<GroupArg>,
    /// Seed for the random probes.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print the reports as JSON.
    #[arg(long)]
    pub json: bool,
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    /// gradient:HxW, identity:N, zero:MxN, mask:N:i,j,..., dense:MxN[:seed] or libsvm:PATH
    pub operator: String,
    /// Seed of the power-iteration start vector.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative tolerance of the power iteration.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

fn load_config(common: &CommonArgs) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(dir) = &common.out_dir {
        cfg.out_dir = dir.clone();
    }
    if let Some(every) = common.record_every {
        cfg.record_every = every;
    }
    Ok(cfg)
}

fn print_report(report: &ExperimentReport) {
    let p = &report.problem;
    println!(
        "problem {} ({} x {}), ||A|| <= {:.6e}, L = {}",
        p.kind,
        p.dual_dim,
        p.primal_dim,
        p.norm_a,
        p.lipschitz.map_or("local only".to_string(), |l| format!("{l:.6e}"))
    );
    if let Some(r) = &p.reference {
        println!("reference F* = {:.12e} (residual {:.3e})", r.objective, r.residual);
    }
    for run in &report.runs {
        match (&run.status, &run.summary) {
            (JobStatus::Ok, Some(s)) => println!(
                "{:<28} {:>8} iters  F = {:.10e}  residual = {:.3e}",
                run.file, s.iterations, s.final_objective, s.final_residual
            ),
            _ => println!(
                "{:<28} {:?}: {}",
                run.file,
                run.status,
                run.error.as_deref().unwrap_or("")
            ),
        }
    }
    println!(
        "summary written to {}",
        report.experiment.out_dir.join("summary.json").display()
    );
}

fn run(cfg: ExperimentConfig, jobs: Option<usize>) -> Result<i32> {
    let report = run_experiment(&cfg, &RunOptions { jobs })?;
    print_report(&report);
    Ok(report.exit_code())
}

/// Executes a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run(a) => run(load_config(&a.common)?, a.common.jobs),
        Command::Sweep(a) => {
            let mut cfg = load_config(&a.common)?;
            let (lo, hi) = a.param.default_range();
            cfg.sweep = Some(SweepSpec {
                param: a.param,
                min: a.min.unwrap_or(lo),
                max: a.max.unwrap_or(hi),
                count: a.count,
            });
            run(cfg, a.common.jobs)
        }
        Command::Check(a) => {
            let groups: Vec<CheckGroup> = if a.groups.is_empty() {
                CheckGroup::ALL.to_vec()
            } else {
                a.groups.iter().map(|&g| g.into()).collect()
            };
            let opts = CheckOptions {
                seed: a.seed,
                fault: if a.inject_fault {
                    FaultInjection::InvertGrowthCap
                } else {
                    FaultInjection::None
                },
            };
            let reports = run_checks(&groups, &opts)?;
            if a.json {
                println!("{}", serde_json::to_string_pretty(&reports)?);
            } else {
                for r in &reports {
                    println!(
                        "{:<9} {} checked={} failures={} worst_margin={:.3e}{}",
                        r.group.as_str(),
                        if r.passed() { "PASS" } else { "FAIL" },
                        r.checked,
                        r.failures,
                        r.worst_margin,
                        r.first_failure
                            .as_ref()
                            .map(|f| format!("  first: {f}"))
                            .unwrap_or_default()
                    );
                }
            }
            Ok(if reports.iter().all(|r| r.passed()) { 0 } else { 1 })
        }
        Command::Norm(a) => {
            if !(a.tol > 0.0) {
                return Err(CliError::Config(format!("tol must be positive, got {}", a.tol)));
            }
            let op = parse_operator(&a.operator)?;
            let est = op.estimate_norm(&NormOptions {
                tol: a.tol,
                seed: a.seed,
                ..NormOptions::default()
            })?;
            println!(
                "{} {}x{}: certified {:.12e}, estimate {:.12e}, iterations {}{}",
                op.kind_name(),
                op.out_dim(),
                op.in_dim(),
                est.certified,
                est.estimate,
                est.iterations,
                if est.from_hint { " (closed form)" } else { "" }
            );
            Ok(0)
        }
    }
}
