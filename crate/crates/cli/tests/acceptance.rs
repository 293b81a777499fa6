//! Acceptance suite: one PASS/FAIL line per criterion and a nonzero exit if
//! any fails. Runs without the libtest harness so the lines always show.
//! Reference values come from oracles computed here (Jacobi eigenvalues,
//! central differences, hand recurrences), not from the solvers under test.

use std::path::Path;
use std::time::Instant;

use apda_core::diagnostics::{
    gap_bound_check, linear_rate_check, psnr, EnergyMonitor, ErgodicGapMonitor, GapBoundParams, IterationRecord,
    RateCertificate,
};
use apda_core::linop::{DenseMatrix, LinearOperator, NormOptions, DENSE_CAP};
use apda_core::problems::{
    compute_reference, make_inpainting_problem, make_logistic_problem, make_phase_retrieval_problem,
    make_quadratic_testproblem, synthetic_logistic_data, Convexity, Image, ReferenceOptions, SaddleProblem,
    SmoothObjective,
};
use apda_core::prox::{GroupLayout, Regularizer};
use apda_core::solvers::{apda_run, cva_gate, cva_run, fista_run, ApdaConfig, CvaConfig, StepsizeVariant};
use apda_core::sparse::CsrMatrix;
use apda_core::vecops;
use apda_kit::config::ExperimentConfig;
use apda_kit::formats::{encode_pgm, parse_libsvm, parse_pgm, write_libsvm};
use apda_kit::runner::{build_problem, run_experiment, RunOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

type Verdict = (bool, String);

/// Id, name, check and runtime budget in seconds.
type Criterion = (usize, &'static str, fn() -> Verdict, Option<f64>);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(r)).collect()
}

/// Eigenvalues (ascending) of a symmetric row-major matrix by cyclic Jacobi.
fn jacobi_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j].powi(2))
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut e: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Smallest and largest singular values of `A` (rows <= cols) from `A A^T`.
fn singular_range(op: &LinearOperator) -> (f64, f64) {
    let d = op.to_dense(DENSE_CAP).unwrap();
    let (r, c) = (d.rows, d.cols);
    let mut g = vec![0.0; r * r];
    for i in 0..r {
        for j in 0..r {
            g[i * r + j] = (0..c).map(|k| d.data[i * c + k] * d.data[j * c + k]).sum();
        }
    }
    let e = jacobi_eigenvalues(&g, r);
    (e[0].max(0.0).sqrt(), e[r - 1].sqrt())
}

fn zeros(p: &SaddleProblem) -> (Vec<f64>, Vec<f64>) {
    (vec![0.0; p.primal_dim()], vec![0.0; p.dual_dim()])
}

fn norm_a(p: &SaddleProblem) -> f64 {
    p.op.operator_norm(&NormOptions::default()).unwrap()
}

fn certificate_instance() -> SaddleProblem {
    make_quadratic_testproblem(10, 4, 0.5, 5.0, 1).unwrap()
}

fn criterion_1() -> Verdict {
    let mut r = rng(101);
    // Gradients: every objective kind, 20 random points each.
    let (q, b) = synthetic_logistic_data(30, 8, 4).unwrap();
    let img = Image::piecewise_constant(5, 5);
    let objectives = vec![
        SmoothObjective::logistic(q, b).unwrap(),
        make_inpainting_problem(&img, 0.5, 0.01, 2).unwrap().f,
        make_phase_retrieval_problem(&img, 40, 0.3, 0.1, 0.01, 9).unwrap().f,
        make_quadratic_testproblem(6, 2, 0.3, 4.0, 8).unwrap().f,
    ];
    let mut grad_worst: f64 = 0.0;
    for f in &objectives {
        let n = f.dim();
        for _ in 0..20 {
            let x = gaussian(&mut r, n);
            let g = f.gradient(&x).unwrap();
            let h = 1e-6 * (1.0 + vecops::norm(&x));
            let fd: Vec<f64> = (0..n)
                .map(|i| {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += h;
                    xm[i] -= h;
                    (f.value(&xp).unwrap() - f.value(&xm).unwrap()) / (2.0 * h)
                })
                .collect();
            grad_worst = grad_worst.max(vecops::dist(&g, &fd) / vecops::norm(&fd).max(1e-8));
        }
    }

    let dense = LinearOperator::dense(5, 7, gaussian(&mut r, 35)).unwrap();
    let sparse = LinearOperator::sparse(
        CsrMatrix::from_rows(7, &[vec![(0, 1.5), (6, -2.0)], vec![], vec![(2, 0.25), (3, 4.0)]]).unwrap(),
    );
    let ops = vec![
        dense.clone(),
        sparse.clone(),
        LinearOperator::identity(7),
        LinearOperator::zero(3, 7),
        LinearOperator::mask(7, vec![0, 2, 6]).unwrap(),
        LinearOperator::gradient(6, 9),
        LinearOperator::compose(LinearOperator::gradient(1, 5), dense).unwrap(),
        LinearOperator::compose(sparse, LinearOperator::identity(7)).unwrap(),
    ];
    let mut adj_worst: f64 = 0.0;
    for op in &ops {
        let na = op.operator_norm(&NormOptions::default()).unwrap();
        for _ in 0..20 {
            let x = gaussian(&mut r, op.in_dim());
            let y = gaussian(&mut r, op.out_dim());
            let lhs = vecops::dot(&op.apply(&x).unwrap(), &y);
            let rhs = vecops::dot(&x, &op.adjoint_apply(&y).unwrap());
            let scale = 1.0 + na * vecops::norm(&x) * vecops::norm(&y);
            adj_worst = adj_worst.max((lhs - rhs).abs() / scale);
        }
    }

    let mut moreau_worst: f64 = 0.0;
    for lambda in [1e-3, 0.1, 10.0] {
        let regs = [
            Regularizer::l1(lambda).unwrap(),
            Regularizer::group_l21(lambda, GroupLayout::pixel_pairs(6)).unwrap(),
            Regularizer::zero(),
        ];
        for reg in &regs {
            for sigma in [1e-3, 1.0, 1e3] {
                let z: Vec<f64> = gaussian(&mut r, 12).iter().map(|v| 3.0 * lambda * v).collect();
                let d = reg.prox_g_conj(sigma, &z).unwrap();
                let m = reg.prox_conj_via_moreau(sigma, &z).unwrap();
                moreau_worst = moreau_worst.max(vecops::dist(&d, &m) / (1.0 + vecops::norm(&z)));
            }
        }
    }
    (
        grad_worst <= 1e-5 && adj_worst <= 1e-10 && moreau_worst <= 1e-10,
        format!("gradient fd {grad_worst:.2e} <= 1e-5, adjoint {adj_worst:.2e} <= 1e-10, moreau {moreau_worst:.2e} <= 1e-10"),
    )
}

/// Stepsize invariants recomputed from the trace alone.
fn invariant_violations(records: &[IterationRecord], cfg: &ApdaConfig) -> usize {
    let sc = cfg.variant == StepsizeVariant::StronglyConvex;
    let a2 = cfg.norm_a * cfg.norm_a;
    let mut bad = 0;
    let mut prev: Option<&IterationRecord> = None;
    for r in records {
        let (tau, theta, lk) = (r.tau, r.theta.unwrap(), r.lipschitz.unwrap());
        let limit = if sc { 0.25 } else { 0.5 };
        bad += usize::from(!(tau * lk < limit));
        if let Some(p) = prev {
            let pt = p.theta.unwrap();
            let cap = p.tau * if sc { (1.0 + pt / 2.0).sqrt() } else { (1.0 + pt).sqrt() };
            bad += usize::from(!(tau <= cap * (1.0 + 1e-14)));
        }
        bad += usize::from(!(theta <= 2.0));
        let interval = 1.0 / (lk + (lk * lk + 2.0 * cfg.beta / (1.0 - cfg.c) * a2).sqrt());
        bad += usize::from(!(tau < interval));
        prev = Some(r);
    }
    bad
}

fn criterion_2() -> Verdict {
    let (q, b) = synthetic_logistic_data(80, 20, 2).unwrap();
    let suite = vec![
        ("quadratic-1", certificate_instance(), 1.0),
        (
            "quadratic-2",
            make_quadratic_testproblem(20, 8, 0.1, 10.0, 2).unwrap(),
            0.3,
        ),
        (
            "quadratic-3",
            make_quadratic_testproblem(6, 6, 1.0, 2.0, 3).unwrap(),
            4.0,
        ),
        ("logistic", make_logistic_problem(q, b, 0.005).unwrap(), 1.0),
        (
            "inpainting",
            make_inpainting_problem(&Image::piecewise_constant(12, 12), 0.4, 1e-2, 5).unwrap(),
            10.0,
        ),
    ];
    let (mut runs, mut checked, mut bad) = (0, 0, 0);
    for (_, p, beta) in &suite {
        for variant in [StepsizeVariant::Base, StepsizeVariant::StronglyConvex] {
            let cfg = ApdaConfig {
                variant,
                max_iters: 2000,
                ..ApdaConfig::new(*beta, norm_a(p))
            };
            let (x0, y0) = zeros(p);
            let mut records = Vec::new();
            let out = apda_run(p, &x0, &y0, &cfg, |v| records.push(v.record.clone())).unwrap();
            runs += 1;
            checked += records.len();
            bad += invariant_violations(&records, &cfg) + out.summary.invariant_violations;
        }
    }
    (
        bad == 0 && runs == 10 && checked == 10 * 2000,
        format!(
            "{runs} runs ({} problems x 2 variants), {checked} iterations, {bad} violations",
            suite.len()
        ),
    )
}

fn criterion_3() -> Verdict {
    let p = certificate_instance();
    let r = p.reference.clone().unwrap();
    let beta = 1.0;
    let cfg = ApdaConfig {
        max_iters: 10_000,
        ..ApdaConfig::new(beta, norm_a(&p))
    };
    let (x0, y0) = zeros(&p);
    let mut first = None;
    let mut energies = Vec::with_capacity(10_000);
    apda_run(&p, &x0, &y0, &cfg, |v| {
        if v.record.k == 1 {
            first = Some((v.x.to_vec(), v.y.to_vec()));
        }
        energies.push(vecops::dist_sq(v.x, &r.x) + vecops::dist_sq(v.y, &r.y) / beta);
    })
    .unwrap();
    let (x1, y1) = first.unwrap();
    let m = vecops::dist_sq(&x1, &r.x) + vecops::dist_sq(&y1, &r.y) / beta + 0.5 * vecops::dist_sq(&x1, &x0);
    let worst = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bad = energies.iter().filter(|&&e| !(e <= m + 1e-8)).count();
    (
        bad == 0 && energies.len() == 10_000,
        format!(
            "max energy {worst:.6e} <= M + 1e-8 = {:.6e} over {} iterations",
            m + 1e-8,
            energies.len()
        ),
    )
}

fn criterion_4() -> Verdict {
    let p = certificate_instance();
    let r = p.reference.clone().unwrap();
    let (_, true_norm) = singular_range(&p.op);
    let cfg = ApdaConfig {
        max_iters: 8192,
        ..ApdaConfig::new(1.0, norm_a(&p))
    };
    let (x0, y0) = zeros(&p);
    let mut monitor = ErgodicGapMonitor::new(&p, ErgodicGapMonitor::dyadic_schedule(8192)).unwrap();
    apda_run(&p, &x0, &y0, &cfg, |v| monitor.observe(v)).unwrap();
    let x1 = monitor.x1().unwrap().to_vec();
    let y1 = monitor.y1().unwrap().to_vec();
    let samples = monitor.finish().unwrap();
    let params = GapBoundParams {
        lipschitz: 5.0,
        beta: 1.0,
        c: cfg.c,
        norm_a: true_norm,
        m_ball: GapBoundParams::m_of_ball(
            vecops::dist(&x1, &r.x),
            vecops::dist(&y1, &r.y),
            vecops::dist(&x1, &x0),
            1.0,
            0.0,
        ),
    };
    let report = gap_bound_check(&samples, &params);
    let g = |k: usize| samples.iter().find(|s| s.k == k).map(|s| s.gap);
    let (g1024, g4096) = (g(1024).unwrap_or(f64::NAN), g(4096).unwrap_or(f64::NAN));
    let trend = g4096 <= 2.0 * 0.25 * g1024;
    (
        report.holds() && report.checked >= 13 && trend,
        format!(
            "{} samples, worst G/bound {:.3e}; G(4096)/G(1024) = {:.3e} <= 0.5",
            report.checked,
            report.worst_ratio,
            g4096 / g1024
        ),
    )
}

fn criterion_5() -> Verdict {
    let p = certificate_instance();
    let (sigma_min, _) = singular_range(&p.op);
    let na = norm_a(&p);
    let cfg = ApdaConfig {
        variant: StepsizeVariant::StronglyConvex,
        c: 0.0,
        max_iters: 2000,
        ..ApdaConfig::new(1.0, na)
    };
    let (x0, y0) = zeros(&p);
    let mut em = EnergyMonitor::new();
    apda_run(&p, &x0, &y0, &cfg, |v| em.observe(v)).unwrap();
    let cert = RateCertificate::new(0.5, 5.0, 1.0, na, sigma_min).unwrap();
    let m2 = em.m2(&p, 1.0, cert.big_t).unwrap();
    let report = linear_rate_check(em.energies(), &cert, m2);
    (
        report.holds() && report.checked > 0,
        format!(
            "{} checks, {} violations, rho = {:.6}, slope {:.3e} <= {:.3e}",
            report.checked,
            report.violations,
            report.contraction,
            report.empirical_log_slope.unwrap_or(f64::NAN),
            report.theoretical_log_rate
        ),
    )
}

fn criterion_6() -> Verdict {
    // f(x) = x^2 / 2, A = 0, g = 0, x_0 = 1: x_1 = 1 - 1e-9 (warm step),
    // L_k = 1 so tau_k = 1/2 and x_{k+1} = x_k / 2.
    let f = SmoothObjective::quadratic(
        DenseMatrix {
            rows: 1,
            cols: 1,
            data: vec![1.0],
        },
        vec![0.0],
    )
    .unwrap();
    let p = SaddleProblem::new(f, Regularizer::zero(), LinearOperator::zero(1, 1), Convexity::Convex).unwrap();
    let cfg = ApdaConfig {
        c: 0.0,
        max_iters: 50,
        ..ApdaConfig::new(1.0, 0.0)
    };
    let mut worst: f64 = 0.0;
    let mut n = 0;
    apda_run(&p, &[1.0], &[0.0], &cfg, |v| {
        let k = v.record.k as i32;
        let x = (1.0 - 1e-9) / 2f64.powi(k - 1);
        worst = worst.max((v.x[0] - x).abs()).max((v.record.tau - 0.5).abs());
        n += 1;
    })
    .unwrap();
    (
        n == 50 && worst <= 1e-12,
        format!("{n} iterations, max deviation {worst:.2e} <= 1e-12"),
    )
}

fn criterion_7() -> Verdict {
    let (q, b) = synthetic_logistic_data(200, 50, 7).unwrap();
    let mut p = make_logistic_problem(q, b, 0.005).unwrap();
    p.reference = Some(compute_reference(&p, &ReferenceOptions::default()).unwrap());
    let f_star = p.reference.as_ref().unwrap().objective;
    let l = p.f.global_lipschitz(&NormOptions::default()).unwrap().unwrap();
    let na = norm_a(&p);
    let (x0, y0) = zeros(&p);
    let target = 1e-6 * (1.0 + f_star.abs());

    let cfg = ApdaConfig {
        max_iters: 5000,
        ..ApdaConfig::new(1.0, na)
    };
    let mut hit = None;
    let apda = apda_run(&p, &x0, &y0, &cfg, |v| {
        if hit.is_none() && v.record.objective - f_star <= target {
            hit = Some(v.record.k);
        }
    })
    .unwrap();

    let cva_cfg = CvaConfig {
        max_iters: 5000,
        ..CvaConfig::from_ratio(1.0, l, na).unwrap()
    };
    let gate_ok = cva_gate(&cva_cfg).is_ok();
    let cva = cva_run(&p, &x0, &y0, &cva_cfg, |_| {}).unwrap();
    let fista = fista_run(&p.f, &p.reg, &x0, l, 5000, 0.0, |_| {}).unwrap();

    let fs = [
        apda.summary.final_objective,
        cva.summary.final_objective,
        fista.summary.final_objective,
    ];
    let spread = fs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - fs.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let rel = spread / fs[0].abs();
    (
        gate_ok && rel <= 1e-6 && hit.is_some(),
        format!(
            "F apda/cva/fista spread {rel:.2e} <= 1e-6 (cva gate {}), F - F* <= 1e-6(1+|F*|) at k = {}",
            if gate_ok { "valid" } else { "INVALID" },
            hit.map_or("never".into(), |k| k.to_string())
        ),
    )
}

fn criterion_8() -> Verdict {
    let img = Image::piecewise_constant(32, 32);
    let p = make_inpainting_problem(&img, 0.4, 1e-2, 3).unwrap();
    let info = p.image.clone().unwrap();
    let l = p.f.global_lipschitz(&NormOptions::default()).unwrap().unwrap();
    let na = norm_a(&p);
    let (x0, y0) = zeros(&p);
    let iters = 20_000;
    let apda = apda_run(
        &p,
        &x0,
        &y0,
        &ApdaConfig {
            max_iters: iters,
            ..ApdaConfig::new(1.0, na)
        },
        |_| {},
    )
    .unwrap();
    let cva = cva_run(
        &p,
        &x0,
        &y0,
        &CvaConfig {
            max_iters: iters,
            ..CvaConfig::from_ratio(1.0, l, na).unwrap()
        },
        |_| {},
    )
    .unwrap();
    let (fa, fc) = (apda.summary.final_objective, cva.summary.final_objective);
    let rel = (fa - fc).abs() / fa.abs().max(fc.abs());

    let mut zero_filled = vec![0.0; img.len()];
    for &i in info.kept.as_ref().unwrap() {
        zero_filled[i] = img.pixels[i];
    }
    let psnr_zero = psnr(&img.pixels, &zero_filled, 1.0).unwrap();
    let psnr_rec = psnr(&img.pixels, &apda.x, 1.0).unwrap();
    (
        rel <= 1e-4 && psnr_rec >= psnr_zero + 3.0,
        format!("F apda {fa:.8e} vs cva {fc:.8e} (rel {rel:.2e} <= 1e-4), PSNR {psnr_rec:.2} dB vs zero-filled {psnr_zero:.2} dB"),
    )
}

fn phase_config(seed: u64) -> ExperimentConfig {
    ExperimentConfig::from_json(&format!(
        r#"{{"problem": {{"kind": "phase-retrieval", "height": 16, "width": 16,
                         "density": 0.3, "corrupt_frac": 0.1, "lambda": 0.01}},
             "solvers": [{{"name": "apda", "beta": 1, "max_iters": 3000}}],
             "seed": {seed}}}"#
    ))
    .unwrap()
}

fn criterion_9() -> Verdict {
    let mut ratios = Vec::new();
    let mut non_finite = 0;
    let mut m = 0;
    for seed in 1..=5 {
        let built = build_problem(&phase_config(seed)).unwrap();
        let p = &built.problem;
        m = p.f.dim().max(m);
        let cfg = ApdaConfig {
            max_iters: 3000,
            ..ApdaConfig::new(1.0, built.norm_a)
        };
        let f0 = p.objective(&built.x0).unwrap();
        let mut finite = true;
        match apda_run(p, &built.x0, &built.y0, &cfg, |v| {
            finite &= vecops::all_finite(v.x) && vecops::all_finite(v.y);
        }) {
            Ok(out) if finite => ratios.push(out.summary.final_objective / f0),
            _ => non_finite += 1,
        }
    }
    ratios.sort_by(f64::total_cmp);
    let median = ratios.get(ratios.len() / 2).copied().unwrap_or(f64::NAN);
    (
        non_finite == 0 && ratios.len() == 5 && median <= 1e-2,
        format!(
            "median F_final/F_0 = {median:.3e} <= 1e-2 over 5 seeds (ratios {}), {non_finite} non-finite runs",
            ratios.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn strip_wall_time(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
        .collect()
}

fn criterion_10() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut traces = Vec::new();
    for run in 0..2 {
        let mut cfg = ExperimentConfig::from_json(
            r#"{"problem": {"kind": "logistic", "m": 60, "d": 12},
                "solvers": [{"name": "apda", "beta": 1, "max_iters": 400},
                            {"name": "cva", "max_iters": 400},
                            {"name": "fista", "max_iters": 400}],
                "seed": 11, "reference": true, "record_every": 7}"#,
        )
        .unwrap();
        cfg.out_dir = dir.path().join(format!("run{run}"));
        let report = run_experiment(
            &cfg,
            &RunOptions {
                jobs: Some(1 + 2 * run),
            },
        )
        .unwrap();
        assert!(report.all_ok());
        traces.push(
            ["apda.csv", "cva.csv", "fista.csv"]
                .iter()
                .map(|f| strip_wall_time(&cfg.out_dir.join(f)))
                .collect::<Vec<_>>(),
        );
    }
    let deterministic = traces[0] == traces[1] && traces[0].iter().all(|t| t.len() > 2);

    let (q, b) = synthetic_logistic_data(25, 9, 3).unwrap();
    let mut buf = Vec::new();
    write_libsvm(&mut buf, &q, &b).unwrap();
    let (q2, b2) = parse_libsvm(buf.as_slice()).unwrap();
    let libsvm_ok = b == b2
        && q.indptr() == q2.indptr()
        && q.indices() == q2.indices()
        && q.values()
            .iter()
            .zip(q2.values())
            .all(|(a, c)| a.to_bits() == c.to_bits());

    let img = Image::piecewise_constant(13, 21);
    let back = parse_pgm(&encode_pgm(&img)).unwrap();
    let pgm_err = img
        .pixels
        .iter()
        .zip(&back.pixels)
        .map(|(a, c)| (a - c).abs())
        .fold(0.0, f64::max);
    let pgm_ok = (back.height, back.width) == (13, 21) && pgm_err <= 0.5 / 255.0 + 1e-15;
    (
        deterministic && libsvm_ok && pgm_ok,
        format!(
            "CSV identical across runs: {deterministic}; LIBSVM bit-exact: {libsvm_ok}; PGM max error {pgm_err:.2e} <= 1/510"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "oracle correctness", criterion_1, Some(10.0)),
        (2, "stepsize invariants", criterion_2, None),
        (3, "boundedness", criterion_3, Some(5.0)),
        (4, "ergodic O(1/k) gap", criterion_4, None),
        (5, "linear rate", criterion_5, None),
        (6, "reduction to gradient descent", criterion_6, None),
        (7, "cross-solver agreement (logistic)", criterion_7, Some(30.0)),
        (8, "inpainting 32x32", criterion_8, Some(60.0)),
        (9, "phase retrieval 16x16", criterion_9, Some(120.0)),
        (10, "determinism and formats", criterion_10, None),
    ];
    let mut failed = Vec::new();
    for (id, name, check, budget) in criteria {
        let start = Instant::now();
        let (ok, detail) = check();
        let secs = start.elapsed().as_secs_f64();
        let in_time = budget.is_none_or(|b| secs < b);
        let pass = ok && in_time;
        let limit = budget.map_or(String::new(), |b| format!(" < {b:.0} s"));
        println!(
            "criterion {id:>2} {} {name}: {detail} [{secs:.2} s{limit}]",
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
