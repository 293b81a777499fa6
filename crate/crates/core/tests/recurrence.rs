//! With `A = 0` and `g = 0` the method reduces to gradient descent with the
//! adaptive stepsize; both streams are recomputed here by hand.

use apda_core::linop::{DenseMatrix, LinearOperator};
use apda_core::problems::{Convexity, SaddleProblem, SmoothObjective};
use apda_core::prox::Regularizer;
use apda_core::solvers::{apda_run, ApdaConfig};
use apda_core::sparse::CsrMatrix;

fn run(problem: &SaddleProblem, x0: f64, iters: usize) -> Vec<(usize, f64, f64)> {
    let cfg = ApdaConfig {
        c: 0.0,
        max_iters: iters,
        ..ApdaConfig::new(1.0, 0.0)
    };
    let mut stream = Vec::new();
    apda_run(problem, &[x0], &[0.0], &cfg, |v| {
        stream.push((v.record.k, v.x[0], v.record.tau));
        assert_eq!(v.next.unwrap().1, &[0.0]);
    })
    .unwrap();
    stream
}

fn uncoupled(f: SmoothObjective) -> SaddleProblem {
    SaddleProblem::new(f, Regularizer::zero(), LinearOperator::zero(1, 1), Convexity::Convex).unwrap()
}

#[test]
fn half_square_halves_each_step() {
    let f = SmoothObjective::quadratic(
        DenseMatrix {
            rows: 1,
            cols: 1,
            data: vec![1.0],
        },
        vec![0.0],
    )
    .unwrap();
    let stream = run(&uncoupled(f), 1.0, 50);
    assert_eq!(stream.len(), 50);
    let x1 = 1.0 - 1e-9;
    for (k, x, tau) in stream {
        let expected = x1 / 2f64.powi(k as i32 - 1);
        assert!((x - expected).abs() <= 1e-12, "k={k}: {x} vs {expected}");
        assert!((tau - 0.5).abs() <= 1e-12, "k={k}: tau {tau}");
    }
}

#[test]
fn scalar_logistic_matches_hand_recurrence() {
    // f(x) = log(1 + exp(-x)),  f'(x) = -1 / (1 + exp(x))
    let q = CsrMatrix::from_dense(1, 1, &[1.0]).unwrap();
    let f = SmoothObjective::logistic(q, vec![1.0]).unwrap();
    let stream = run(&uncoupled(f), 0.0, 50);

    let grad = |x: f64| -1.0 / (1.0 + x.exp());
    let mut x_prev = 0.0;
    let mut x = x_prev - 1e-9 * grad(x_prev);
    let (mut tau_prev, mut theta_prev): (f64, f64) = (f64::INFINITY, 1.0);
    let mut cap_engaged = false;
    for (k, xk, tauk) in stream {
        let l = ((grad(x) - grad(x_prev)) / (x - x_prev)).abs();
        let first = 1.0 / (2.0 * l);
        let growth = tau_prev * (1.0 + theta_prev).sqrt();
        let tau = first.min(growth);
        cap_engaged |= growth < first;
        let theta = if tau_prev.is_infinite() { 0.0 } else { tau / tau_prev };
        assert!((xk - x).abs() <= 1e-12 * (1.0 + x.abs()), "k={k}: x {xk} vs {x}");
        assert!((tauk - tau).abs() <= 1e-12 * tau, "k={k}: tau {tauk} vs {tau}");
        let next = x - tau * grad(x);
        x_prev = x;
        x = next;
        tau_prev = tau;
        theta_prev = theta;
    }
    assert!(cap_engaged, "fixture should exercise the growth cap");
}
