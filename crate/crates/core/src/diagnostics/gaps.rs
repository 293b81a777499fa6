use crate::error::{ensure_len, Result};
use crate::problems::SaddleProblem;
use crate::vecops;

/// `P_{x',y'}(x) = f(x) - f(x') + <x - x', A^T y'>`
pub fn primal_gap(problem: &SaddleProblem, x_ref: &[f64], y_ref: &[f64], x: &[f64]) -> Result<f64> {
    ensure_len("primal gap point", x_ref.len(), x.len())?;
    let aty = problem.op.adjoint_apply(y_ref)?;
    let diff = vecops::sub(x, x_ref);
    Ok(problem.f.value(x)? - problem.f.value(x_ref)? + vecops::dot(&diff, &aty))
}

/// `D_{x',y'}(y) = g*(y) - g*(y') - <A x', y - y'>`; `+inf` when `y` is
/// outside the domain of `g*`.
pub fn dual_gap(problem: &SaddleProblem, x_ref: &[f64], y_ref: &[f64], y: &[f64]) -> Result<f64> {
    ensure_len("dual gap point", y_ref.len(), y.len())?;
    let conj = problem.reg.conj_value(y);
    if conj.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let ax = problem.op.apply(x_ref)?;
    let diff = vecops::sub(y, y_ref);
    Ok(conj - problem.reg.conj_value(y_ref) - vecops::dot(&ax, &diff))
}

/// `G = P + D`
pub fn gap(problem: &SaddleProblem, x_ref: &[f64], y_ref: &[f64], x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(primal_gap(problem, x_ref, y_ref, x)? + dual_gap(problem, x_ref, y_ref, y)?)
}
