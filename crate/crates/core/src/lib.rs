//! Adaptive primal-dual toolkit for convex-concave saddle-point problems
//!
//! ```text
//! min_x max_y  <A x, y> + f(x) - g*(y)
//! ```
//!
//! where `f` is smooth (possibly only locally), `g` has a cheap proximal map
//! and `A` is linear. The crate provides the adaptive primal-dual solver
//! (APDA) whose stepsize follows the local curvature of `f` without any
//! linesearch, the fixed-stepsize Condat-Vu baseline, FISTA, and the
//! diagnostics needed to check the convergence guarantees numerically.

pub mod diagnostics;
pub mod error;
pub mod linop;
pub mod problems;
pub mod prox;
pub mod solvers;
pub mod sparse;
pub mod vecops;

pub use error::{Error, Result};
pub use linop::LinearOperator;
pub use problems::{Convexity, ReferenceSolution, SaddleProblem, SmoothObjective};
pub use prox::Regularizer;
