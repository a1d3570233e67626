//! Damped Gauss-Newton on manifolds with a retraction.

use nalgebra::{DMatrix, DVector};

use crate::linalg::pinv_solve;

pub trait ManifoldProblem {
    type Point: Clone;

    fn residual(&self, p: &Self::Point) -> DVector<f64>;
    fn jacobian(&self, p: &Self::Point) -> DMatrix<f64>;
    /// Moves `p` along the tangent vector `step`.
    fn retract(&self, p: &Self::Point, step: &DVector<f64>) -> Self::Point;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussNewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub armijo: f64,
    pub max_backtracks: usize,
    /// Stop once the squared residual fails to drop by 0.1% over this many iterations.
    pub stall_window: usize,
}

impl Default for GaussNewtonOptions {
    fn default() -> Self {
        GaussNewtonOptions { tol: 1e-10, max_iter: 200, armijo: 1e-4, max_backtracks: 40, stall_window: 25 }
    }
}

#[derive(Debug, Clone)]
pub struct GaussNewtonOutcome<P> {
    pub point: P,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn gauss_newton<M: ManifoldProblem>(
    problem: &M,
    start: M::Point,
    opts: &GaussNewtonOptions,
) -> GaussNewtonOutcome<M::Point> {
    let mut p = start;
    let mut r = problem.residual(&p);
    let mut f = r.norm_squared();
    let mut history: Vec<f64> = Vec::new();
    let mut iterations = 0;
    for it in 0..opts.max_iter {
        iterations = it;
        history.push(f);
        if it >= opts.stall_window && f > 0.999 * history[it - opts.stall_window] {
            break;
        }
        if f.sqrt() <= opts.tol {
            return GaussNewtonOutcome { point: p, residual_norm: f.sqrt(), iterations: it, converged: true };
        }
        let j = problem.jacobian(&p);
        let step = -pinv_solve(&j, &r);
        let slope = 2.0 * r.dot(&(&j * &step));
        if !(slope < 0.0) {
            break;
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..opts.max_backtracks {
            let cand = problem.retract(&p, &(&step * alpha));
            let rc = problem.residual(&cand);
            let fc = rc.norm_squared();
            if fc <= f + opts.armijo * alpha * slope {
                accepted = Some((cand, rc, fc));
                break;
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((cand, rc, fc)) => {
                p = cand;
                r = rc;
                f = fc;
            }
            None => break,
        }
    }
    let norm = f.sqrt();
    GaussNewtonOutcome { point: p, residual_norm: norm, iterations, converged: norm <= opts.tol }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Points on the unit circle, residual = distance of (cos, sin) to a target.
    struct Circle {
        target: (f64, f64),
    }

    impl ManifoldProblem for Circle {
        type Point = f64;
        fn residual(&self, p: &f64) -> DVector<f64> {
            DVector::from_vec(vec![p.cos() - self.target.0, p.sin() - self.target.1])
        }
        fn jacobian(&self, p: &f64) -> DMatrix<f64> {
            DMatrix::from_column_slice(2, 1, &[-p.sin(), p.cos()])
        }
        fn retract(&self, p: &f64, step: &DVector<f64>) -> f64 {
            p + step[0]
        }
    }

    #[test]
    fn converges_on_reachable_target() {
        let pr = Circle { target: (0.6, 0.8) };
        let out = gauss_newton(&pr, 0.0, &GaussNewtonOptions::default());
        assert!(out.converged);
        assert!((out.point - 0.8f64.atan2(0.6)).abs() < 1e-9);
    }

    #[test]
    fn reports_unreachable_target() {
        let pr = Circle { target: (2.0, 0.0) };
        let out = gauss_newton(&pr, 0.3, &GaussNewtonOptions::default());
        assert!(!out.converged);
        assert!(out.residual_norm >= 1.0 - 1e-12);
    }
}
