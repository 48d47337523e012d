//! Small dense Levenberg-Marquardt solver shared by the fitting routines.

use nalgebra::{DMatrix, DVector};

/// A least-squares problem with an analytic Jacobian.
pub(crate) trait Problem {
    fn n_params(&self) -> usize;
    fn n_residuals(&self) -> usize;
    /// Writes `model − data`. Non-finite residuals mark the point infeasible.
    fn residuals(&self, p: &[f64], r: &mut [f64]);
    /// `∂r_i/∂p_j` into row `i`, column `j`.
    fn jacobian(&self, p: &[f64], j: &mut DMatrix<f64>);
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Options {
    pub max_iter: usize,
    /// Relative step size that counts as converged.
    pub xtol: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self { max_iter: 200, xtol: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Report {
    pub params: Vec<f64>,
    /// Root-mean-square residual at `params`.
    pub rms: f64,
    pub iterations: usize,
    pub converged: bool,
}

const LAMBDA_MAX: f64 = 1e16;

fn sum_sq(r: &[f64]) -> f64 {
    let s: f64 = r.iter().map(|v| v * v).sum();
    if s.is_finite() {
        s
    } else {
        f64::INFINITY
    }
}

/// Marquardt iteration with diagonal scaling of the damping term.
pub(crate) fn minimize<P: Problem>(problem: &P, p0: &[f64], opts: Options) -> Report {
    let (n, m) = (problem.n_params(), problem.n_residuals());
    let mut p = p0.to_vec();
    let mut r = vec![0.0; m];
    problem.residuals(&p, &mut r);
    let mut cost = sum_sq(&r);
    let mut jac = DMatrix::zeros(m, n);
    let mut trial = vec![0.0; n];
    let mut r_trial = vec![0.0; m];
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter && cost.is_finite() {
        iterations += 1;
        problem.jacobian(&p, &mut jac);
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.tr_mul(&jac);
        let grad = jac.tr_mul(&rv);
        let mut improved = false;
        while lambda < LAMBDA_MAX {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-30);
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 4.0;
                continue;
            };
            let step = chol.solve(&(-&grad));
            for k in 0..n {
                trial[k] = p[k] + step[k];
            }
            problem.residuals(&trial, &mut r_trial);
            let trial_cost = sum_sq(&r_trial);
            if trial_cost < cost {
                let step_norm = step.norm();
                let p_norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                std::mem::swap(&mut p, &mut trial);
                std::mem::swap(&mut r, &mut r_trial);
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                if step_norm <= opts.xtol * (p_norm + opts.xtol) {
                    converged = true;
                }
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            // no downhill step at any damping: stationary to working precision
            converged = true;
        }
        if converged {
            break;
        }
    }
    Report { rms: (cost / m as f64).sqrt(), params: p, iterations, converged }
}
