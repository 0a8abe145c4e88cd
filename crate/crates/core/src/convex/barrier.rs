//! Log-barrier path-following interior-point method.
//!
//! Minimizes `-c^T x + (1/t) sum_i -log(-g_i(x))` by damped Newton with backtracking for an
//! increasing sequence of `t`, stopping once the duality measure `m / t` is below tolerance.

use nalgebra::{Cholesky, DMatrix, DVector};

use super::problem::ConvexSubproblem;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierOptions {
    /// Initial barrier weight.
    pub t0: f64,
    /// Barrier weight growth factor.
    pub mu: f64,
    /// Stop when `m / t` falls below this.
    pub gap_tol: f64,
    /// Centering stops when `decrement^2 / 2` falls below this.
    pub newton_tol: f64,
    /// Armijo fraction.
    pub alpha: f64,
    /// Backtracking shrink factor.
    pub beta: f64,
    pub max_newton_per_center: usize,
    pub max_newton_total: usize,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        Self {
            t0: 1.0,
            mu: 10.0,
            gap_tol: 1e-8,
            newton_tol: 1e-10,
            alpha: 0.25,
            beta: 0.5,
            max_newton_per_center: 200,
            max_newton_total: 3000,
        }
    }
}

/// Centering that stalls in the line search is accepted below this `decrement^2 / 2`.
const STALL_ACCEPT: f64 = 1e-6;
const MIN_STEP: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    MaxIters,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub x: DVector<f64>,
    /// `c^T x` at the returned point.
    pub objective: f64,
    /// `max(0, max_i g_i(x))`.
    pub max_violation: f64,
    pub outer_iterations: usize,
    pub newton_steps: usize,
    /// `m / t` at the last completed centering.
    pub duality_measure: f64,
    pub status: SolveStatus,
}

struct Workspace {
    grad: DVector<f64>,
    hess: DMatrix<f64>,
    gi: DVector<f64>,
    gvals: Vec<f64>,
}

/// Solve `prob` starting from a strictly feasible `start`.
pub fn solve(prob: &ConvexSubproblem, start: &DVector<f64>, opts: &BarrierOptions) -> Result<SolveReport> {
    let n = prob.n_vars;
    if start.len() != n {
        return Err(invalid(format!("start has {} entries, problem has {n} variables", start.len())));
    }
    if prob.constraints.is_empty() {
        return Err(invalid("barrier method needs at least one constraint"));
    }
    let worst = prob.max_constraint(start);
    if !(worst < 0.0) {
        return Err(Error::InfeasibleStart { max_violation: worst });
    }

    let m = prob.constraints.len() as f64;
    let mut ws = Workspace {
        grad: DVector::zeros(n),
        hess: DMatrix::zeros(n, n),
        gi: DVector::zeros(n),
        gvals: vec![0.0; prob.constraints.len()],
    };
    let mut x = start.clone();
    let mut t = opts.t0;
    let mut newton_steps = 0;
    let mut outer = 0;

    let finish = |x: DVector<f64>, outer, newton_steps, t: f64, status| {
        let worst = prob.max_constraint(&x);
        SolveReport {
            objective: prob.objective_value(&x),
            max_violation: worst.max(0.0),
            outer_iterations: outer,
            newton_steps,
            duality_measure: m / t,
            status,
            x,
        }
    };

    loop {
        for _ in 0..opts.max_newton_per_center {
            assemble(prob, &x, t, &mut ws);
            let Some(dx) = newton_direction(&ws.hess, &ws.grad) else {
                return Ok(finish(x, outer, newton_steps, t, SolveStatus::NumericalFailure));
            };
            let slope = ws.grad.dot(&dx);
            let decrement2 = -slope;
            if !decrement2.is_finite() {
                return Ok(finish(x, outer, newton_steps, t, SolveStatus::NumericalFailure));
            }
            if decrement2 / 2.0 <= opts.newton_tol {
                break;
            }
            match line_search(prob, &x, &dx, t, slope, &ws.gvals, opts) {
                Some(step) => {
                    x.axpy(step, &dx, 1.0);
                    newton_steps += 1;
                }
                None if decrement2 / 2.0 <= STALL_ACCEPT => break,
                None => return Ok(finish(x, outer, newton_steps, t, SolveStatus::NumericalFailure)),
            }
            if newton_steps >= opts.max_newton_total {
                return Ok(finish(x, outer, newton_steps, t, SolveStatus::MaxIters));
            }
        }
        outer += 1;
        if m / t < opts.gap_tol {
            return Ok(finish(x, outer, newton_steps, t, SolveStatus::Optimal));
        }
        t *= opts.mu;
    }
}

/// Gradient and Hessian of `t (-c^T x) - sum log(-g_i(x))`.
fn assemble(prob: &ConvexSubproblem, x: &DVector<f64>, t: f64, ws: &mut Workspace) {
    ws.grad.copy_from(&prob.objective);
    ws.grad *= -t;
    ws.hess.fill(0.0);
    for (ci, con) in prob.constraints.iter().enumerate() {
        let g = con.value(x);
        ws.gvals[ci] = g;
        let inv = -1.0 / g;
        con.gradient_into(x, &mut ws.gi);
        let support = con.support();
        for &i in support {
            ws.grad[i] += inv * ws.gi[i];
        }
        let inv2 = inv * inv;
        for &j in support {
            let a = inv2 * ws.gi[j];
            if a == 0.0 {
                continue;
            }
            for &i in support {
                ws.hess[(i, j)] += a * ws.gi[i];
            }
        }
        con.add_hessian(x, inv, &mut ws.hess);
    }
}

/// Solve `H dx = -grad` with Jacobi scaling and a small ridge that suppresses null-space drift.
fn newton_direction(hess: &DMatrix<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
    let n = grad.len();
    let d = DVector::from_fn(n, |i, _| {
        let h = hess[(i, i)];
        if h > 0.0 && h.is_finite() {
            1.0 / h.sqrt()
        } else {
            1.0
        }
    });
    let mut scaled = hess.clone();
    for j in 0..n {
        for i in 0..n {
            scaled[(i, j)] *= d[i] * d[j];
        }
    }
    let rhs = -grad.component_mul(&d);
    let mut ridge = 1e-12;
    while ridge <= 1e-2 {
        let mut s = scaled.clone();
        for i in 0..n {
            s[(i, i)] += ridge;
        }
        if let Some(ch) = Cholesky::new(s) {
            let y = ch.solve(&rhs);
            if y.iter().all(|v| v.is_finite()) {
                return Some(y.component_mul(&d));
            }
        }
        ridge *= 100.0;
    }
    None
}

/// Backtracking on the barrier objective, evaluated as a difference to avoid cancellation
/// against the large `t c^T x` term.
fn line_search(
    prob: &ConvexSubproblem,
    x: &DVector<f64>,
    dx: &DVector<f64>,
    t: f64,
    slope: f64,
    gvals: &[f64],
    opts: &BarrierOptions,
) -> Option<f64> {
    let c_dx = prob.objective.dot(dx);
    let mut s = 1.0;
    let mut trial = x.clone();
    while s >= MIN_STEP {
        trial.copy_from(x);
        trial.axpy(s, dx, 1.0);
        let mut delta = -t * s * c_dx;
        let mut feasible = true;
        for (con, &g_old) in prob.constraints.iter().zip(gvals) {
            let g_new = con.value(&trial);
            if !(g_new < 0.0) {
                feasible = false;
                break;
            }
            delta -= (g_new / g_old).ln();
        }
        if feasible && delta <= opts.alpha * s * slope {
            return Some(s);
        }
        s *= opts.beta;
    }
    None
}
