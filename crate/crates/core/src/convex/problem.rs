use std::f64::consts::LN_2;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{invalid, Result};

/// Real symmetric PSD block acting on `x[offset..offset + dim]`.
#[derive(Debug, Clone)]
pub struct QuadBlock {
    pub offset: usize,
    pub matrix: Arc<DMatrix<f64>>,
}

/// Shape of a single inequality `g(x) <= 0`.
#[derive(Debug, Clone)]
pub enum ConstraintForm {
    /// `a^T x + b <= 0`
    AffineLe,
    /// `sum_b x_b^T Q_b x_b + a^T x + b <= 0` with every `Q_b` PSD.
    ConvexQuadraticLe { blocks: Vec<QuadBlock> },
    /// `coef * 2^{x[var]} + a^T x + b <= 0` with `coef > 0`.
    ExpLe { var: usize, coef: f64 },
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub label: String,
    pub form: ConstraintForm,
    pub linear: DVector<f64>,
    pub constant: f64,
    /// Indices where the gradient can be non-zero.
    support: Vec<usize>,
}

impl Constraint {
    pub fn new(label: impl Into<String>, form: ConstraintForm, linear: DVector<f64>, constant: f64) -> Self {
        let n = linear.len();
        let mut mask = vec![false; n];
        for (i, a) in linear.iter().enumerate() {
            if *a != 0.0 {
                mask[i] = true;
            }
        }
        match &form {
            ConstraintForm::AffineLe => {}
            ConstraintForm::ConvexQuadraticLe { blocks } => {
                for b in blocks {
                    let end = (b.offset + b.matrix.nrows()).min(n);
                    mask[b.offset.min(end)..end].fill(true);
                }
            }
            ConstraintForm::ExpLe { var, .. } => {
                if *var < n {
                    mask[*var] = true;
                }
            }
        }
        let support = (0..n).filter(|&i| mask[i]).collect();
        Self {
            label: label.into(),
            form,
            linear,
            constant,
            support,
        }
    }

    pub fn affine(label: impl Into<String>, linear: DVector<f64>, constant: f64) -> Self {
        Self::new(label, ConstraintForm::AffineLe, linear, constant)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        let mut v = self.linear.dot(x) + self.constant;
        match &self.form {
            ConstraintForm::AffineLe => {}
            ConstraintForm::ConvexQuadraticLe { blocks } => {
                for b in blocks {
                    let d = b.matrix.nrows();
                    let xb = x.rows(b.offset, d);
                    v += xb.dot(&(&*b.matrix * xb));
                }
            }
            ConstraintForm::ExpLe { var, coef } => v += coef * x[*var].exp2(),
        }
        v
    }

    /// Gradient of `g` at `x`, written into `out` (overwritten).
    pub fn gradient_into(&self, x: &DVector<f64>, out: &mut DVector<f64>) {
        out.copy_from(&self.linear);
        match &self.form {
            ConstraintForm::AffineLe => {}
            ConstraintForm::ConvexQuadraticLe { blocks } => {
                for b in blocks {
                    let d = b.matrix.nrows();
                    let g = &*b.matrix * x.rows(b.offset, d) * 2.0;
                    let mut seg = out.rows_mut(b.offset, d);
                    seg += g;
                }
            }
            ConstraintForm::ExpLe { var, coef } => out[*var] += coef * LN_2 * x[*var].exp2(),
        }
    }

    /// Adds `scale * Hessian(g)(x)` to `h`.
    pub fn add_hessian(&self, x: &DVector<f64>, scale: f64, h: &mut DMatrix<f64>) {
        match &self.form {
            ConstraintForm::AffineLe => {}
            ConstraintForm::ConvexQuadraticLe { blocks } => {
                for b in blocks {
                    let d = b.matrix.nrows();
                    let mut view = h.view_mut((b.offset, b.offset), (d, d));
                    let k = 2.0 * scale;
                    view.zip_apply(&*b.matrix, |a, q| *a += k * q);
                }
            }
            ConstraintForm::ExpLe { var, coef } => {
                h[(*var, *var)] += scale * coef * LN_2 * LN_2 * x[*var].exp2();
            }
        }
    }
}

/// `maximize c^T x` subject to convex inequalities `g_i(x) <= 0`.
#[derive(Debug, Clone)]
pub struct ConvexSubproblem {
    pub n_vars: usize,
    pub objective: DVector<f64>,
    pub constraints: Vec<Constraint>,
}

impl ConvexSubproblem {
    pub fn new(objective: DVector<f64>) -> Self {
        Self {
            n_vars: objective.len(),
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn objective_value(&self, x: &DVector<f64>) -> f64 {
        self.objective.dot(x)
    }

    /// Largest constraint value `max_i g_i(x)` (negative means strictly feasible).
    pub fn max_constraint(&self, x: &DVector<f64>) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.value(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Checks dimensions, finiteness and that every quadratic block is PSD.
    pub fn validate(&self) -> Result<()> {
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(invalid("objective has non-finite coefficients"));
        }
        let mut seen: Vec<*const DMatrix<f64>> = Vec::new();
        for c in &self.constraints {
            if c.linear.len() != self.n_vars {
                return Err(invalid(format!("constraint `{}` has wrong dimension", c.label)));
            }
            if !c.constant.is_finite() || c.linear.iter().any(|a| !a.is_finite()) {
                return Err(invalid(format!("constraint `{}` has non-finite coefficients", c.label)));
            }
            match &c.form {
                ConstraintForm::AffineLe => {}
                ConstraintForm::ExpLe { var, coef } => {
                    if *var >= self.n_vars || !(coef.is_finite() && *coef > 0.0) {
                        return Err(invalid(format!("exponential constraint `{}` is malformed", c.label)));
                    }
                }
                ConstraintForm::ConvexQuadraticLe { blocks } => {
                    for b in blocks {
                        let m = &*b.matrix;
                        if b.offset + m.nrows() > self.n_vars || m.nrows() != m.ncols() {
                            return Err(invalid(format!("quadratic block of `{}` out of range", c.label)));
                        }
                        let ptr = Arc::as_ptr(&b.matrix);
                        if seen.contains(&ptr) {
                            continue;
                        }
                        seen.push(ptr);
                        if m.iter().any(|a| !a.is_finite()) {
                            return Err(invalid(format!("constraint `{}` has non-finite coefficients", c.label)));
                        }
                        if !is_psd(m) {
                            return Err(invalid(format!("quadratic block of `{}` is not PSD", c.label)));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// PSD within an eigenvalue floor of `-1e-10 * trace`.
pub fn is_psd(m: &DMatrix<f64>) -> bool {
    let sym = (m + m.transpose()) * 0.5;
    let trace = sym.trace().abs();
    let eig = SymmetricEigen::new(sym);
    eig.eigenvalues.iter().all(|&l| l >= -1e-10 * trace.max(f64::MIN_POSITIVE))
}
