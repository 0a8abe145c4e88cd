//! Convex restriction of the slack-variable reformulation around one iterate.
//!
//! Slack variables are stored noise-normalized inside the solver: a slack holding
//! `log2(P)` for a power sum `P` at a receiver with noise `sigma^2` is represented as
//! `log2(P / sigma^2)`. Every objective term is a difference of two slacks of the same
//! receiver, so the shift cancels, and all exponential constraints get unit coefficients.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::terms::{exp_tangent_lb, EffectiveChannels, QuadTerms};
use crate::channel::{ReceiverType, Scenario};
use crate::convex::{embed_hermitian, real_embed, real_unembed, Constraint, ConstraintForm, ConvexSubproblem, QuadBlock};
use crate::error::{invalid, Result};
use crate::CMatrix;

/// Log2-domain slack values (true powers, not normalized).
#[derive(Debug, Clone, PartialEq)]
pub struct SlackPoint {
    /// `log2(A_m + B_m + sigma^2)`
    pub lambda: Vec<f64>,
    /// `log2(A_m + C_m + sigma^2)`
    pub mu: Vec<f64>,
    /// `log2(E_k + F_k + sigma_k^2)`
    pub tau: Vec<f64>,
    /// `kappa[m][k] = log2(E_k + G_{m,k} + sigma_k^2)`
    pub kappa: Vec<Vec<f64>>,
    /// `log2(B_m + sigma^2)`, used by Type-II receivers.
    pub lambda_tilde: Vec<f64>,
    /// `log2(C_m + sigma^2)`, used by Type-II receivers.
    pub mu_tilde: Vec<f64>,
}

impl SlackPoint {
    /// Slack values that make every defining constraint hold with equality.
    pub fn tight(terms: &QuadTerms, ir_noise: &[f64], er_noise: &[f64]) -> Self {
        let m_count = terms.b.len();
        let lg = |x: f64| x.log2();
        Self {
            lambda: (0..m_count).map(|m| lg(terms.a[m] + terms.b[m] + ir_noise[m])).collect(),
            mu: (0..m_count).map(|m| lg(terms.a[m] + terms.c[m] + ir_noise[m])).collect(),
            tau: (0..terms.e.len()).map(|k| lg(terms.e[k] + terms.f[k] + er_noise[k])).collect(),
            kappa: (0..m_count)
                .map(|m| {
                    (0..terms.e.len())
                        .map(|k| lg(terms.e[k] + terms.g[m][k] + er_noise[k]))
                        .collect()
                })
                .collect(),
            lambda_tilde: (0..m_count).map(|m| lg(terms.b[m] + ir_noise[m])).collect(),
            mu_tilde: (0..m_count).map(|m| lg(terms.c[m] + ir_noise[m])).collect(),
        }
    }

    /// `(rate slack, interference slack)` for IR `m` under the given receiver type.
    pub fn ir_pair(&self, m: usize, rtype: ReceiverType) -> (f64, f64) {
        match rtype {
            ReceiverType::TypeI => (self.lambda[m], self.mu[m]),
            ReceiverType::TypeII => (self.lambda_tilde[m], self.mu_tilde[m]),
        }
    }

    /// `max_k (tau_k - kappa_{m,k})`, zero when there are no ERs.
    pub fn leakage(&self, m: usize) -> f64 {
        self.tau
            .iter()
            .zip(&self.kappa[m])
            .map(|(t, k)| t - k)
            .reduce(f64::max)
            .unwrap_or(0.0)
    }

    /// Unclamped secrecy term of IR `m`.
    pub fn secrecy_term(&self, m: usize, rtype: ReceiverType) -> f64 {
        let (l, u) = self.ir_pair(m, rtype);
        l - u - self.leakage(m)
    }

    /// `sum_m alpha_m (lambda_m - mu_m - max_k (tau_k - kappa_{m,k}))`.
    pub fn objective(&self, weights: &[f64], rtype: ReceiverType) -> f64 {
        weights
            .iter()
            .enumerate()
            .map(|(m, w)| if *w == 0.0 { 0.0 } else { w * self.secrecy_term(m, rtype) })
            .sum()
    }
}

/// `(W, V)` together with the slack values used as the expansion point.
#[derive(Debug, Clone, PartialEq)]
pub struct IteratePoint {
    pub info: CMatrix,
    pub an: CMatrix,
    pub slacks: SlackPoint,
}

/// Index map of the real decision vector
/// `[W columns | V columns | lambda | mu | tau | kappa | s]`.
#[derive(Debug, Clone)]
pub struct VarLayout {
    rows: usize,
    w_cols: usize,
    v_cols: usize,
    k: usize,
    /// IRs with a positive weight; only they carry slack variables.
    active: Vec<usize>,
    lambda0: usize,
    mu0: usize,
    tau0: usize,
    kappa0: usize,
    s0: usize,
    n_vars: usize,
}

impl VarLayout {
    fn new(rows: usize, w_cols: usize, v_cols: usize, k: usize, active: Vec<usize>) -> Self {
        let a = active.len();
        let lambda0 = 2 * rows * (w_cols + v_cols);
        let mu0 = lambda0 + a;
        let tau0 = mu0 + a;
        let k_eff = if a > 0 { k } else { 0 };
        let kappa0 = tau0 + k_eff;
        let s0 = kappa0 + a * k_eff;
        let s_count = if k_eff > 0 { a } else { 0 };
        Self {
            rows,
            w_cols,
            v_cols,
            k: k_eff,
            active,
            lambda0,
            mu0,
            tau0,
            kappa0,
            s0,
            n_vars: s0 + s_count,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn active_irs(&self) -> &[usize] {
        &self.active
    }

    fn w_block(&self, j: usize) -> usize {
        2 * self.rows * j
    }

    fn v_block(&self, g: usize) -> usize {
        2 * self.rows * (self.w_cols + g)
    }

    fn lambda(&self, i: usize) -> usize {
        self.lambda0 + i
    }

    fn mu(&self, i: usize) -> usize {
        self.mu0 + i
    }

    fn tau(&self, k: usize) -> usize {
        self.tau0 + k
    }

    fn kappa(&self, i: usize, k: usize) -> usize {
        self.kappa0 + i * self.k + k
    }

    fn s(&self, i: usize) -> usize {
        self.s0 + i
    }

    fn has_epigraph(&self) -> bool {
        self.k > 0 && !self.active.is_empty()
    }
}

/// One convexified subproblem plus the bookkeeping to move between beams and the real vector.
#[derive(Debug, Clone)]
pub struct ScaSubproblem {
    pub problem: ConvexSubproblem,
    pub layout: VarLayout,
    /// Normalized expansion slacks, `[rate, interference]` per active IR.
    ir_slacks: Vec<(f64, f64)>,
    tau: Vec<f64>,
    kappa: Vec<Vec<f64>>,
}

impl ScaSubproblem {
    /// The expansion point itself (slacks tight). Feasible but on the boundary.
    pub fn point_vector(&self, info: &CMatrix, an: &CMatrix) -> DVector<f64> {
        self.vector_with_offset(info, an, 0.0)
    }

    /// Expansion point with slacks moved `delta` into the interior.
    pub fn start_vector(&self, info: &CMatrix, an: &CMatrix, delta: f64) -> DVector<f64> {
        self.vector_with_offset(info, an, delta)
    }

    fn vector_with_offset(&self, info: &CMatrix, an: &CMatrix, delta: f64) -> DVector<f64> {
        let l = &self.layout;
        let mut x = DVector::zeros(l.n_vars);
        let beams = real_embed(info, an);
        x.rows_mut(0, beams.len()).copy_from(&beams);
        for (i, &(rate, interf)) in self.ir_slacks.iter().enumerate() {
            x[l.lambda(i)] = rate - delta;
            x[l.mu(i)] = interf + delta;
        }
        if l.has_epigraph() {
            for k in 0..l.k {
                x[l.tau(k)] = self.tau[k] + delta;
            }
            for i in 0..l.active.len() {
                let mut worst = f64::NEG_INFINITY;
                for k in 0..l.k {
                    x[l.kappa(i, k)] = self.kappa[i][k] - delta;
                    worst = worst.max(x[l.tau(k)] - x[l.kappa(i, k)]);
                }
                x[l.s(i)] = worst + delta;
            }
        }
        x
    }

    /// Beams encoded in a solution vector.
    pub fn beams(&self, x: &DVector<f64>) -> (CMatrix, CMatrix) {
        let l = &self.layout;
        real_unembed(x, l.rows, l.w_cols, l.v_cols)
    }
}

/// `(linear, constant)` with `linear . x - constant` the tangent minorant of
/// `sum_c x_c^T Q x_c` at `x_ref`.
fn tangent(q: &DMatrix<f64>, blocks: &[usize], x_ref: &DVector<f64>, n: usize) -> (DVector<f64>, f64) {
    let d = q.nrows();
    let mut lin = DVector::zeros(n);
    let mut c = 0.0;
    for &off in blocks {
        let xr = x_ref.rows(off, d);
        let qx = q * xr;
        c += xr.dot(&qx);
        lin.rows_mut(off, d).axpy(2.0, &qx, 0.0);
    }
    (lin, c)
}

fn quad_blocks(q: &Arc<DMatrix<f64>>, offsets: &[usize]) -> Vec<QuadBlock> {
    offsets
        .iter()
        .map(|&offset| QuadBlock {
            offset,
            matrix: Arc::clone(q),
        })
        .collect()
}

/// `sum blocks <= tangent of 2^t at t0`, normalized so the right side is a plain `2^t`.
fn quad_below_exp(label: String, q: &Arc<DMatrix<f64>>, offsets: &[usize], var: usize, t0: f64, n: usize) -> Constraint {
    let tan = exp_tangent_lb(t0);
    let mut lin = DVector::zeros(n);
    lin[var] = -tan.slope;
    // 1 (normalized noise) + quad - value - slope (t - t0) <= 0
    let constant = 1.0 - tan.value + tan.slope * t0;
    if offsets.is_empty() {
        Constraint::affine(label, lin, constant)
    } else {
        Constraint::new(
            label,
            ConstraintForm::ConvexQuadraticLe {
                blocks: quad_blocks(q, offsets),
            },
            lin,
            constant,
        )
    }
}

/// `2^t <= tangent of sum blocks at x_ref + 1`.
fn exp_below_quad(label: String, q: &DMatrix<f64>, offsets: &[usize], var: usize, x_ref: &DVector<f64>, n: usize) -> Constraint {
    let (lin, c) = tangent(q, offsets, x_ref, n);
    Constraint::new(label, ConstraintForm::ExpLe { var, coef: 1.0 }, -lin, c - 1.0)
}

/// Builds the convex restriction at `point` for the given receiver type.
///
/// Every constraint is scaled by its own reference quantity (receiver noise, `Q0` or
/// `P_max`), which leaves the feasible set unchanged.
pub fn assemble_subproblem(
    scn: &Scenario,
    ch: &EffectiveChannels,
    point: &IteratePoint,
    rtype: ReceiverType,
) -> Result<ScaSubproblem> {
    let rows = ch.gram.nrows();
    let (w_cols, v_cols) = (point.info.ncols(), point.an.ncols());
    if point.info.nrows() != rows || point.an.nrows() != rows {
        return Err(invalid("beamformer rows do not match the effective channels"));
    }
    if w_cols != scn.m() || ch.info.len() != scn.m() || ch.energy.len() != scn.k() {
        return Err(invalid("beamformer columns do not match the scenario"));
    }
    let active: Vec<usize> = (0..scn.m()).filter(|&m| scn.weights[m] > 0.0).collect();
    let layout = VarLayout::new(rows, w_cols, v_cols, scn.k(), active);
    let n = layout.n_vars;
    let k_count = layout.k;

    let ir_noise: Vec<f64> = scn.irs.iter().map(|u| u.noise_power).collect();
    let er_noise: Vec<f64> = scn.ers.iter().map(|u| u.noise_power).collect();
    let scaled = |h: &CMatrix, s: f64| Arc::new(embed_hermitian(h) / s);
    let q_ir: Vec<_> = ch.info.iter().zip(&ir_noise).map(|(h, s)| scaled(h, *s)).collect();
    let q_er: Vec<_> = ch.energy.iter().zip(&er_noise).map(|(h, s)| scaled(h, *s)).collect();

    let x_ref = real_embed(&point.info, &point.an);
    let all_w: Vec<usize> = (0..w_cols).map(|j| layout.w_block(j)).collect();
    let all_v: Vec<usize> = (0..v_cols).map(|g| layout.v_block(g)).collect();
    let w_except = |m: usize| -> Vec<usize> {
        (0..w_cols).filter(|&j| j != m).map(|j| layout.w_block(j)).collect()
    };
    let join = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().chain(b).copied().collect() };

    let mut objective = DVector::zeros(n);
    let mut cons = Vec::new();
    let mut ir_slacks = Vec::with_capacity(layout.active.len());
    let mut kappa = Vec::with_capacity(layout.active.len());
    let sl = &point.slacks;

    for (i, &m) in layout.active.iter().enumerate() {
        let alpha = scn.weights[m];
        let shift = ir_noise[m].log2();
        let (rate, interf) = sl.ir_pair(m, rtype);
        let (rate, interf) = (rate - shift, interf - shift);
        ir_slacks.push((rate, interf));
        objective[layout.lambda(i)] = alpha;
        objective[layout.mu(i)] = -alpha;
        if layout.has_epigraph() {
            objective[layout.s(i)] = -alpha;
        }
        let (signal_blocks, interf_blocks) = match rtype {
            ReceiverType::TypeI => (join(&all_v, &all_w), join(&all_v, &w_except(m))),
            ReceiverType::TypeII => (all_w.clone(), w_except(m)),
        };
        cons.push(exp_below_quad(format!("rate[{m}]"), &q_ir[m], &signal_blocks, layout.lambda(i), &x_ref, n));
        cons.push(quad_below_exp(format!("interference[{m}]"), &q_ir[m], &interf_blocks, layout.mu(i), interf, n));

        let mut row = Vec::with_capacity(k_count);
        for k in 0..k_count {
            let shift = er_noise[k].log2();
            let kap = sl.kappa[m][k] - shift;
            row.push(kap);
            let blocks = join(&all_v, &w_except(m));
            cons.push(exp_below_quad(format!("leak[{m},{k}]"), &q_er[k], &blocks, layout.kappa(i, k), &x_ref, n));
            let mut lin = DVector::zeros(n);
            lin[layout.tau(k)] = 1.0;
            lin[layout.kappa(i, k)] = -1.0;
            lin[layout.s(i)] = -1.0;
            cons.push(Constraint::affine(format!("epigraph[{m},{k}]"), lin, 0.0));
        }
        kappa.push(row);
    }

    let mut tau = Vec::with_capacity(k_count);
    for k in 0..k_count {
        let t0 = sl.tau[k] - er_noise[k].log2();
        tau.push(t0);
        let blocks = join(&all_v, &all_w);
        cons.push(quad_below_exp(format!("eavesdrop[{k}]"), &q_er[k], &blocks, layout.tau(k), t0, n));
    }

    if scn.q0 > 0.0 && scn.k() > 0 {
        let mut hsum = CMatrix::zeros(rows, rows);
        for h in &ch.energy {
            hsum += h;
        }
        let q = embed_hermitian(&hsum) * (scn.xi / scn.q0);
        let (lin, c) = tangent(&q, &join(&all_w, &all_v), &x_ref, n);
        // 1 - (xi / Q0) * sum lb <= 0
        cons.push(Constraint::affine("energy", -lin, 1.0 + c));
    }

    let q_pow = Arc::new(embed_hermitian(&ch.gram) / scn.pmax);
    let pw_blocks = join(&all_w, &all_v);
    cons.push(Constraint::new(
        "power",
        ConstraintForm::ConvexQuadraticLe {
            blocks: quad_blocks(&q_pow, &pw_blocks),
        },
        DVector::zeros(n),
        -1.0,
    ));

    let mut problem = ConvexSubproblem::new(objective);
    for c in cons {
        problem.push(c);
    }
    problem.validate()?;
    Ok(ScaSubproblem {
        problem,
        layout,
        ir_slacks,
        tau,
        kappa,
    })
}
