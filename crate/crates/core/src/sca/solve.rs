use std::time::{Duration, Instant};

use super::reduce::ReducedBasis;
use super::feasibility::{digital_power, init_digital, received_energy, restore_with_margin};
use super::subproblem::{assemble_subproblem, IteratePoint, SlackPoint};
use super::terms::{effective_channels, quad_terms, EffectiveChannels};
use crate::analog::build_analog;
use crate::channel::Scenario;
use crate::convex::{solve, BarrierOptions};
use crate::error::{Error, Result};
use crate::metrics::HybridBeamformer;
use crate::{CMatrix, C64};

/// Slack offset used to move the previous iterate strictly inside each subproblem.
const INTERIOR_OFFSET: f64 = 1e-6;
/// An SCA step that lowers the exact objective by more than this is rejected.
const MONOTONE_SLACK: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Stop when the objective gain falls below `rel_tol * max(1, |objective|)`.
    pub rel_tol: f64,
    pub max_iters: usize,
    pub barrier: BarrierOptions,
    /// Seed of the random digital initialization.
    pub seed: u64,
    /// Iteration budget of the max-energy feasibility phase.
    pub restore_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-4,
            max_iters: 50,
            barrier: BarrierOptions::default(),
            seed: 0,
            restore_iters: 2000,
        }
    }
}

/// History of one SCA run.
#[derive(Debug, Clone, Default)]
pub struct ScaTrace {
    /// Exact (unclamped) weighted secrecy objective of the initial point and of every
    /// accepted iterate, in bps/Hz.
    pub objectives: Vec<f64>,
    /// Largest relative violation of the energy and power constraints per entry of `objectives`.
    pub residuals: Vec<f64>,
    /// Number of convex subproblems solved.
    pub iterations: usize,
    pub converged: bool,
    /// Subproblem solutions discarded because they lowered the objective.
    pub rejected_steps: usize,
    pub newton_steps: usize,
    /// Some converged per-IR secrecy term is negative; its reported rate is clamped to zero.
    pub negative_secrecy: bool,
    pub wall_time: Duration,
}

impl ScaTrace {
    pub fn final_objective(&self) -> f64 {
        self.objectives.last().copied().unwrap_or(0.0)
    }

    /// Largest drop between consecutive objectives (zero for a monotone trace).
    pub fn max_decrease(&self) -> f64 {
        self.objectives
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(0.0, f64::max)
    }
}

fn energy_active(scn: &Scenario) -> bool {
    scn.q0 > 0.0 && scn.k() > 0
}

fn residual(scn: &Scenario, ch: &EffectiveChannels, info: &CMatrix, an: &CMatrix) -> f64 {
    let mut r = (digital_power(&ch.gram, info, an) / scn.pmax - 1.0).max(0.0);
    if energy_active(scn) {
        let e = scn.xi * received_energy(ch, info, an);
        r = r.max((scn.q0 - e) / scn.q0);
    }
    r
}

fn tight_point(scn: &Scenario, ch: &EffectiveChannels, info: CMatrix, an: CMatrix) -> IteratePoint {
    let terms = quad_terms(ch, &info, &an);
    let ir: Vec<f64> = scn.irs.iter().map(|u| u.noise_power).collect();
    let er: Vec<f64> = scn.ers.iter().map(|u| u.noise_power).collect();
    IteratePoint {
        slacks: SlackPoint::tight(&terms, &ir, &er),
        info,
        an,
    }
}

/// Scales a feasible pair so both the power and the energy constraints hold strictly.
fn into_interior(scn: &Scenario, ch: &EffectiveChannels, info: &mut CMatrix, an: &mut CMatrix) {
    let p = digital_power(&ch.gram, info, an);
    if p < scn.pmax * (1.0 - 1e-9) {
        return;
    }
    let mut s2: f64 = 1.0 - 1e-6;
    if energy_active(scn) {
        let e = scn.xi * received_energy(ch, info, an);
        if e > scn.q0 {
            // halfway between the energy floor and the power ceiling
            s2 = s2.min(0.5 * (1.0 + scn.q0 / e));
        }
    }
    let s = C64::from(s2.sqrt());
    *info *= s;
    *an *= s;
}

/// SCA with the analog beamformer built from the scenario geometry.
pub fn sca_solve(scn: &Scenario, opts: &SolverOptions) -> Result<(HybridBeamformer, ScaTrace)> {
    let analog = build_analog(scn)?;
    sca_solve_with_analog(scn, &analog, false, opts)
}

/// SCA over the digital beams for a fixed analog stage.
///
/// `V` gets `scn.an_streams` columns (zero disables artificial noise). With
/// `fully_digital` the analog stage must be the identity and is not checked for unit modulus.
pub fn sca_solve_with_analog(
    scn: &Scenario,
    analog: &CMatrix,
    fully_digital: bool,
    opts: &SolverOptions,
) -> Result<(HybridBeamformer, ScaTrace)> {
    let started = Instant::now();
    scn.validate()?;
    let rtype = scn.receiver_type;
    let ch = effective_channels(scn, analog)?;
    let (w0, v0) = init_digital(scn, analog, opts.seed)?;
    let (mut info, mut an) = restore_with_margin(scn, analog, &w0, &v0, opts.restore_iters, 1.0 + 1e-6)?;
    into_interior(scn, &ch, &mut info, &mut an);

    let reduced = ReducedBasis::new(&ch)?;
    let full_ch = ch;
    let ch = reduced.channels(&full_ch);
    let (info, an) = (reduced.project(&info), reduced.project(&an));

    let mut trace = ScaTrace::default();
    let mut point = tight_point(scn, &ch, info, an);
    let mut objective = point.slacks.objective(&scn.weights, rtype);
    trace.objectives.push(objective);
    trace.residuals.push(residual(scn, &ch, &point.info, &point.an));

    let any_active = scn.weights.iter().any(|w| *w > 0.0) && reduced.dim() > 0;
    while any_active && trace.iterations < opts.max_iters {
        trace.iterations += 1;
        let iteration = trace.iterations;
        let wrap = |e: Error| match e {
            Error::Solver { .. } => e,
            other => Error::Solver {
                iteration,
                message: other.to_string(),
            },
        };
        let sub = assemble_subproblem(scn, &ch, &point, rtype).map_err(wrap)?;
        let start = sub.start_vector(&point.info, &point.an, INTERIOR_OFFSET);
        let report = solve(&sub.problem, &start, &opts.barrier).map_err(wrap)?;
        trace.newton_steps += report.newton_steps;
        let (info, an) = sub.beams(&report.x);
        let next = tight_point(scn, &ch, info, an);
        let next_obj = next.slacks.objective(&scn.weights, rtype);
        if !next_obj.is_finite() || next_obj < objective - MONOTONE_SLACK {
            trace.rejected_steps += 1;
            trace.converged = (objective - next_obj).abs() <= opts.rel_tol * objective.abs().max(1.0);
            break;
        }
        let gain = next_obj - objective;
        point = next;
        objective = next_obj;
        trace.objectives.push(objective);
        trace.residuals.push(residual(scn, &ch, &point.info, &point.an));
        if gain <= opts.rel_tol * objective.abs().max(1.0) {
            trace.converged = true;
            break;
        }
    }
    if !any_active {
        trace.converged = true;
    }

    trace.negative_secrecy = (0..scn.m())
        .any(|m| scn.weights[m] > 0.0 && point.slacks.secrecy_term(m, rtype) < 0.0);
    let (info, an) = (reduced.lift(&point.info), reduced.lift(&point.an));
    let bf = if fully_digital {
        HybridBeamformer::fully_digital(info, an)?
    } else {
        HybridBeamformer::new(analog.clone(), info, an)?
    };
    trace.wall_time = started.elapsed();
    Ok((bf, trace))
}
