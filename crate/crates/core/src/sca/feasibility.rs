//! Random initialization, feasibility restoration and the max-energy phase.

use nalgebra::SymmetricEigen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::terms::{effective_channels, EffectiveChannels};
use crate::channel::Scenario;
use crate::error::{invalid, Error, Result};
use crate::{CMatrix, CVector, C64};

/// Relative eigenvalue floor when inverting the (possibly singular) Gram matrix `F_A^H F_A`.
const PINV_EPS: f64 = 1e-10;
/// The max-energy phase stops once it clears `Q0` by this relative margin.
pub const RESTORE_MARGIN: f64 = 1e-3;
/// Relative improvement below which the max-energy iteration counts as converged.
const MAX_ENERGY_TOL: f64 = 1e-13;

/// `sum_c x_c^H (F_A^H F_A) x_c` over the columns of `info` and `an`.
pub fn digital_power(gram: &CMatrix, info: &CMatrix, an: &CMatrix) -> f64 {
    info.column_iter()
        .chain(an.column_iter())
        .map(|x| x.dotc(&(gram * x)).re)
        .sum()
}

/// `sum_k (E_k + F_k)` before the conversion efficiency is applied.
pub fn received_energy(ch: &EffectiveChannels, info: &CMatrix, an: &CMatrix) -> f64 {
    ch.energy_vectors
        .iter()
        .map(|u| {
            info.column_iter()
                .chain(an.column_iter())
                .map(|x| u.dotc(&x).norm_sqr())
                .sum::<f64>()
        })
        .sum()
}

/// Complex Gaussian digital beamformers, scaled so the transmit power equals `P_max`.
/// `W` has `scn.m()` columns and `V` has `scn.an_streams` columns.
pub fn init_digital(scn: &Scenario, analog: &CMatrix, seed: u64) -> Result<(CMatrix, CMatrix)> {
    let rows = analog.ncols();
    if analog.nrows() != scn.n_antennas() {
        return Err(invalid("analog beamformer does not match the array size"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |cols: usize| {
        CMatrix::from_fn(rows, cols, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
    };
    let mut w = draw(scn.m());
    let mut v = draw(scn.an_streams);
    let gram = analog.ad_mul(analog);
    let power = digital_power(&gram, &w, &v);
    if !(power > 0.0) {
        return Err(invalid("random beamformer has no radiated power"));
    }
    let s = (scn.pmax / power).sqrt();
    w *= C64::from(s);
    v *= C64::from(s);
    Ok((w, v))
}

/// Closed-form SCA step for `max sum_k sum_c |u_k^H x_c|^2` under the power budget:
/// the linearized objective is maximized by `x_c ∝ (F_A^H F_A)^+ H_sum x_c^{ref}`.
struct EnergyAscent {
    ascent: CMatrix,
    gram: CMatrix,
    pmax: f64,
}

impl EnergyAscent {
    fn new(ch: &EffectiveChannels, pmax: f64) -> Result<Self> {
        let dim = ch.gram.nrows();
        let mut hsum = CMatrix::zeros(dim, dim);
        for h in &ch.energy {
            hsum += h;
        }
        let scale = ch.gram.norm().max(f64::MIN_POSITIVE);
        let pinv = ch
            .gram
            .clone()
            .pseudo_inverse(PINV_EPS * scale)
            .map_err(|e| invalid(format!("pseudo-inverse failed: {e}")))?;
        Ok(Self {
            ascent: pinv * hsum,
            gram: ch.gram.clone(),
            pmax,
        })
    }

    fn normalize(&self, info: &mut CMatrix, an: &mut CMatrix) -> bool {
        let p = digital_power(&self.gram, info, an);
        if !(p > 0.0) {
            return false;
        }
        let s = C64::from((self.pmax / p).sqrt());
        *info *= s;
        *an *= s;
        true
    }

    fn step(&self, info: &CMatrix, an: &CMatrix) -> Option<(CMatrix, CMatrix)> {
        let mut w = &self.ascent * info;
        let mut v = &self.ascent * an;
        self.normalize(&mut w, &mut v).then_some((w, v))
    }
}

/// Exact maximum of `sum_k (E_k + F_k)` over digital beams with power `P_max`:
/// `P_max * lambda_max(U^H H_sum U)` with `U` an orthonormal basis of `range(F_A)`.
fn max_energy_eigen(ch: &EffectiveChannels, pmax: f64) -> (f64, CVector) {
    let dim = ch.gram.nrows();
    let eig = SymmetricEigen::new(ch.gram.clone());
    let top = eig.eigenvalues.iter().copied().fold(0.0f64, f64::max);
    // whitened basis: columns q_i / sqrt(e_i) map unit vectors to unit transmit power
    let keep: Vec<usize> = (0..dim)
        .filter(|&i| eig.eigenvalues[i] > PINV_EPS * top)
        .collect();
    if keep.is_empty() {
        return (0.0, CVector::zeros(dim));
    }
    let whiten = CMatrix::from_fn(dim, keep.len(), |r, c| {
        let i = keep[c];
        eig.eigenvectors[(r, i)] / eig.eigenvalues[i].sqrt()
    });
    let mut hsum = CMatrix::zeros(dim, dim);
    for h in &ch.energy {
        hsum += h;
    }
    let reduced = whiten.ad_mul(&(hsum * &whiten));
    let reduced = (&reduced + reduced.adjoint()) * C64::from(0.5);
    let red = SymmetricEigen::new(reduced);
    let (best, val) = red
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let dir = &whiten * red.eigenvectors.column(best) * C64::from(pmax.sqrt());
    (pmax * val.max(0.0), dir)
}

/// Runs the max-energy SCA from `(info, an)` until the harvested energy reaches `stop_at`
/// (watts, after efficiency) or the iteration converges. Returns the final beams and energy.
fn ascend(
    scn: &Scenario,
    ch: &EffectiveChannels,
    asc: &EnergyAscent,
    info: &CMatrix,
    an: &CMatrix,
    stop_at: f64,
    max_iters: usize,
) -> (CMatrix, CMatrix, f64) {
    let mut w = info.clone();
    let mut v = an.clone();
    if !asc.normalize(&mut w, &mut v) {
        let (_, dir) = max_energy_eigen(ch, scn.pmax);
        w.fill(C64::new(0.0, 0.0));
        v.fill(C64::new(0.0, 0.0));
        if w.ncols() > 0 {
            w.set_column(0, &dir);
        } else if v.ncols() > 0 {
            v.set_column(0, &dir);
        }
    }
    let mut energy = scn.xi * received_energy(ch, &w, &v);
    for _ in 0..max_iters {
        if energy >= stop_at {
            break;
        }
        let Some((w2, v2)) = asc.step(&w, &v) else { break };
        let e2 = scn.xi * received_energy(ch, &w2, &v2);
        let gained = e2 - energy;
        if e2 >= energy {
            w = w2;
            v = v2;
            energy = e2;
        }
        if gained <= MAX_ENERGY_TOL * energy.abs() {
            break;
        }
    }
    (w, v, energy)
}

/// Largest total harvested energy `xi * max sum_k (E_k + F_k)` reachable under `P_max`
/// with the given analog beamformer, found by the max-energy SCA iteration.
pub fn max_harvestable_energy(scn: &Scenario, analog: &CMatrix) -> Result<f64> {
    let ch = effective_channels(scn, analog)?;
    if scn.k() == 0 {
        return Ok(0.0);
    }
    let asc = EnergyAscent::new(&ch, scn.pmax)?;
    // start from the sum of projected ER directions so every ER is excited
    let dim = analog.ncols();
    let mut start = CVector::zeros(dim);
    for u in &ch.energy_vectors {
        start += u;
    }
    let start = CMatrix::from_columns(&[start]);
    let (_, _, e) = ascend(scn, &ch, &asc, &start, &CMatrix::zeros(dim, 0), f64::INFINITY, 20_000);
    // the iteration is monotone but may stall on a degenerate start; never report less than
    // the exact eigen value
    let (exact, _) = max_energy_eigen(&ch, scn.pmax);
    Ok(e.max(scn.xi * exact))
}

/// Returns beams satisfying `xi * sum_k (E_k + F_k) >= Q0` and the power budget.
///
/// Feasible input is returned unchanged. Otherwise power is first capped, then the
/// max-energy SCA runs from the input until the energy clears `Q0 (1 + 1e-3)`, and the
/// smallest blend between the input and that point that still clears the target is returned.
pub fn restore_feasibility(
    scn: &Scenario,
    analog: &CMatrix,
    info: &CMatrix,
    an: &CMatrix,
    max_iters: usize,
) -> Result<(CMatrix, CMatrix)> {
    restore_with_margin(scn, analog, info, an, max_iters, 1.0)
}

/// As [`restore_feasibility`], but input counts as feasible only when its energy is at
/// least `accept * Q0`.
pub(crate) fn restore_with_margin(
    scn: &Scenario,
    analog: &CMatrix,
    info: &CMatrix,
    an: &CMatrix,
    max_iters: usize,
    accept: f64,
) -> Result<(CMatrix, CMatrix)> {
    let ch = effective_channels(scn, analog)?;
    let mut w = info.clone();
    let mut v = an.clone();
    let power = digital_power(&ch.gram, &w, &v);
    if power > scn.pmax {
        let s = C64::from((scn.pmax / power).sqrt());
        w *= s;
        v *= s;
    }
    if scn.q0 <= 0.0 {
        return Ok((w, v));
    }
    if scn.k() == 0 {
        return Err(Error::Infeasible(format!(
            "energy target {:e} W with no energy receivers",
            scn.q0
        )));
    }
    let energy = scn.xi * received_energy(&ch, &w, &v);
    if energy >= accept * scn.q0 {
        return Ok((w, v));
    }

    let target = scn.q0 * (1.0 + RESTORE_MARGIN);
    let asc = EnergyAscent::new(&ch, scn.pmax)?;
    let (mut w_hi, mut v_hi, mut e_hi) = ascend(scn, &ch, &asc, &w, &v, target, max_iters);
    if e_hi < scn.q0 {
        let (exact, dir) = max_energy_eigen(&ch, scn.pmax);
        if scn.xi * exact < scn.q0 * (1.0 + 1e-9) {
            return Err(Error::Infeasible(format!(
                "energy target {:e} W exceeds the maximum harvestable {:e} W",
                scn.q0,
                scn.xi * exact
            )));
        }
        // iteration budget ran out before the target: take the exact maximizer
        w_hi.fill(C64::new(0.0, 0.0));
        v_hi.fill(C64::new(0.0, 0.0));
        if w_hi.ncols() > 0 {
            w_hi.set_column(0, &dir);
        } else {
            v_hi.set_column(0, &dir);
        }
        e_hi = scn.xi * received_energy(&ch, &w_hi, &v_hi);
    }
    let goal = target.min(e_hi);

    // bisection keeps `hi` feasible and `lo` infeasible
    let blend = |beta: f64| -> Option<(CMatrix, CMatrix, f64)> {
        let a = C64::from(1.0 - beta);
        let b = C64::from(beta);
        let mut bw = &w * a + &w_hi * b;
        let mut bv = &v * a + &v_hi * b;
        asc.normalize(&mut bw, &mut bv).then(|| {
            let e = scn.xi * received_energy(&ch, &bw, &bv);
            (bw, bv, e)
        })
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut best = (w_hi.clone(), v_hi.clone());
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        match blend(mid) {
            Some((bw, bv, e)) if e >= goal => {
                hi = mid;
                best = (bw, bv);
            }
            _ => lo = mid,
        }
    }
    Ok(best)
}
