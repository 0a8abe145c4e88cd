//! The proposed scheme and the benchmarks it is compared against.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analog::{build_analog, identity_analog};
use crate::channel::Scenario;
use crate::error::{invalid, Error, Result};
use crate::metrics::{evaluate, HybridBeamformer};
use crate::sca::{sca_solve_with_analog, ScaTrace, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Hybrid beamforming with artificial noise.
    #[default]
    Proposed,
    /// `N_RF = N` with an identity analog stage.
    FullyDigital,
    /// Hybrid beamforming with `V = 0`.
    NoAn,
    /// Proposed scheme with every near-field path visible to the whole array.
    FullVr,
    /// Proposed scheme with the ERs moved to the far field.
    FfBaseline,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Proposed,
        Scheme::FullyDigital,
        Scheme::NoAn,
        Scheme::FullVr,
        Scheme::FfBaseline,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::FullyDigital => "fully-digital",
            Scheme::NoAn => "no-an",
            Scheme::FullVr => "full-vr",
            Scheme::FfBaseline => "ff-baseline",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.label() == s)
            .ok_or_else(|| invalid(format!("unknown scheme `{s}`")))
    }
}

/// Where the far-field baseline puts the ERs, as multiples of the Rayleigh distance.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldPlacement {
    pub er_dist_over_dr: Vec<f64>,
    pub scatter_dist_over_dr: f64,
}

impl Default for FarFieldPlacement {
    fn default() -> Self {
        Self {
            er_dist_over_dr: vec![1.3, 1.1, 1.3],
            scatter_dist_over_dr: 1.1,
        }
    }
}

/// Converged output of one scheme run, with metrics taken from [`crate::metrics`].
#[derive(Debug, Clone)]
pub struct SchemeResult {
    pub scheme: Scheme,
    pub beamformer: HybridBeamformer,
    pub wssr: f64,
    /// Clamped per-IR secrecy rates.
    pub rates: Vec<f64>,
    pub secrecy_terms: Vec<f64>,
    /// Total harvested energy (W).
    pub energy: f64,
    pub power: f64,
    pub trace: ScaTrace,
}

fn finish(scheme: Scheme, scn: &Scenario, bf: HybridBeamformer, trace: ScaTrace) -> Result<SchemeResult> {
    let rep = evaluate(scn, &bf)?;
    Ok(SchemeResult {
        scheme,
        energy: rep.total_energy(),
        wssr: rep.wssr,
        rates: rep.rates,
        secrecy_terms: rep.secrecy_terms,
        power: rep.power,
        beamformer: bf,
        trace,
    })
}

fn run_hybrid(scheme: Scheme, scn: &Scenario, opts: &SolverOptions) -> Result<SchemeResult> {
    let analog = build_analog(scn)?;
    let (bf, trace) = sca_solve_with_analog(scn, &analog, false, opts)?;
    finish(scheme, scn, bf, trace)
}

pub fn run_proposed(scn: &Scenario, opts: &SolverOptions) -> Result<SchemeResult> {
    run_hybrid(Scheme::Proposed, scn, opts)
}

/// Same optimization with `F_A = I_N` and `N_RF = N`.
pub fn run_fully_digital(scn: &Scenario, opts: &SolverOptions) -> Result<SchemeResult> {
    let mut fd = scn.clone();
    fd.n_rf = scn.n_antennas();
    let analog = identity_analog(fd.n_rf)?;
    let (bf, trace) = sca_solve_with_analog(&fd, &analog, true, opts)?;
    finish(Scheme::FullyDigital, &fd, bf, trace)
}

/// Keeps the analog stage of the proposed scheme (including its AN columns) but sends no AN.
pub fn run_no_an(scn: &Scenario, opts: &SolverOptions) -> Result<SchemeResult> {
    let analog = build_analog(scn)?;
    let mut plain = scn.clone();
    plain.an_streams = 0;
    let (bf, trace) = sca_solve_with_analog(&plain, &analog, false, opts)?;
    finish(Scheme::NoAn, &plain, bf, trace)
}

pub fn run_full_vr(scn: &Scenario, opts: &SolverOptions) -> Result<SchemeResult> {
    let full = full_vr_scenario(scn)?;
    run_hybrid(Scheme::FullVr, &full, opts)
}

/// ER channels rebuilt with far-field steering; the analog AN columns follow.
pub fn run_ff_baseline(scn: &Scenario, placement: &FarFieldPlacement, opts: &SolverOptions) -> Result<SchemeResult> {
    let ff = ff_scenario(scn, placement)?;
    run_hybrid(Scheme::FfBaseline, &ff, opts)
}

pub fn full_vr_scenario(scn: &Scenario) -> Result<Scenario> {
    scn.with_full_visibility()
}

pub fn ff_scenario(scn: &Scenario, placement: &FarFieldPlacement) -> Result<Scenario> {
    scn.with_far_field_ers(&placement.er_dist_over_dr, placement.scatter_dist_over_dr)
}

/// The channel set a scheme actually runs on.
pub fn scheme_scenario(scheme: Scheme, scn: &Scenario, placement: &FarFieldPlacement) -> Result<Scenario> {
    match scheme {
        Scheme::FullVr => full_vr_scenario(scn),
        Scheme::FfBaseline => ff_scenario(scn, placement),
        Scheme::Proposed | Scheme::FullyDigital | Scheme::NoAn => Ok(scn.clone()),
    }
}

pub fn run_scheme(
    scheme: Scheme,
    scn: &Scenario,
    placement: &FarFieldPlacement,
    opts: &SolverOptions,
) -> Result<SchemeResult> {
    match scheme {
        Scheme::Proposed => run_proposed(scn, opts),
        Scheme::FullyDigital => run_fully_digital(scn, opts),
        Scheme::NoAn => run_no_an(scn, opts),
        Scheme::FullVr => run_full_vr(scn, opts),
        Scheme::FfBaseline => run_ff_baseline(scn, placement, opts),
    }
}
