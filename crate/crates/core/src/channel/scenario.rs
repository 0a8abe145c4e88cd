use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geometry::ArrayGeometry;
use super::path::{Path, Regime, UserChannel, UserKind};
use crate::error::{invalid, Error, Result};
use crate::experiment::ExperimentConfig;

/// Minimum angular separation between a scatterer and any user LoS direction (rad).
pub const SCATTERER_MIN_SEPARATION: f64 = 0.05;

/// Information receiver capability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum ReceiverType {
    /// Cannot cancel artificial noise.
    #[default]
    #[serde(rename = "type-i", alias = "I", alias = "type1")]
    TypeI,
    /// Cancels the (known) artificial noise before decoding.
    #[serde(rename = "type-ii", alias = "II", alias = "type2")]
    TypeII,
}

impl ReceiverType {
    pub fn label(self) -> &'static str {
        match self {
            ReceiverType::TypeI => "type-i",
            ReceiverType::TypeII => "type-ii",
        }
    }
}

impl std::fmt::Display for ReceiverType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for ReceiverType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "type-i" | "i" | "type1" => Ok(ReceiverType::TypeI),
            "type-ii" | "ii" | "type2" => Ok(ReceiverType::TypeII),
            _ => Err(invalid(format!("unknown receiver type `{s}`"))),
        }
    }
}

/// Everything the optimizer needs about one network realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub geometry: ArrayGeometry,
    /// Energy receivers (potential eavesdroppers), `K` entries.
    pub ers: Vec<UserChannel>,
    /// Information receivers, `M` entries.
    pub irs: Vec<UserChannel>,
    /// Energy-harvesting efficiency.
    pub xi: f64,
    /// Minimum total harvested energy (W).
    pub q0: f64,
    /// Transmit power budget (W).
    pub pmax: f64,
    /// Number of artificial-noise streams `G`.
    pub an_streams: usize,
    /// Number of RF chains.
    pub n_rf: usize,
    /// Secrecy-rate weights, one per IR.
    pub weights: Vec<f64>,
    pub receiver_type: ReceiverType,
}

impl Scenario {
    pub fn n_antennas(&self) -> usize {
        self.geometry.n_antennas
    }

    pub fn k(&self) -> usize {
        self.ers.len()
    }

    pub fn m(&self) -> usize {
        self.irs.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_antennas();
        if self.m() + self.an_streams > self.n_rf {
            return Err(invalid(format!(
                "M + G = {} exceeds the {} RF chains",
                self.m() + self.an_streams,
                self.n_rf
            )));
        }
        if self.n_rf == 0 {
            return Err(invalid("at least one RF chain is required"));
        }
        if self.weights.len() != self.m() {
            return Err(invalid(format!(
                "{} weights given for {} information receivers",
                self.weights.len(),
                self.m()
            )));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(invalid("weights must be finite and non-negative"));
        }
        if !(self.q0.is_finite() && self.q0 >= 0.0) {
            return Err(invalid(format!("energy target must be non-negative, got {}", self.q0)));
        }
        if !(self.pmax.is_finite() && self.pmax > 0.0) {
            return Err(invalid(format!("power budget must be positive, got {}", self.pmax)));
        }
        if !(self.xi > 0.0 && self.xi <= 1.0) {
            return Err(invalid(format!("harvesting efficiency must lie in (0, 1], got {}", self.xi)));
        }
        for u in self.ers.iter().chain(&self.irs) {
            if u.channel.len() != n {
                return Err(invalid("channel length does not match the antenna count"));
            }
            if !(u.noise_power.is_finite() && u.noise_power > 0.0) {
                return Err(invalid("noise powers must be positive"));
            }
        }
        Ok(())
    }

    /// Rebuild every near-field path with all antennas visible.
    pub fn with_full_visibility(&self) -> Result<Scenario> {
        let geom = &self.geometry;
        let mut out = self.clone();
        for u in out.ers.iter_mut().chain(out.irs.iter_mut()) {
            if u.paths.is_empty() {
                continue;
            }
            for p in u.paths.iter_mut() {
                if p.regime == Regime::NearField {
                    p.visibility = (0..geom.n_antennas).collect();
                }
            }
            *u = UserChannel::new(geom, u.user_kind, std::mem::take(&mut u.paths), u.noise_power)?;
        }
        Ok(out)
    }

    /// Move every ER to the far field: LoS at `ff_dist_over_dr[k] * d_R`, scatterers at
    /// `ff_scatter_dist_over_dr * d_R`. Angles and gain phases are kept.
    pub fn with_far_field_ers(
        &self,
        ff_dist_over_dr: &[f64],
        ff_scatter_dist_over_dr: f64,
    ) -> Result<Scenario> {
        if ff_dist_over_dr.len() < self.k() {
            return Err(invalid(format!(
                "{} far-field ER distances given for {} ERs",
                ff_dist_over_dr.len(),
                self.k()
            )));
        }
        let geom = &self.geometry;
        let dr = geom.rayleigh_dist;
        let mut out = self.clone();
        for (k, u) in out.ers.iter_mut().enumerate() {
            let paths = u
                .paths
                .iter()
                .enumerate()
                .map(|(l, p)| {
                    let dist = if l == 0 {
                        ff_dist_over_dr[k] * dr
                    } else {
                        ff_scatter_dist_over_dr * dr
                    };
                    let gain = Path::free_space_gain(geom, dist, p.gain.arg());
                    Path::far_field(geom, p.angle, dist, gain)
                })
                .collect();
            *u = UserChannel::new(geom, u.user_kind, paths, u.noise_power)?;
        }
        Ok(out)
    }
}

/// Convert a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Visibility regions for `count` near-field paths of `vr_size` antennas each.
///
/// Non-overlapping layouts are packed contiguously from antenna 0, leaving any remainder
/// invisible. When the blocks cannot fit side by side they are spread evenly from the first
/// to the last antenna, overlapping without wrapping around.
pub fn vr_layout(n_antennas: usize, vr_size: usize, count: usize) -> Result<Vec<Vec<usize>>> {
    if vr_size == 0 || vr_size > n_antennas {
        return Err(Error::Config {
            path: "vr_size".into(),
            message: format!("must lie in 1..={n_antennas}, got {vr_size}"),
        });
    }
    let starts: Vec<usize> = if vr_size * count <= n_antennas {
        (0..count).map(|i| i * vr_size).collect()
    } else {
        let span = (n_antennas - vr_size) as f64;
        (0..count)
            .map(|i| {
                if count == 1 {
                    0
                } else {
                    (i as f64 * span / (count - 1) as f64).round() as usize
                }
            })
            .collect()
    };
    Ok(starts.into_iter().map(|s| (s..s + vr_size).collect()).collect())
}

/// Deterministically generate a scenario from a configuration and a seed.
///
/// ERs get a near-field LoS path plus `l_er - 1` near-field scatterers shared by all ERs;
/// IRs get a far-field LoS path plus `l_ir - 1` shared far-field scatterers. LoS gains are
/// real; scatterer gains carry independent uniform phases.
pub fn generate_scenario(cfg: &ExperimentConfig, seed: u64) -> Result<Scenario> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let geom = ArrayGeometry::new(cfg.n_antennas, cfg.carrier_ghz * 1e9)?;
    let dr = geom.rayleigh_dist;
    let noise = dbm_to_watts(cfg.noise_dbm);
    let k = cfg.er_positions.len();

    let los_angles: Vec<f64> = cfg
        .er_positions
        .iter()
        .chain(&cfg.ir_positions)
        .map(|p| p.0)
        .collect();
    let draw_angle = |rng: &mut ChaCha8Rng| loop {
        let a = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
        if los_angles
            .iter()
            .all(|l| (a - l).abs() >= SCATTERER_MIN_SEPARATION)
        {
            break a;
        }
    };
    let nf_scatterers: Vec<f64> = (1..cfg.l_er).map(|_| draw_angle(&mut rng)).collect();
    let ff_scatterers: Vec<f64> = (1..cfg.l_ir).map(|_| draw_angle(&mut rng)).collect();

    let vrs = vr_layout(cfg.n_antennas, cfg.vr_size, k + nf_scatterers.len())?;
    let nf_scatter_dist = cfg.nf_scatter_dist_over_dr * dr;
    let ff_scatter_dist = cfg.ff_scatter_dist_over_dr * dr;

    let mut ers = Vec::with_capacity(k);
    for (i, &(angle, frac)) in cfg.er_positions.iter().enumerate() {
        let dist = frac * dr;
        let mut paths = vec![Path::near_field(
            angle,
            dist,
            Path::free_space_gain(&geom, dist, 0.0),
            vrs[i].clone(),
        )];
        for (l, &sa) in nf_scatterers.iter().enumerate() {
            let phase = rng.random_range(-PI..PI);
            paths.push(Path::near_field(
                sa,
                nf_scatter_dist,
                Path::free_space_gain(&geom, nf_scatter_dist, phase),
                vrs[k + l].clone(),
            ));
        }
        ers.push(UserChannel::new(&geom, UserKind::EnergyReceiver, paths, noise)?);
    }

    let mut irs = Vec::with_capacity(cfg.ir_positions.len());
    for &(angle, frac) in &cfg.ir_positions {
        let dist = frac * dr;
        let mut paths = vec![Path::far_field(
            &geom,
            angle,
            dist,
            Path::free_space_gain(&geom, dist, 0.0),
        )];
        for &sa in &ff_scatterers {
            let phase = rng.random_range(-PI..PI);
            paths.push(Path::far_field(
                &geom,
                sa,
                ff_scatter_dist,
                Path::free_space_gain(&geom, ff_scatter_dist, phase),
            ));
        }
        irs.push(UserChannel::new(&geom, UserKind::InfoReceiver, paths, noise)?);
    }

    let scn = Scenario {
        geometry: geom,
        ers,
        irs,
        xi: cfg.xi,
        q0: cfg.q0_watts,
        pmax: cfg.pmax_watts,
        an_streams: cfg.an_streams(),
        n_rf: cfg.n_rf,
        weights: cfg.weights(),
        receiver_type: cfg.receiver_type,
    };
    scn.validate()?;
    Ok(scn)
}
