use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{dbm_to_watts, ArrayGeometry, ReceiverType};
use crate::error::{Error, Result};
use crate::schemes::Scheme;

/// `(angle_rad, distance / d_R)`.
pub type Position = (f64, f64);

/// SCA stopping rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub rel_tol: f64,
    pub max_iters: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-4,
            max_iters: 50,
        }
    }
}

/// Full description of an experiment. Every field has a default; an empty config file
/// yields the reference parameter set (N = 128, N_RF = 10, K = 3, M = 2 at 30 GHz).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_antennas: usize,
    pub n_rf: usize,
    pub carrier_ghz: f64,
    pub er_positions: Vec<Position>,
    pub ir_positions: Vec<Position>,
    /// Paths per ER (LoS + shared near-field scatterers).
    pub l_er: usize,
    /// Paths per IR (LoS + shared far-field scatterers).
    pub l_ir: usize,
    pub vr_size: usize,
    pub q0_watts: f64,
    /// When set, the energy target of every trial is this fraction of the maximum energy
    /// the scheme can harvest in that trial, and `q0_watts` is ignored.
    pub q0_fraction: Option<f64>,
    pub pmax_watts: f64,
    pub xi: f64,
    pub noise_dbm: f64,
    /// Defaults to the number of ERs.
    pub an_streams: Option<usize>,
    /// Defaults to all ones.
    pub weights: Option<Vec<f64>>,
    pub receiver_type: ReceiverType,
    pub scheme: Scheme,
    pub trials: usize,
    pub master_seed: u64,
    /// ER LoS distances (over d_R) used by the far-field baseline.
    pub er_ff_dist_over_dr: Vec<f64>,
    pub nf_scatter_dist_over_dr: f64,
    pub ff_scatter_dist_over_dr: f64,
    pub solver: SolverSettings,
    /// Write measured run times to the CSV. Off by default so output bytes depend only on
    /// the configuration and seed.
    pub record_wall_time: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_antennas: 128,
            n_rf: 10,
            carrier_ghz: 30.0,
            er_positions: vec![(1.3, 0.25), (0.0, 0.1), (-1.1, 0.3)],
            ir_positions: vec![(1.0, 1.1), (-0.2, 1.3)],
            l_er: 2,
            l_ir: 3,
            vr_size: 32,
            q0_watts: 5e-8,
            q0_fraction: None,
            pmax_watts: 1.0,
            xi: 0.5,
            noise_dbm: -80.0,
            an_streams: None,
            weights: None,
            receiver_type: ReceiverType::TypeI,
            scheme: Scheme::Proposed,
            trials: 10,
            master_seed: 1,
            er_ff_dist_over_dr: vec![1.3, 1.1, 1.3],
            nf_scatter_dist_over_dr: 0.1,
            ff_scatter_dist_over_dr: 1.1,
            solver: SolverSettings::default(),
            record_wall_time: false,
        }
    }
}

fn cfg_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    /// Reduced preset for desk-scale runs: N = 32, N_RF = 6, K = 2, M = 2, G = 2.
    pub fn desk_scale() -> Self {
        let mut cfg = Self::default();
        cfg.apply_desk_scale();
        cfg
    }

    pub fn apply_desk_scale(&mut self) {
        self.n_antennas = 32;
        self.n_rf = 6;
        self.er_positions.truncate(2);
        if self.er_positions.len() < 2 {
            self.er_positions = vec![(1.3, 0.25), (0.0, 0.1)];
        }
        self.ir_positions.truncate(2);
        if self.ir_positions.len() < 2 {
            self.ir_positions = vec![(1.0, 1.1), (-0.2, 1.3)];
        }
        self.an_streams = Some(2);
        self.weights = None;
        // three near-field paths (2 LoS + 1 scatterer) side by side
        self.vr_size = 10;
        self.er_ff_dist_over_dr = vec![1.3, 1.1];
    }

    /// Geometry for the IR-angle study: one IR at `1.5 d_R` and three ERs at
    /// `(1.6, 0.3 d_R)`, `(0, 0.1 d_R)`, `(-1.6, 0.3 d_R)`.
    pub fn with_angle_sweep_geometry(&self, ir_angle: f64) -> Self {
        Self {
            er_positions: vec![(1.6, 0.3), (0.0, 0.1), (-1.6, 0.3)],
            ir_positions: vec![(ir_angle, 1.5)],
            er_ff_dist_over_dr: vec![1.3, 1.1, 1.3],
            an_streams: None,
            weights: None,
            ..self.clone()
        }
    }

    pub fn k(&self) -> usize {
        self.er_positions.len()
    }

    pub fn m(&self) -> usize {
        self.ir_positions.len()
    }

    pub fn an_streams(&self) -> usize {
        self.an_streams.unwrap_or(self.k())
    }

    pub fn weights(&self) -> Vec<f64> {
        self.weights.clone().unwrap_or_else(|| vec![1.0; self.m()])
    }

    pub fn noise_watts(&self) -> f64 {
        dbm_to_watts(self.noise_dbm)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_antennas == 0 {
            return Err(cfg_err("n_antennas", "must be at least 1"));
        }
        if self.n_rf == 0 {
            return Err(cfg_err("n_rf", "must be at least 1"));
        }
        if !(self.carrier_ghz.is_finite() && self.carrier_ghz > 0.0) {
            return Err(cfg_err("carrier_ghz", "must be positive"));
        }
        let geom = ArrayGeometry::new(self.n_antennas, self.carrier_ghz * 1e9)?;
        let nf_floor = geom.fresnel_dist / geom.rayleigh_dist;
        let in_nf = |v: f64| v.is_finite() && v > nf_floor && v < 1.0;
        let in_ff = |v: f64| v.is_finite() && v > 1.0;

        if self.ir_positions.is_empty() {
            return Err(cfg_err("ir_positions", "at least one information receiver is required"));
        }
        for (i, p) in self.er_positions.iter().enumerate() {
            if !p.0.is_finite() {
                return Err(cfg_err(format!("er_positions[{i}][0]"), "angle must be finite"));
            }
            if !in_nf(p.1) {
                return Err(cfg_err(
                    format!("er_positions[{i}][1]"),
                    format!("must lie in ({nf_floor:.4}, 1) so the ER is in the near field"),
                ));
            }
        }
        for (i, p) in self.ir_positions.iter().enumerate() {
            if !p.0.is_finite() {
                return Err(cfg_err(format!("ir_positions[{i}][0]"), "angle must be finite"));
            }
            if !in_ff(p.1) {
                return Err(cfg_err(format!("ir_positions[{i}][1]"), "must exceed 1 (far field)"));
            }
        }
        if self.l_er == 0 {
            return Err(cfg_err("l_er", "must be at least 1"));
        }
        if self.l_ir == 0 {
            return Err(cfg_err("l_ir", "must be at least 1"));
        }
        if self.l_er > 1 && !in_nf(self.nf_scatter_dist_over_dr) {
            return Err(cfg_err(
                "nf_scatter_dist_over_dr",
                format!("must lie in ({nf_floor:.4}, 1)"),
            ));
        }
        if self.l_ir > 1 && !in_ff(self.ff_scatter_dist_over_dr) {
            return Err(cfg_err("ff_scatter_dist_over_dr", "must exceed 1"));
        }
        if self.vr_size == 0 || self.vr_size > self.n_antennas {
            return Err(cfg_err(
                "vr_size",
                format!("must lie in 1..={}, got {}", self.n_antennas, self.vr_size),
            ));
        }
        if !(self.q0_watts.is_finite() && self.q0_watts >= 0.0) {
            return Err(cfg_err("q0_watts", "must be non-negative"));
        }
        if let Some(f) = self.q0_fraction {
            if !(f.is_finite() && f >= 0.0) {
                return Err(cfg_err("q0_fraction", "must be non-negative"));
            }
        }
        if !(self.pmax_watts.is_finite() && self.pmax_watts > 0.0) {
            return Err(cfg_err("pmax_watts", "must be positive"));
        }
        if !(self.xi > 0.0 && self.xi <= 1.0) {
            return Err(cfg_err("xi", "must lie in (0, 1]"));
        }
        if !self.noise_dbm.is_finite() {
            return Err(cfg_err("noise_dbm", "must be finite"));
        }
        let g = self.an_streams();
        if self.m() + g > self.n_rf {
            return Err(cfg_err(
                "an_streams",
                format!("M + G = {} exceeds n_rf = {}", self.m() + g, self.n_rf),
            ));
        }
        if g > 0 && self.k() == 0 {
            return Err(cfg_err("an_streams", "artificial noise needs at least one ER"));
        }
        if let Some(w) = &self.weights {
            if w.len() != self.m() {
                return Err(cfg_err("weights", format!("expected {} entries", self.m())));
            }
            if let Some(i) = w.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(cfg_err(format!("weights[{i}]"), "must be non-negative"));
            }
        }
        if self.trials == 0 {
            return Err(cfg_err("trials", "must be at least 1"));
        }
        if let Some(i) = self.er_ff_dist_over_dr.iter().position(|v| !in_ff(*v)) {
            return Err(cfg_err(format!("er_ff_dist_over_dr[{i}]"), "must exceed 1"));
        }
        if self.scheme == Scheme::FfBaseline && self.er_ff_dist_over_dr.len() < self.k() {
            return Err(cfg_err("er_ff_dist_over_dr", format!("needs {} entries", self.k())));
        }
        if !(self.solver.rel_tol.is_finite() && self.solver.rel_tol > 0.0) {
            return Err(cfg_err("solver.rel_tol", "must be positive"));
        }
        if self.solver.max_iters == 0 {
            return Err(cfg_err("solver.max_iters", "must be at least 1"));
        }
        Ok(())
    }
}

/// Parse and validate a JSON configuration from text. Blank input means all defaults.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig> {
    let cfg = if text.trim().is_empty() {
        ExperimentConfig::default()
    } else {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            cfg_err(path, e.into_inner().to_string())
        })?
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Read, parse and validate a configuration file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}
