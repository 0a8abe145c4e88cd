//! Ground-truth link metrics for a given hybrid beamformer.
//!
//! Every quantity here is evaluated directly from the channels, without any of the
//! slack variables or bounds used by the optimizer, so these functions serve as the
//! reference against which optimizer outputs are checked.

use crate::channel::{ReceiverType, Scenario};
use crate::error::{invalid, Result};
use crate::{CMatrix, CVector};

/// Tolerance on `| |[F_A]_{n,i}| - 1 |` for hybrid beamformers.
pub const UNIT_MODULUS_TOL: f64 = 1e-12;

/// Analog matrix `F_A` (N x N_RF), digital information beams `W` (N_RF x M) and
/// artificial-noise beams `V` (N_RF x G).
#[derive(Debug, Clone, PartialEq)]
pub struct HybridBeamformer {
    pub analog: CMatrix,
    pub info: CMatrix,
    pub an: CMatrix,
    /// Fully-digital mode: `analog` is the identity and the unit-modulus constraint is dropped.
    pub analog_is_identity: bool,
}

impl HybridBeamformer {
    pub fn new(analog: CMatrix, info: CMatrix, an: CMatrix) -> Result<Self> {
        if let Some(dev) = max_modulus_deviation(&analog) {
            if dev > UNIT_MODULUS_TOL {
                return Err(invalid(format!(
                    "analog beamformer entries must be unit-modulus (deviation {dev:e})"
                )));
            }
        }
        let bf = Self {
            analog,
            info,
            an,
            analog_is_identity: false,
        };
        bf.check_shapes()?;
        Ok(bf)
    }

    /// Fully-digital beamformer: `F_A = I_N`.
    pub fn fully_digital(info: CMatrix, an: CMatrix) -> Result<Self> {
        let n = info.nrows();
        let bf = Self {
            analog: CMatrix::identity(n, n),
            info,
            an,
            analog_is_identity: true,
        };
        bf.check_shapes()?;
        Ok(bf)
    }

    fn check_shapes(&self) -> Result<()> {
        let n_rf = self.analog.ncols();
        if self.info.nrows() != n_rf || self.an.nrows() != n_rf {
            return Err(invalid(format!(
                "digital beamformers need {n_rf} rows, got {} and {}",
                self.info.nrows(),
                self.an.nrows()
            )));
        }
        Ok(())
    }

    pub fn n_rf(&self) -> usize {
        self.analog.ncols()
    }

    /// `F_A W`, the per-antenna information precoder.
    pub fn info_precoder(&self) -> CMatrix {
        if self.analog_is_identity {
            self.info.clone()
        } else {
            &self.analog * &self.info
        }
    }

    /// `F_A V`, the per-antenna artificial-noise precoder.
    pub fn an_precoder(&self) -> CMatrix {
        if self.analog_is_identity {
            self.an.clone()
        } else {
            &self.analog * &self.an
        }
    }
}

/// Largest `| |entry| - 1 |` over a matrix, or `None` when it is empty.
pub fn max_modulus_deviation(m: &CMatrix) -> Option<f64> {
    m.iter().map(|z| (z.norm() - 1.0).abs()).reduce(f64::max)
}

/// Received powers `|h^H F_A w_j|^2` (information) and `|h^H F_A v_g|^2` (noise) at one user.
#[derive(Debug, Clone)]
pub struct UserGains {
    pub info: Vec<f64>,
    pub an: Vec<f64>,
}

impl UserGains {
    pub fn new(h: &CVector, bf: &HybridBeamformer) -> Result<Self> {
        if h.len() != bf.analog.nrows() {
            return Err(invalid(format!(
                "channel of length {} does not match {} antennas",
                h.len(),
                bf.analog.nrows()
            )));
        }
        // row vector h^H F_A
        let eff = if bf.analog_is_identity {
            h.adjoint()
        } else {
            h.adjoint() * &bf.analog
        };
        let gains = |m: &CMatrix| -> Vec<f64> {
            m.column_iter()
                .map(|c| (&eff * c)[(0, 0)].norm_sqr())
                .collect()
        };
        Ok(Self {
            info: gains(&bf.info),
            an: gains(&bf.an),
        })
    }

    fn info_total(&self) -> f64 {
        self.info.iter().sum()
    }

    fn an_total(&self) -> f64 {
        self.an.iter().sum()
    }
}

fn er_gains(scn: &Scenario, k: usize, bf: &HybridBeamformer) -> Result<UserGains> {
    let er = scn
        .ers
        .get(k)
        .ok_or_else(|| invalid(format!("energy receiver index {k} out of range")))?;
    UserGains::new(&er.channel, bf)
}

fn ir_gains(scn: &Scenario, m: usize, bf: &HybridBeamformer) -> Result<UserGains> {
    let ir = scn
        .irs
        .get(m)
        .ok_or_else(|| invalid(format!("information receiver index {m} out of range")))?;
    UserGains::new(&ir.channel, bf)
}

fn check_stream(m: usize, bf: &HybridBeamformer) -> Result<()> {
    if m >= bf.info.ncols() {
        return Err(invalid(format!(
            "information stream {m} out of range for {} beams",
            bf.info.ncols()
        )));
    }
    Ok(())
}

/// Energy harvested at ER `k`: `xi * (sum_m |h^H F_A w_m|^2 + sum_g |h^H F_A v_g|^2)`.
pub fn harvested_energy(scn: &Scenario, k: usize, bf: &HybridBeamformer) -> Result<f64> {
    let g = er_gains(scn, k, bf)?;
    Ok(scn.xi * (g.info_total() + g.an_total()))
}

/// SINR of ER `k` eavesdropping on the stream of IR `m`.
pub fn eavesdrop_sinr(scn: &Scenario, m: usize, k: usize, bf: &HybridBeamformer) -> Result<f64> {
    check_stream(m, bf)?;
    let g = er_gains(scn, k, bf)?;
    let signal = g.info[m];
    let interference = g.an_total() + g.info_total() - signal;
    Ok(signal / (interference.max(0.0) + scn.ers[k].noise_power))
}

/// SINR at IR `m`. Type-I receivers see the artificial noise, Type-II receivers cancel it.
pub fn ir_sinr(
    scn: &Scenario,
    m: usize,
    bf: &HybridBeamformer,
    rtype: ReceiverType,
) -> Result<f64> {
    check_stream(m, bf)?;
    let g = ir_gains(scn, m, bf)?;
    let signal = g.info[m];
    let mut interference = (g.info_total() - signal).max(0.0);
    if rtype == ReceiverType::TypeI {
        interference += g.an_total();
    }
    Ok(signal / (interference + scn.irs[m].noise_power))
}

/// `log2(1 + gamma_m) - max_k log2(1 + gamma^e_{m,k})`, without the `[.]^+` clamp.
/// With no ERs the eavesdropper term is zero.
pub fn secrecy_term(
    scn: &Scenario,
    m: usize,
    bf: &HybridBeamformer,
    rtype: ReceiverType,
) -> Result<f64> {
    let legit = (1.0 + ir_sinr(scn, m, bf, rtype)?).log2();
    let mut worst = 0.0f64;
    for k in 0..scn.k() {
        worst = worst.max((1.0 + eavesdrop_sinr(scn, m, k, bf)?).log2());
    }
    Ok(legit - worst)
}

/// Achievable secrecy rate of IR `m` in bps/Hz.
pub fn secrecy_rate(
    scn: &Scenario,
    m: usize,
    bf: &HybridBeamformer,
    rtype: ReceiverType,
) -> Result<f64> {
    Ok(secrecy_term(scn, m, bf, rtype)?.max(0.0))
}

/// Weighted sum secrecy rate using the scenario's receiver type.
pub fn wssr(scn: &Scenario, bf: &HybridBeamformer) -> Result<f64> {
    if scn.weights.len() != scn.m() {
        return Err(invalid("weight vector length must equal the number of IRs"));
    }
    let mut total = 0.0;
    for (m, &w) in scn.weights.iter().enumerate() {
        total += w * secrecy_rate(scn, m, bf, scn.receiver_type)?;
    }
    Ok(total)
}

/// `||F_A W||_F^2 + ||F_A V||_F^2`.
pub fn transmit_power(bf: &HybridBeamformer) -> f64 {
    bf.info_precoder().norm_squared() + bf.an_precoder().norm_squared()
}

/// All ground-truth metrics for one beamformer.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkReport {
    pub wssr: f64,
    /// Clamped per-IR secrecy rates.
    pub rates: Vec<f64>,
    /// Unclamped per-IR secrecy terms.
    pub secrecy_terms: Vec<f64>,
    /// Per-ER harvested energy (W).
    pub energies: Vec<f64>,
    pub power: f64,
}

impl LinkReport {
    pub fn total_energy(&self) -> f64 {
        self.energies.iter().sum()
    }
}

pub fn evaluate(scn: &Scenario, bf: &HybridBeamformer) -> Result<LinkReport> {
    let secrecy_terms = (0..scn.m())
        .map(|m| secrecy_term(scn, m, bf, scn.receiver_type))
        .collect::<Result<Vec<_>>>()?;
    let rates: Vec<f64> = secrecy_terms.iter().map(|r| r.max(0.0)).collect();
    let energies = (0..scn.k())
        .map(|k| harvested_energy(scn, k, bf))
        .collect::<Result<Vec<_>>>()?;
    Ok(LinkReport {
        wssr: wssr(scn, bf)?,
        rates,
        secrecy_terms,
        energies,
        power: transmit_power(bf),
    })
}
