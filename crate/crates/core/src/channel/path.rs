use super::geometry::ArrayGeometry;
use super::steering::{ff_steering, nf_steering};
use crate::error::{invalid, Result};
use crate::{CVector, C64};

/// Propagation regime of a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    NearField,
    FarField,
}

/// One propagation path from the array to a user (or via a scatterer).
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub regime: Regime,
    pub gain: C64,
    /// Path angle (rad), measured from broadside.
    pub angle: f64,
    /// Distance to the user (LoS) or scatterer (NLoS), in metres.
    pub distance: f64,
    /// Sorted indices of the antennas that see this path. Far-field paths see all antennas.
    pub visibility: Vec<usize>,
}

impl Path {
    pub fn near_field(angle: f64, distance: f64, gain: C64, mut visibility: Vec<usize>) -> Self {
        visibility.sort_unstable();
        visibility.dedup();
        Self {
            regime: Regime::NearField,
            gain,
            angle,
            distance,
            visibility,
        }
    }

    pub fn far_field(geom: &ArrayGeometry, angle: f64, distance: f64, gain: C64) -> Self {
        Self {
            regime: Regime::FarField,
            gain,
            angle,
            distance,
            visibility: (0..geom.n_antennas).collect(),
        }
    }

    /// Free-space gain `lambda / (4 pi r) * exp(j phase)`.
    pub fn free_space_gain(geom: &ArrayGeometry, distance: f64, phase: f64) -> C64 {
        C64::from_polar(geom.free_space_amplitude(distance), phase)
    }

    /// Per-antenna response `b(angle, r) ⊙ t(vr)` (near field) or `a(angle)` (far field).
    pub fn response(&self, geom: &ArrayGeometry) -> Result<CVector> {
        match self.regime {
            Regime::FarField => Ok(ff_steering(geom, self.angle)),
            Regime::NearField => {
                let b = nf_steering(geom, self.angle, self.distance)?;
                let mut masked = CVector::zeros(geom.n_antennas);
                for &n in &self.visibility {
                    if n >= geom.n_antennas {
                        return Err(invalid(format!("visible antenna index {n} out of range")));
                    }
                    masked[n] = b[n];
                }
                Ok(masked)
            }
        }
    }
}

/// Multipath channel `sqrt(1/L) * sum_l g_l s_l` over homogeneous-regime paths.
pub fn synth_channel(geom: &ArrayGeometry, paths: &[Path]) -> Result<CVector> {
    let first = paths
        .first()
        .ok_or_else(|| invalid("a channel needs at least one path"))?;
    if paths.iter().any(|p| p.regime != first.regime) {
        return Err(invalid("paths of one channel must share a propagation regime"));
    }
    let scale = (1.0 / paths.len() as f64).sqrt();
    let mut h = CVector::zeros(geom.n_antennas);
    for p in paths {
        h.axpy(p.gain * scale, &p.response(geom)?, C64::new(1.0, 0.0));
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UserKind {
    EnergyReceiver,
    InfoReceiver,
}

/// A single-antenna user together with its paths and synthesized channel.
#[derive(Debug, Clone, PartialEq)]
pub struct UserChannel {
    pub user_kind: UserKind,
    /// LoS path first.
    pub paths: Vec<Path>,
    pub channel: CVector,
    /// Receiver noise power (W).
    pub noise_power: f64,
}

impl UserChannel {
    pub fn new(
        geom: &ArrayGeometry,
        user_kind: UserKind,
        paths: Vec<Path>,
        noise_power: f64,
    ) -> Result<Self> {
        if !(noise_power.is_finite() && noise_power > 0.0) {
            return Err(invalid(format!("noise power must be positive, got {noise_power}")));
        }
        let channel = synth_channel(geom, &paths)?;
        Ok(Self {
            user_kind,
            paths,
            channel,
            noise_power,
        })
    }

    /// A user with a directly specified channel vector (no path bookkeeping).
    pub fn from_channel(user_kind: UserKind, channel: CVector, noise_power: f64) -> Self {
        Self {
            user_kind,
            paths: Vec::new(),
            channel,
            noise_power,
        }
    }

    pub fn los(&self) -> Option<&Path> {
        self.paths.first()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_geometry, nf_steering};

    #[test]
    fn single_full_vr_los_is_scaled_steering() {
        let g = build_geometry(8, 30e9).unwrap();
        let gain = C64::new(0.3, -0.2);
        let p = Path::near_field(0.4, 1.5, gain, (0..8).collect());
        let h = synth_channel(&g, &[p]).unwrap();
        let b = nf_steering(&g, 0.4, 1.5).unwrap();
        for n in 0..8 {
            assert_eq!(h[n], gain * b[n]);
        }
    }

    #[test]
    fn entries_outside_vr_vanish() {
        let g = build_geometry(8, 30e9).unwrap();
        let p = Path::near_field(-0.3, 0.8, C64::new(1.0, 0.0), vec![5, 2, 3]);
        let h = synth_channel(&g, &[p]).unwrap();
        for n in [0, 1, 4, 6, 7] {
            assert_eq!(h[n], C64::new(0.0, 0.0));
        }
        for n in [2, 3, 5] {
            assert!((h[n].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_paths_match_hand_expansion() {
        let g = build_geometry(4, 30e9).unwrap();
        let (g1, g2) = (C64::new(0.5, 0.1), C64::new(-0.2, 0.7));
        let p1 = Path::near_field(0.2, 0.3, g1, vec![0, 1, 2, 3]);
        let p2 = Path::near_field(-0.9, 0.5, g2, vec![1, 3]);
        let h = synth_channel(&g, &[p1, p2]).unwrap();
        // brute force: scalar per-antenna evaluation of each term
        let lambda = g.carrier_wavelength;
        let d = lambda / 2.0;
        let term = |n: usize, theta: f64, r: f64| {
            let delta = (2.0 * n as f64 - 3.0) / 2.0;
            let rn = (r * r + (delta * d).powi(2) - 2.0 * r * delta * d * theta.sin()).sqrt();
            C64::from_polar(1.0, -2.0 * std::f64::consts::PI * (rn - r) / lambda)
        };
        for n in 0..4 {
            let vis2 = if n == 1 || n == 3 { 1.0 } else { 0.0 };
            let expected = (g1 * term(n, 0.2, 0.3) + g2 * term(n, -0.9, 0.5) * vis2)
                * (0.5f64).sqrt();
            assert!((h[n] - expected).norm() < 1e-12, "antenna {n}");
        }
    }

    #[test]
    fn rejects_mixed_regimes_and_empty() {
        let g = build_geometry(4, 30e9).unwrap();
        let p1 = Path::near_field(0.2, 0.3, C64::new(1.0, 0.0), vec![0]);
        let p2 = Path::far_field(&g, 0.1, 100.0, C64::new(1.0, 0.0));
        assert!(synth_channel(&g, &[p1, p2]).is_err());
        assert!(synth_channel(&g, &[]).is_err());
    }

    #[test]
    fn nf_path_energy_proportional_to_vr_size() {
        let g = build_geometry(32, 30e9).unwrap();
        for size in [1usize, 5, 16, 32] {
            let p = Path::near_field(0.3, 1.0, C64::new(1.0, 0.0), (0..size).collect());
            let r = p.response(&g).unwrap();
            assert!((r.norm_squared() - size as f64).abs() < 1e-10);
        }
    }
}
