//! Small hand-built instances shared by unit tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{build_geometry, ReceiverType, Scenario, UserChannel, UserKind};
use crate::metrics::HybridBeamformer;
use crate::{CMatrix, CVector, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cgauss(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_cvector(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CVector {
    CVector::from_fn(n, |_, _| cgauss(rng) * scale)
}

pub fn random_cmatrix(rng: &mut ChaCha8Rng, r: usize, c: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(r, c, |_, _| cgauss(rng) * scale)
}

pub fn random_phases(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMatrix {
    CMatrix::from_fn(r, c, |_, _| {
        C64::from_polar(1.0, rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
    })
}

/// Scenario with i.i.d. Gaussian channels (no path bookkeeping).
pub fn random_scenario(seed: u64, n: usize, n_rf: usize, m: usize, k: usize, g: usize) -> Scenario {
    let mut r = rng(seed);
    let geometry = build_geometry(n, 30e9).unwrap();
    let ers = (0..k)
        .map(|_| {
            let noise = 0.5 + r.random::<f64>();
            UserChannel::from_channel(UserKind::EnergyReceiver, random_cvector(&mut r, n, 1.0), noise)
        })
        .collect();
    let irs = (0..m)
        .map(|_| {
            let noise = 0.5 + r.random::<f64>();
            UserChannel::from_channel(UserKind::InfoReceiver, random_cvector(&mut r, n, 1.0), noise)
        })
        .collect();
    Scenario {
        geometry,
        ers,
        irs,
        xi: 0.5,
        q0: 0.0,
        pmax: 1.0,
        an_streams: g,
        n_rf,
        weights: vec![1.0; m],
        receiver_type: ReceiverType::TypeI,
    }
}

pub fn random_bf(seed: u64, n: usize, n_rf: usize, m: usize, g: usize) -> HybridBeamformer {
    let mut r = rng(seed);
    let analog = random_phases(&mut r, n, n_rf);
    let info = random_cmatrix(&mut r, n_rf, m, 0.5);
    let an = random_cmatrix(&mut r, n_rf, g, 0.5);
    HybridBeamformer::new(analog, info, an).unwrap()
}
