//! Fixed analog beamformer built from user geometry.

use crate::channel::{ff_steering, nf_steering, Regime, Scenario};
use crate::error::{invalid, Result};
use crate::{CMatrix, CVector, C64};

/// Entries with modulus below this are treated as zero during normalization.
const ZERO_MODULUS: f64 = 1e-12;

/// Element-wise `c / |c|`; zero entries become `1 + 0j`.
pub fn normalize_unit_modulus(c: &CVector) -> CVector {
    c.map(|z| {
        let r = z.norm();
        if r < ZERO_MODULUS {
            C64::new(1.0, 0.0)
        } else {
            z / r
        }
    })
}

/// Analog beamformer `F_A` (N x N_RF).
///
/// Column layout: far-field steering toward each IR's LoS angle, then one column per
/// artificial-noise stream steered at an ER's LoS path (cycling over ERs when `G > K`),
/// then the element-wise normalized sum of the IR steering vectors in every remaining column.
pub fn build_analog(scn: &Scenario) -> Result<CMatrix> {
    let (m, g, n_rf) = (scn.m(), scn.an_streams, scn.n_rf);
    if m + g > n_rf {
        return Err(invalid(format!("M + G = {} exceeds N_RF = {n_rf}", m + g)));
    }
    if g > 0 && scn.k() == 0 {
        return Err(invalid("artificial-noise columns need at least one energy receiver"));
    }
    let geom = &scn.geometry;
    let mut fa = CMatrix::zeros(geom.n_antennas, n_rf);

    let mut c = CVector::zeros(geom.n_antennas);
    for (i, ir) in scn.irs.iter().enumerate() {
        let los = ir
            .los()
            .ok_or_else(|| invalid(format!("IR {i} has no LoS path")))?;
        let a = ff_steering(geom, los.angle);
        c += &a;
        fa.set_column(i, &a);
    }
    for j in 0..g {
        let k = j % scn.k();
        let los = scn.ers[k]
            .los()
            .ok_or_else(|| invalid(format!("ER {k} has no LoS path")))?;
        let col = match los.regime {
            Regime::NearField => nf_steering(geom, los.angle, los.distance)?,
            Regime::FarField => ff_steering(geom, los.angle),
        };
        fa.set_column(m + j, &col);
    }
    let filler = normalize_unit_modulus(&c);
    for i in m + g..n_rf {
        fa.set_column(i, &filler);
    }
    Ok(fa)
}

/// Identity analog stage for the fully-digital benchmark.
pub fn identity_analog(n: usize) -> Result<CMatrix> {
    if n == 0 {
        return Err(invalid("identity analog stage needs n >= 1"));
    }
    Ok(CMatrix::identity(n, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::generate_scenario;
    use crate::experiment::ExperimentConfig;
    use crate::metrics::max_modulus_deviation;

    #[test]
    fn baseline_column_structure() {
        let scn = generate_scenario(&ExperimentConfig::default(), 1).unwrap();
        let fa = build_analog(&scn).unwrap();
        assert_eq!(fa.shape(), (128, 10));
        let geom = &scn.geometry;
        for m in 0..2 {
            let a = ff_steering(geom, scn.irs[m].paths[0].angle);
            assert_eq!(fa.column(m), a.column(0));
        }
        for k in 0..3 {
            let p = &scn.ers[k].paths[0];
            let b = nf_steering(geom, p.angle, p.distance).unwrap();
            assert_eq!(fa.column(2 + k), b.column(0));
        }
        for i in 6..10 {
            assert_eq!(fa.column(i), fa.column(5));
        }
        assert!(max_modulus_deviation(&fa).unwrap() < 1e-12);
    }

    #[test]
    fn single_ir_filler_is_its_steering_vector() {
        let cfg = ExperimentConfig {
            ir_positions: vec![(0.7, 1.2)],
            n_rf: 5,
            ..ExperimentConfig::default()
        };
        let scn = generate_scenario(&cfg, 2).unwrap();
        let fa = build_analog(&scn).unwrap();
        let a = ff_steering(&scn.geometry, 0.7);
        for n in 0..128 {
            assert!((fa[(n, 4)] - a[n]).norm() < 1e-12);
        }
    }

    #[test]
    fn extra_an_streams_cycle_over_ers() {
        let cfg = ExperimentConfig {
            an_streams: Some(5),
            n_rf: 8,
            ..ExperimentConfig::default()
        };
        let scn = generate_scenario(&cfg, 2).unwrap();
        let fa = build_analog(&scn).unwrap();
        assert_eq!(fa.column(2 + 3), fa.column(2));
        assert_eq!(fa.column(2 + 4), fa.column(3));
    }

    #[test]
    fn too_many_streams_rejected() {
        let mut scn = generate_scenario(&ExperimentConfig::default(), 1).unwrap();
        scn.an_streams = 9;
        assert!(build_analog(&scn).is_err());
    }

    #[test]
    fn normalization_is_idempotent_and_handles_zeros() {
        let c = CVector::from_vec(vec![
            C64::new(2.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 1.0),
        ]);
        let u = normalize_unit_modulus(&c);
        assert_eq!(u[1], C64::new(1.0, 0.0));
        assert!((normalize_unit_modulus(&u) - &u).norm() < 1e-15);
        assert!(u.iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn identity() {
        let i = identity_analog(3).unwrap();
        assert_eq!(i, CMatrix::identity(3, 3));
        assert!(identity_analog(0).is_err());
    }
}
