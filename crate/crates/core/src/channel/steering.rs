use std::f64::consts::PI;

use nalgebra::DVector;

use super::geometry::ArrayGeometry;
use crate::error::{invalid, Result};
use crate::{CVector, C64};

/// Far-field (planar wavefront) steering vector, entry `n` is `exp(j pi n sin(angle))`.
pub fn ff_steering(geom: &ArrayGeometry, angle: f64) -> CVector {
    let s = angle.sin();
    CVector::from_fn(geom.n_antennas, |n, _| C64::from_polar(1.0, PI * n as f64 * s))
}

/// Distance from every element to a point at polar coordinates `(angle, dist)`.
pub fn nf_element_distances(geom: &ArrayGeometry, angle: f64, dist: f64) -> Result<Vec<f64>> {
    check_distance(dist)?;
    let s = angle.sin();
    Ok(geom
        .offsets
        .iter()
        .map(|&delta| {
            let y = delta * geom.spacing;
            (dist * dist + y * y - 2.0 * dist * y * s).sqrt()
        })
        .collect())
}

/// Near-field (spherical wavefront) steering vector referenced to the array centre.
pub fn nf_steering(geom: &ArrayGeometry, angle: f64, dist: f64) -> Result<CVector> {
    check_distance(dist)?;
    let s = angle.sin();
    let k = 2.0 * PI / geom.carrier_wavelength;
    Ok(CVector::from_fn(geom.n_antennas, |n, _| {
        let y = geom.offsets[n] * geom.spacing;
        let rn = (dist * dist + y * y - 2.0 * dist * y * s).sqrt();
        // r_n - r without cancellation at large r
        let diff = (y * y - 2.0 * dist * y * s) / (rn + dist);
        C64::from_polar(1.0, -k * diff)
    }))
}

/// 0/1 mask of the antennas in `vr`.
pub fn visibility_vector(geom: &ArrayGeometry, vr: &[usize]) -> Result<DVector<f64>> {
    let mut t = DVector::zeros(geom.n_antennas);
    for &n in vr {
        if n >= geom.n_antennas {
            return Err(invalid(format!(
                "visible antenna index {n} out of range for {} antennas",
                geom.n_antennas
            )));
        }
        t[n] = 1.0;
    }
    Ok(t)
}

fn check_distance(dist: f64) -> Result<()> {
    if dist.is_finite() && dist > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("distance must be positive, got {dist}")))
    }
}
