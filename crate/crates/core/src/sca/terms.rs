//! Effective channels, quadratic power terms and their tangent lower bounds.

use std::f64::consts::LN_2;

use crate::channel::Scenario;
use crate::error::{invalid, Result};
use crate::{CMatrix, CVector};

/// Relative tolerance for the Hermitian check in [`taylor_quad_lb_coeffs`].
const HERMITIAN_TOL: f64 = 1e-12;

/// `F_A^H h h^H F_A` for every IR (`info`) and every ER (`energy`).
#[derive(Debug, Clone)]
pub struct EffectiveChannels {
    pub info: Vec<CMatrix>,
    pub energy: Vec<CMatrix>,
    /// `F_A^H h` per IR, kept for cheap quadratic forms.
    pub info_vectors: Vec<CVector>,
    pub energy_vectors: Vec<CVector>,
    /// `F_A^H F_A`, the power metric in digital coordinates.
    pub gram: CMatrix,
}

fn outer(u: &CVector) -> CMatrix {
    u * u.adjoint()
}

impl EffectiveChannels {
    /// Builds the matrices from projected channel vectors and a Gram matrix.
    pub fn from_vectors(info_vectors: Vec<CVector>, energy_vectors: Vec<CVector>, gram: CMatrix) -> Self {
        Self {
            info: info_vectors.iter().map(outer).collect(),
            energy: energy_vectors.iter().map(outer).collect(),
            info_vectors,
            energy_vectors,
            gram,
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }
}

/// Builds the effective channel matrices for a fixed analog beamformer.
pub fn effective_channels(scn: &Scenario, analog: &CMatrix) -> Result<EffectiveChannels> {
    let n = scn.n_antennas();
    if analog.nrows() != n {
        return Err(invalid(format!(
            "analog beamformer has {} rows for {n} antennas",
            analog.nrows()
        )));
    }
    let project = |h: &CVector| -> Result<CVector> {
        if h.len() != n {
            return Err(invalid(format!("channel of length {} for {n} antennas", h.len())));
        }
        Ok(analog.ad_mul(h))
    };
    let info_vectors = scn
        .irs
        .iter()
        .map(|u| project(&u.channel))
        .collect::<Result<Vec<_>>>()?;
    let energy_vectors = scn
        .ers
        .iter()
        .map(|u| project(&u.channel))
        .collect::<Result<Vec<_>>>()?;
    Ok(EffectiveChannels::from_vectors(info_vectors, energy_vectors, analog.ad_mul(analog)))
}

/// `|u^H x|^2`, i.e. `x^H (u u^H) x`.
fn rank_one_form(u: &CVector, x: nalgebra::DVectorView<'_, crate::C64>) -> f64 {
    u.dotc(&x).norm_sqr()
}

/// The six quadratic families evaluated at one `(W, V)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadTerms {
    /// AN power at each IR.
    pub a: Vec<f64>,
    /// Total information power at each IR.
    pub b: Vec<f64>,
    /// Inter-stream interference at each IR.
    pub c: Vec<f64>,
    /// AN power at each ER.
    pub e: Vec<f64>,
    /// Total information power at each ER.
    pub f: Vec<f64>,
    /// `g[m][k]`: information power at ER `k` excluding stream `m`.
    pub g: Vec<Vec<f64>>,
}

/// Evaluates the quadratic terms for info beams `info` (N_RF x M) and AN beams `an` (N_RF x G).
pub fn quad_terms(ch: &EffectiveChannels, info: &CMatrix, an: &CMatrix) -> QuadTerms {
    let m_count = info.ncols();
    let per_stream = |u: &CVector, beams: &CMatrix| -> Vec<f64> {
        (0..beams.ncols()).map(|j| rank_one_form(u, beams.column(j))).collect()
    };
    let mut out = QuadTerms {
        a: Vec::with_capacity(ch.info_vectors.len()),
        b: Vec::with_capacity(ch.info_vectors.len()),
        c: Vec::with_capacity(ch.info_vectors.len()),
        e: Vec::with_capacity(ch.energy_vectors.len()),
        f: Vec::with_capacity(ch.energy_vectors.len()),
        g: vec![Vec::with_capacity(ch.energy_vectors.len()); m_count],
    };
    for (m, u) in ch.info_vectors.iter().enumerate() {
        let info_pw = per_stream(u, info);
        let total: f64 = info_pw.iter().sum();
        out.a.push(per_stream(u, an).iter().sum());
        out.b.push(total);
        // summed directly so C stays exactly non-negative
        out.c.push(
            info_pw
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != m)
                .map(|(_, p)| p)
                .sum(),
        );
    }
    for u in &ch.energy_vectors {
        let info_pw = per_stream(u, info);
        out.e.push(per_stream(u, an).iter().sum());
        out.f.push(info_pw.iter().sum());
        for (m, gm) in out.g.iter_mut().enumerate() {
            gm.push(
                info_pw
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != m)
                    .map(|(_, p)| p)
                    .sum(),
            );
        }
    }
    out
}

/// Affine minorant `2 Re{grad^H x} - offset` of `x^H H x`, tangent at the expansion point.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadLowerBound {
    /// `H x_ref`
    pub grad: CVector,
    /// `x_ref^H H x_ref`
    pub offset: f64,
}

impl QuadLowerBound {
    pub fn eval(&self, x: &CVector) -> f64 {
        2.0 * self.grad.dotc(x).re - self.offset
    }
}

/// First-order Taylor minorant of the convex form `x^H H x` at `x_ref`.
pub fn taylor_quad_lb_coeffs(h: &CMatrix, x_ref: &CVector) -> Result<QuadLowerBound> {
    if !h.is_square() || h.nrows() != x_ref.len() {
        return Err(invalid(format!(
            "matrix {}x{} does not match vector of length {}",
            h.nrows(),
            h.ncols(),
            x_ref.len()
        )));
    }
    let scale = h.norm().max(f64::MIN_POSITIVE);
    let skew = (h - h.adjoint()).norm();
    if !(skew <= HERMITIAN_TOL * scale) {
        return Err(invalid(format!(
            "matrix is not Hermitian (relative skew {:e})",
            skew / scale
        )));
    }
    let grad = h * x_ref;
    let offset = x_ref.dotc(&grad).re;
    Ok(QuadLowerBound { grad, offset })
}

/// Tangent line of `2^t` at `t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTangent {
    pub at: f64,
    pub value: f64,
    pub slope: f64,
}

impl ExpTangent {
    pub fn eval(&self, t: f64) -> f64 {
        self.value + self.slope * (t - self.at)
    }
}

/// Affine minorant `2^t0 + 2^t0 ln2 (t - t0)` of the convex function `2^t`.
pub fn exp_tangent_lb(t0: f64) -> ExpTangent {
    let value = t0.exp2();
    ExpTangent {
        at: t0,
        value,
        slope: value * LN_2,
    }
}
