//! Exact reduction of the digital beam space.
//!
//! Every metric depends on a digital beam `x` only through the projections `u_i^H x`
//! (`u_i = F_A^H h_i` over all users) and through the power `x^H P x` with `P = F_A^H F_A`.
//! Writing `x = B z + r` with `B` a `P`-orthonormal basis of `span{P^+ u_i}` and `r`
//! `P`-orthogonal to it gives `u_i^H r = 0` and `power(x) = |z|^2 + power(r)`, so optimal
//! beams lie in `range(B)` and the optimizer can work with `z` of dimension at most `M + K`.

use nalgebra::SymmetricEigen;

use super::terms::EffectiveChannels;
use crate::error::{invalid, Result};
use crate::{CMatrix, C64};

const RANK_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct ReducedBasis {
    /// `rows x d`, with `B^H P B = I`.
    basis: CMatrix,
    /// `B^H P`, maps a beam to its coordinates.
    coords: CMatrix,
}

impl ReducedBasis {
    pub fn new(ch: &EffectiveChannels) -> Result<Self> {
        let rows = ch.dim();
        let users: Vec<_> = ch.info_vectors.iter().chain(&ch.energy_vectors).cloned().collect();
        let gram_scale = ch.gram.norm().max(f64::MIN_POSITIVE);
        let pinv = ch
            .gram
            .clone()
            .pseudo_inverse(1e-10 * gram_scale)
            .map_err(|e| invalid(format!("pseudo-inverse failed: {e}")))?;
        let a = if users.is_empty() {
            CMatrix::zeros(rows, 0)
        } else {
            &pinv * CMatrix::from_columns(&users)
        };
        let g = a.ad_mul(&(&ch.gram * &a));
        let g = (&g + g.adjoint()) * C64::from(0.5);
        let eig = SymmetricEigen::new(g);
        let top = eig.eigenvalues.iter().copied().fold(0.0f64, f64::max);
        let keep: Vec<usize> = (0..eig.eigenvalues.len())
            .filter(|&i| eig.eigenvalues[i] > RANK_EPS * top)
            .collect();
        let basis = CMatrix::from_fn(rows, keep.len(), |r, c| {
            let i = keep[c];
            let scale = 1.0 / eig.eigenvalues[i].sqrt();
            (0..a.ncols())
                .map(|j| a[(r, j)] * eig.eigenvectors[(j, i)])
                .sum::<C64>()
                * scale
        });
        let coords = basis.ad_mul(&ch.gram);
        Ok(Self { basis, coords })
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Coordinates of the `P`-orthogonal projection of each column.
    pub fn project(&self, beams: &CMatrix) -> CMatrix {
        &self.coords * beams
    }

    pub fn lift(&self, coords: &CMatrix) -> CMatrix {
        &self.basis * coords
    }

    /// Effective channels in reduced coordinates (identity Gram matrix).
    pub fn channels(&self, ch: &EffectiveChannels) -> EffectiveChannels {
        let reduce = |u: &crate::CVector| self.basis.ad_mul(u);
        EffectiveChannels::from_vectors(
            ch.info_vectors.iter().map(reduce).collect(),
            ch.energy_vectors.iter().map(reduce).collect(),
            CMatrix::identity(self.dim(), self.dim()),
        )
    }
}
