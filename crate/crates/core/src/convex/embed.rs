//! Interleaved `(Re, Im)` real embedding of complex beamformer columns.

use nalgebra::{DMatrix, DVector};

use crate::{CMatrix, CVector, C64};

/// Stack the columns of `w` then `v` into one real vector `[Re x0, Im x0, Re x1, Im x1, ...]`.
pub fn real_embed(w: &CMatrix, v: &CMatrix) -> DVector<f64> {
    let mut out = DVector::zeros(2 * (w.len() + v.len()));
    let mut i = 0;
    for m in [w, v] {
        for col in m.column_iter() {
            for z in col.iter() {
                out[i] = z.re;
                out[i + 1] = z.im;
                i += 2;
            }
        }
    }
    out
}

/// Inverse of [`real_embed`] for `rows x w_cols` and `rows x v_cols` matrices.
///
/// Entries past the complex block (e.g. slack variables) are ignored.
pub fn real_unembed(x: &DVector<f64>, rows: usize, w_cols: usize, v_cols: usize) -> (CMatrix, CMatrix) {
    let at = |col: usize, row: usize| {
        let i = 2 * (col * rows + row);
        C64::new(x[i], x[i + 1])
    };
    let w = CMatrix::from_fn(rows, w_cols, |r, c| at(c, r));
    let v = CMatrix::from_fn(rows, v_cols, |r, c| at(w_cols + c, r));
    (w, v)
}

/// Real vector of a complex vector.
pub fn embed_vector(z: &CVector) -> DVector<f64> {
    DVector::from_fn(2 * z.len(), |i, _| {
        let c = z[i / 2];
        if i % 2 == 0 {
            c.re
        } else {
            c.im
        }
    })
}

/// Real symmetric matrix `Q` with `x^H H x = xr^T Q xr` for Hermitian `H`.
///
/// Each complex entry `h` becomes the block `[[Re h, -Im h], [Im h, Re h]]`.
pub fn embed_hermitian(h: &CMatrix) -> DMatrix<f64> {
    let n = h.nrows();
    let mut q = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for i in 0..n {
            let z = h[(i, j)];
            q[(2 * i, 2 * j)] = z.re;
            q[(2 * i, 2 * j + 1)] = -z.im;
            q[(2 * i + 1, 2 * j)] = z.im;
            q[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    // exact symmetry even when H is Hermitian only up to rounding
    let qt = q.transpose();
    (q + qt) * 0.5
}
