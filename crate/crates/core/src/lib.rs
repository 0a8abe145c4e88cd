//! Secure hybrid beamforming for SWIPT with an extremely large antenna array.
//!
//! A base station with a uniform linear array serves far-field information
//! receivers while near-field energy receivers harvest power and may
//! eavesdrop. The crate provides
//!
//! - [`channel`]: array geometry, near/far-field steering, visibility regions
//!   and seeded scenario generation,
//! - [`metrics`]: ground-truth energy, SINR and secrecy-rate evaluation,
//! - [`analog`]: the fixed analog (phase-shifter) beamformer,
//! - [`sca`]: the successive convex approximation loop over the digital
//!   information and artificial-noise beamformers,
//! - [`convex`]: the log-barrier interior-point solver used for every
//!   convex subproblem,
//! - [`schemes`]: the proposed scheme and its benchmarks,
//! - [`experiment`]: configuration, Monte-Carlo sweeps and CSV output.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analog;
pub mod channel;
pub mod convex;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod sca;
pub mod schemes;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
