//! Numerical laboratory for the two-dimensional parabolic Anderson model
//! `∂_t u = ½Δu + ξ u` with a (mollified, renormalised) white-noise potential on square boxes.
//!
//! The field calculus ([`grid`], [`paracontrolled`]) is generic over [`Real`]; the stochastic,
//! spectral and Monte Carlo layers work in `f64`.

pub mod chi;
pub mod error;
pub mod evolution;
pub mod feynman_kac;
pub mod grid;
pub mod hamiltonian;
pub mod noise;
pub mod paracontrolled;
pub mod profile;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Real;

pub type GridField64 = grid::GridField<f64>;
pub type GridField32 = grid::GridField<f32>;
pub type SpectralField64 = grid::SpectralField<f64>;
pub type SpectralField32 = grid::SpectralField<f32>;
