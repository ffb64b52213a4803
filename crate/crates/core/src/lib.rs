//! Numerical toolkit for anisotropic mixed-norm analysis on sampled grids.
//!
//! The crate provides, over axis-aligned boxes in dimension 1 to 3:
//!
//! - anisotropic quasi-norms, dilations, and quasi-norm balls ([`anisotropy`]),
//! - midpoint-lattice grid functions and deterministic sample families ([`grid`]),
//! - iterated mixed-norm Lebesgue quadrature ([`mixed_norm`]),
//! - quadrature-orthonormal polynomial bases and L^2 ball projections
//!   ([`projection`]),
//! - atoms with support, size, and vanishing-moment certificates ([`atoms`]),
//! - Campanato-type oscillation seminorms with ball search ([`campanato`]),
//! - duality pairings and inequality checks between the two sides
//!   ([`duality`]),
//! - a seeded property-suite runner with JSON reports ([`suite`]).
//!
//! Every randomized computation takes an explicit seed and is reproducible
//! bit for bit at fixed configuration.

pub mod anisotropy;
pub mod atoms;
pub mod campanato;
pub mod config;
pub mod duality;
pub mod error;
pub mod grid;
pub mod mixed_norm;
pub mod projection;
pub mod report;
pub mod suite;
pub mod tolerances;

pub use error::{Error, Result};
