//! Numerical laboratory for spin-j coherent states and coarse-grained
//! measurements.
//!
//! The crate is organised bottom-up:
//!
//! * [`spin`] holds the exact spin-j linear algebra: the ordered Dicke basis
//!   `m = -j..=j`, angular momentum operators, spin coherent states and
//!   SU(2) rotations.
//! * [`phase_space`] samples Husimi Q and Glauber-Sudarshan P functions on an
//!   exact Gauss-Legendre x uniform-azimuth sphere grid.
//! * [`coarse`] bunches `J_z` outcomes into slots of width `Δm` and compares
//!   exact Born probabilities with integrals of Q over angular bands.
//! * [`dynamics`] precesses states under `H = ω n·J`, interleaves coarse
//!   measurements and evaluates Leggett-Garg correlators.
//!
//! All amplitudes are stored in the Dicke basis with index `k = 0..=2j`
//! corresponding to `m = k - j`.

pub mod coarse;
pub mod csv;
pub mod dynamics;
mod error;
pub mod phase_space;
pub mod random;
pub mod spin;

pub use error::{Error, Result};
pub use num_complex::Complex64;
