//! Precession under `H = ω n·J`, coarse measurements along the way, and
//! Leggett-Garg correlators.

mod lg;
mod precession;
mod trajectory;

pub use lg::{dichotomy, lg_correlator, lg_sweep, write_lg_csv, LgResult};
pub use precession::{classical_trajectory, evolve, rodrigues, Evolve, PrecessionSpec};
pub use trajectory::{quantum_trajectory, TrajectoryMode, TrajectoryRecord, DEGENERATE_LENGTH};
