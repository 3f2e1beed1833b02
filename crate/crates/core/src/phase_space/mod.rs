//! Phase-space representations on the unit sphere.
//!
//! Every Q function of a spin-j state is a spherical-harmonic series of
//! degree at most `2j`, so an exact product quadrature replaces adaptive
//! integration throughout.

mod grid;
mod multipoles;
mod pfunc;
mod qmap;
mod ylm;

pub use grid::{build_grid, gauss_legendre, GridNode, GridRow, SphereGrid};
pub use multipoles::{state_multipoles, tensor_operator, MultipoleCoeffs, TensorBasis};
pub use pfunc::{p_function, p_function_with_cap, state_from_p, PMap, DEFAULT_P_J_CAP};
pub(crate) use qmap::matrix_q_values;
pub use qmap::{
    map_distance, parse_map_csv, q_distance, q_function, MapSample, Metric, QMap, QSource, SphereMap, MAP_CSV_HEADER,
};
pub use ylm::{legendre_table, spherical_harmonic};
