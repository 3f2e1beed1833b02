//! Coarse-grained `J_z` measurements: slots of width `Δm`, their angular
//! bands, and how the Q function fares under them.

mod measure;
mod partition;

pub use measure::{
    approx_slot_probs_via_q, band_grid, band_integrals, cat_gap, cat_gap_on_grid, cat_state, invasiveness,
    luders_update, luders_update_pure, mixture_residual, nonselective_update, sample_slot, sample_slot_pure,
    MIN_CONDITIONING_PROBABILITY,
};
pub use partition::{
    band_edges, exact_slot_probs, make_partition, slot_bands, write_slot_table, JzStatistics, Slot, SlotBand,
    SlotDistribution, SlotPartition,
};
