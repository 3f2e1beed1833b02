use std::io::{self, Write};

use crate::csv::fmt_f64;
use crate::spin::{DensityOperator, PureState, SpinJ};
use crate::{Error, Result};

/// Inclusive range of Dicke indices `k_lo..=k_hi` (so `m = k - j`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub k_lo: usize,
    pub k_hi: usize,
}

impl Slot {
    pub fn width(&self) -> usize {
        self.k_hi - self.k_lo + 1
    }

    pub fn contains(&self, k: usize) -> bool {
        (self.k_lo..=self.k_hi).contains(&k)
    }
}

/// Contiguous bunching of the `2j+1` values of `m` into slots of width `Δm`,
/// counted from `m = -j` upward. A remainder becomes a smaller last slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotPartition {
    j: SpinJ,
    delta_m: usize,
    slots: Vec<Slot>,
    /// slot index of every Dicke index
    owner: Vec<usize>,
}

pub fn make_partition(j: SpinJ, delta_m: usize) -> Result<SlotPartition> {
    let dim = j.dim();
    if delta_m == 0 || delta_m > dim {
        return Err(Error::DeltaMOutOfRange { delta_m, max: dim });
    }
    let slots: Vec<Slot> =
        (0..dim).step_by(delta_m).map(|k_lo| Slot { k_lo, k_hi: (k_lo + delta_m - 1).min(dim - 1) }).collect();
    let owner = (0..dim).map(|k| k / delta_m).collect();
    Ok(SlotPartition { j, delta_m, slots, owner })
}

impl SlotPartition {
    pub fn spin(&self) -> SpinJ {
        self.j
    }

    pub fn delta_m(&self) -> usize {
        self.delta_m
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slot(&self, index: usize) -> Result<Slot> {
        self.slots.get(index).copied().ok_or(Error::SlotOutOfRange { index, count: self.slots.len() })
    }

    /// Slot containing Dicke index `k`.
    pub fn slot_of(&self, k: usize) -> usize {
        self.owner[k]
    }

    pub fn m_lo(&self, index: usize) -> f64 {
        self.j.m(self.slots[index].k_lo)
    }

    pub fn m_hi(&self, index: usize) -> f64 {
        self.j.m(self.slots[index].k_hi)
    }

    /// Centre `m̄` of a slot.
    pub fn midpoint(&self, index: usize) -> f64 {
        0.5 * (self.m_lo(index) + self.m_hi(index))
    }
}

/// Polar section `cos θ ∈ [cos_lo, cos_hi]` associated with a slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotBand {
    pub index: usize,
    pub cos_lo: f64,
    pub cos_hi: f64,
}

impl SlotBand {
    pub fn width(&self) -> f64 {
        self.cos_hi - self.cos_lo
    }
}

/// Band edges `(m ∓ 1/2)/(j + 1/2)` of every slot, in ascending order.
///
/// Edge `i` is `(2i - (2j+1))/(2j+1)` for Dicke boundary `i`; neighbouring
/// bands share the very same float, and the ends are exactly `∓1`.
pub fn band_edges(part: &SlotPartition) -> Vec<f64> {
    let dim = part.j.dim() as f64;
    let edge = |boundary: usize| (2.0 * boundary as f64 - dim) / dim;
    let mut edges: Vec<f64> = part.slots.iter().map(|s| edge(s.k_lo)).collect();
    edges.push(edge(part.j.dim()));
    edges
}

pub fn slot_bands(part: &SlotPartition) -> Vec<SlotBand> {
    band_edges(part).windows(2).enumerate().map(|(index, e)| SlotBand { index, cos_lo: e[0], cos_hi: e[1] }).collect()
}

/// Probabilities over the slots of a partition.
///
/// `raw_total` is the sum before renormalization: exactly 1 for Born
/// probabilities, the band-quadrature total for Q-derived ones.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotDistribution {
    partition: SlotPartition,
    probabilities: Vec<f64>,
    raw_total: f64,
}

impl SlotDistribution {
    pub fn partition(&self) -> &SlotPartition {
        &self.partition
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn raw_total(&self) -> f64 {
        self.raw_total
    }

    /// Largest slot-wise `|a - b|`.
    pub fn max_abs_diff(&self, other: &SlotDistribution) -> f64 {
        self.probabilities.iter().zip(&other.probabilities).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub(crate) fn from_raw(partition: SlotPartition, raw: Vec<f64>) -> Self {
        let total: f64 = raw.iter().sum();
        let probabilities = raw.iter().map(|p| p / total).collect();
        Self { partition, probabilities, raw_total: total }
    }
}

/// States with a `J_z` outcome distribution.
pub trait JzStatistics {
    fn spin(&self) -> SpinJ;
    fn jz_distribution(&self) -> Vec<f64>;
}

impl JzStatistics for PureState {
    fn spin(&self) -> SpinJ {
        PureState::spin(self)
    }
    fn jz_distribution(&self) -> Vec<f64> {
        PureState::jz_distribution(self)
    }
}

impl JzStatistics for DensityOperator {
    fn spin(&self) -> SpinJ {
        DensityOperator::spin(self)
    }
    fn jz_distribution(&self) -> Vec<f64> {
        DensityOperator::jz_distribution(self)
    }
}

/// Born probabilities `Tr(P_m̄ ρ)`.
pub fn exact_slot_probs<S: JzStatistics + ?Sized>(state: &S, part: &SlotPartition) -> Result<SlotDistribution> {
    if state.spin() != part.j {
        return Err(Error::DimensionMismatch { expected: part.j.dim(), found: state.spin().dim() });
    }
    let pz = state.jz_distribution();
    let probabilities: Vec<f64> = part.slots.iter().map(|s| pz[s.k_lo..=s.k_hi].iter().sum()).collect();
    Ok(SlotDistribution { partition: part.clone(), probabilities, raw_total: 1.0 })
}

/// Writes the `mbar,m_lo,m_hi,p_exact,p_approx,abs_err` comparison table.
///
/// `mbar` is the slot centre, `m_lo`/`m_hi` its inclusive ends.
pub fn write_slot_table<W: Write>(mut out: W, exact: &SlotDistribution, approx: &SlotDistribution) -> io::Result<()> {
    writeln!(out, "mbar,m_lo,m_hi,p_exact,p_approx,abs_err")?;
    let part = &exact.partition;
    for (i, (pe, pa)) in exact.probabilities.iter().zip(&approx.probabilities).enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            part.midpoint(i),
            part.m_lo(i),
            part.m_hi(i),
            fmt_f64(*pe),
            fmt_f64(*pa),
            fmt_f64((pe - pa).abs())
        )?;
    }
    Ok(())
}
