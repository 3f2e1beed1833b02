use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use super::partition::{band_edges, exact_slot_probs, SlotBand, SlotDistribution, SlotPartition};
use crate::phase_space::{matrix_q_values, Metric, QMap, SphereGrid, SphereMap};
use crate::spin::{DensityOperator, PureState, SpinJ};
use crate::{Error, Result};

/// Slots with probability at or below this cannot be conditioned on.
pub const MIN_CONDITIONING_PROBABILITY: f64 = 1e-14;

/// Grid whose rows sit strictly inside the slot bands, `⌈(2j+1)/2⌉` Gauss-Legendre
/// rows per band and `2j+1` azimuths.
///
/// Restricted to one band, the φ-averaged Q of a spin-j state is a polynomial of
/// degree `2j` in `cos θ`, so band integrals on this grid are exact.
pub fn band_grid(part: &SlotPartition) -> SphereGrid {
    let j = part.spin();
    SphereGrid::banded(&band_edges(part), j.dim().div_ceil(2), j.dim())
}

/// Quadrature of `q` over each band, assigning node rows by `cos_lo <= cos θ < cos_hi`
/// (the last band also takes `cos θ = 1`). Returns the raw integrals.
pub fn band_integrals(q: &QMap, bands: &[SlotBand]) -> Vec<f64> {
    let grid = q.grid();
    let n_phi = grid.n_phi();
    let dphi = grid.phi_weight();
    let mut out = vec![0.0; bands.len()];
    for (r, row) in grid.rows().iter().enumerate() {
        let c = row.cos_theta;
        let last = bands.len().saturating_sub(1);
        let hit = bands.iter().position(|b| c >= b.cos_lo && (c < b.cos_hi || (b.index == last && c <= b.cos_hi)));
        if let Some(b) = hit {
            out[b] += row.weight * dphi * q.values()[r * n_phi..(r + 1) * n_phi].iter().sum::<f64>();
        }
    }
    out
}

/// Slot probabilities read off the Q function: band integrals, renormalized, with
/// the pre-normalization total kept as [`SlotDistribution::raw_total`].
pub fn approx_slot_probs_via_q(q: &QMap, part: &SlotPartition) -> Result<SlotDistribution> {
    if q.spin() != part.spin() {
        return Err(Error::DimensionMismatch { expected: part.spin().dim(), found: q.spin().dim() });
    }
    let need = part.spin().twice_j() as usize;
    if q.grid().exact_degree() < need {
        log::warn!("Q grid exact to degree {} < 2j = {need}; band integrals are approximate", q.grid().exact_degree());
    }
    let bands = super::slot_bands(part);
    Ok(SlotDistribution::from_raw(part.clone(), band_integrals(q, &bands)))
}

fn check_spin(j: SpinJ, part: &SlotPartition) -> Result<()> {
    if j != part.spin() {
        return Err(Error::DimensionMismatch { expected: part.spin().dim(), found: j.dim() });
    }
    Ok(())
}

/// `(P_m̄ ρ P_m̄ / p, p)` for the slot `index`.
pub fn luders_update(rho: &DensityOperator, part: &SlotPartition, index: usize) -> Result<(DensityOperator, f64)> {
    check_spin(rho.spin(), part)?;
    let slot = part.slot(index)?;
    let m = rho.matrix();
    let p: f64 = (slot.k_lo..=slot.k_hi).map(|k| m[(k, k)].re).sum();
    if p.is_nan() || p <= MIN_CONDITIONING_PROBABILITY {
        return Err(Error::ZeroProbabilitySlot { index, probability: p });
    }
    let dim = rho.spin().dim();
    let out = DMatrix::from_fn(dim, dim, |r, c| {
        if slot.contains(r) && slot.contains(c) {
            m[(r, c)] / p
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok((DensityOperator::from_matrix_unchecked(rho.spin(), out)?, p))
}

/// Pure-state form of [`luders_update`]: `(P_m̄ ψ / sqrt(p), p)`.
pub fn luders_update_pure(psi: &PureState, part: &SlotPartition, index: usize) -> Result<(PureState, f64)> {
    check_spin(psi.spin(), part)?;
    let slot = part.slot(index)?;
    let a = psi.amplitudes();
    let p: f64 = (slot.k_lo..=slot.k_hi).map(|k| a[k].norm_sqr()).sum();
    if p.is_nan() || p <= MIN_CONDITIONING_PROBABILITY {
        return Err(Error::ZeroProbabilitySlot { index, probability: p });
    }
    let v = DVector::from_fn(a.len(), |k, _| if slot.contains(k) { a[k] } else { Complex64::new(0.0, 0.0) });
    Ok((PureState::normalized(psi.spin(), v)?, p))
}

/// `Σ_m̄ P_m̄ ρ P_m̄`: coherences between different slots are zeroed.
pub fn nonselective_update(rho: &DensityOperator, part: &SlotPartition) -> Result<DensityOperator> {
    check_spin(rho.spin(), part)?;
    let m = rho.matrix();
    let dim = rho.spin().dim();
    let out = DMatrix::from_fn(dim, dim, |r, c| {
        if part.slot_of(r) == part.slot_of(c) {
            m[(r, c)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    DensityOperator::from_matrix_unchecked(rho.spin(), out)
}

/// The part of `ρ` a nonselective measurement removes: its cross-slot coherences.
fn cross_slot_part(rho: &DensityOperator, part: &SlotPartition) -> DMatrix<Complex64> {
    let m = rho.matrix();
    let dim = rho.spin().dim();
    DMatrix::from_fn(
        dim,
        dim,
        |r, c| if part.slot_of(r) != part.slot_of(c) { m[(r, c)] } else { Complex64::new(0.0, 0.0) },
    )
}

/// `sup_Ω |Q_ρ(Ω) - Σ_m̄ prob(m̄) Q_{ρ_m̄}(Ω)|` over the grid nodes.
///
/// The mixture is assembled from the individual Lüders states. Its Q is
/// subtracted at the operator level, `Q_ρ - Q_mix = Q_{ρ - mix}`, because the
/// difference can be many orders of magnitude below Q itself.
pub fn mixture_residual(rho: &DensityOperator, part: &SlotPartition, grid: &SphereGrid) -> Result<f64> {
    check_spin(rho.spin(), part)?;
    let probs = exact_slot_probs(rho, part)?;
    let mut diff = rho.matrix().clone();
    for (i, &p) in probs.probabilities().iter().enumerate() {
        if p <= MIN_CONDITIONING_PROBABILITY {
            // a vanishing slot still carries its (tiny) diagonal block
            let s = part.slot(i)?;
            for r in s.k_lo..=s.k_hi {
                for c in s.k_lo..=s.k_hi {
                    diff[(r, c)] -= rho.matrix()[(r, c)];
                }
            }
            continue;
        }
        let (rho_m, _) = luders_update(rho, part, i)?;
        diff -= rho_m.matrix() * Complex64::new(p, 0.0);
    }
    let values = matrix_q_values(rho.spin(), &diff, grid);
    Ok(values.iter().fold(0.0, |acc, v| acc.max(v.abs())))
}

/// `q_distance(Q_ρ, Q_{nonselective(ρ)}, metric)`, evaluated as the Q of the
/// removed cross-slot coherences so tiny values keep full relative precision.
pub fn invasiveness(rho: &DensityOperator, part: &SlotPartition, grid: &SphereGrid, metric: Metric) -> Result<f64> {
    check_spin(rho.spin(), part)?;
    let values = matrix_q_values(rho.spin(), &cross_slot_part(rho, part), grid);
    Ok(match metric {
        Metric::L1 => grid.integrate(&values.iter().map(|v| v.abs()).collect::<Vec<_>>()),
        Metric::Sup => values.iter().fold(0.0, |acc, v| acc.max(v.abs())),
    })
}

/// `(|m=j> + |m=-j>)/√2`.
pub fn cat_state(j: SpinJ) -> PureState {
    let dim = j.dim();
    let mut v = DVector::zeros(dim);
    if dim == 1 {
        v[0] = Complex64::new(1.0, 0.0);
    } else {
        v[0] = Complex64::new(0.5f64.sqrt(), 0.0);
        v[dim - 1] = Complex64::new(0.5f64.sqrt(), 0.0);
    }
    PureState::normalized(j, v).expect("non-zero")
}

/// `sup |Q_cat - Q_mix| = (2j+1)/(4π) 4^{-j}`, the peak of the interference term
/// `(2j+1)/(4π) (sin θ / 2)^{2j} cos(2jφ)`. Assembled in log space.
pub fn cat_gap(j: SpinJ) -> f64 {
    ((j.dim() as f64 / (4.0 * PI)).ln() - j.twice_j() as f64 * std::f64::consts::LN_2).exp()
}

/// [`cat_gap`] measured on a grid: the sup over nodes of the cat state's
/// interference Q term. Equals the closed form when the grid has a node on
/// the equator at an azimuth with `cos(2jφ) = ±1`.
pub fn cat_gap_on_grid(j: SpinJ, grid: &SphereGrid) -> Result<f64> {
    let rho = cat_state(j).to_density();
    let part = super::make_partition(j, j.dim().div_ceil(2).max(1))?;
    invasiveness(&rho, &part, grid, Metric::Sup)
}

/// Draws a slot from the Born distribution and returns it with the Lüders state.
pub fn sample_slot<R: Rng + ?Sized>(
    rho: &DensityOperator,
    part: &SlotPartition,
    rng: &mut R,
) -> Result<(usize, DensityOperator)> {
    let probs = exact_slot_probs(rho, part)?;
    let index = draw(probs.probabilities(), rng);
    let (state, _) = luders_update(rho, part, index)?;
    Ok((index, state))
}

/// Pure-state form of [`sample_slot`].
pub fn sample_slot_pure<R: Rng + ?Sized>(
    psi: &PureState,
    part: &SlotPartition,
    rng: &mut R,
) -> Result<(usize, PureState)> {
    let probs = exact_slot_probs(psi, part)?;
    let index = draw(probs.probabilities(), rng);
    let (state, _) = luders_update_pure(psi, part, index)?;
    Ok((index, state))
}

fn draw<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random::<f64>() * probs.iter().sum::<f64>();
    let mut acc = 0.0;
    let mut last_ok = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > MIN_CONDITIONING_PROBABILITY {
            last_ok = i;
            acc += p;
            if u < acc {
                return i;
            }
        }
    }
    last_ok
}
