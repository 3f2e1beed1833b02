use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::precession::{evolve, PrecessionSpec};
use crate::coarse::{SlotPartition, MIN_CONDITIONING_PROBABILITY};
use crate::csv::{fmt_f64, row};
use crate::spin::DensityOperator;
use crate::{Error, Result};

/// Two-time correlators of the dichotomized slot observable at times `0, τ, 2τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LgResult {
    pub omega_tau: f64,
    pub c12: f64,
    pub c23: f64,
    pub c13: f64,
    /// `C12 + C23 - C13`; macrorealism requires `K <= 1`.
    pub k: f64,
}

/// `+1` for slots whose centre `m̄` is `>= 0`, `-1` otherwise.
pub fn dichotomy(part: &SlotPartition, index: usize) -> f64 {
    if part.midpoint(index) >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `<Q(t_a) Q(t_b)>` for a measurement at `t_a` followed, `dt` later, by one at `t_b`;
/// `rho` is the state just before the first measurement.
///
/// Sums `s_a s_b p(a) p(b|a)` over all outcome pairs, each `p(b|a)` taken from
/// the Lüders state of outcome `a` evolved for `dt`.
fn two_time(rho: &DensityOperator, part: &SlotPartition, spec: &PrecessionSpec, dt: f64) -> Result<f64> {
    let dim = rho.spin().dim();
    let m = rho.matrix();
    let mut c = 0.0;
    for (a, slot) in part.slots().iter().enumerate() {
        let p_a: f64 = (slot.k_lo..=slot.k_hi).map(|k| m[(k, k)].re).sum();
        if p_a <= MIN_CONDITIONING_PROBABILITY {
            continue;
        }
        let block = DMatrix::from_fn(dim, dim, |r, col| {
            if slot.contains(r) && slot.contains(col) {
                m[(r, col)] / p_a
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let after = evolve(&DensityOperator::from_matrix_unchecked(rho.spin(), block)?, spec, dt);
        let diag = after.jz_distribution();
        let e_b: f64 = part
            .slots()
            .iter()
            .enumerate()
            .map(|(b, s)| dichotomy(part, b) * diag[s.k_lo..=s.k_hi].iter().sum::<f64>())
            .sum();
        c += dichotomy(part, a) * p_a * e_b;
    }
    Ok(c)
}

/// Leggett-Garg combination for measurements at `0, τ, 2τ` starting from `rho0`.
///
/// Each correlator comes from its own run in which only its two times are
/// measured, so `C23` sees the unmeasured evolution up to `τ`.
pub fn lg_correlator(
    rho0: &DensityOperator,
    spec: &PrecessionSpec,
    tau: f64,
    part: &SlotPartition,
) -> Result<LgResult> {
    if part.len() < 2 {
        return Err(Error::TooFewSlots { need: 2, have: part.len() });
    }
    if part.spin() != rho0.spin() {
        return Err(Error::DimensionMismatch { expected: part.spin().dim(), found: rho0.spin().dim() });
    }
    let c12 = two_time(rho0, part, spec, tau)?;
    let c23 = two_time(&evolve(rho0, spec, tau), part, spec, tau)?;
    let c13 = two_time(rho0, part, spec, 2.0 * tau)?;
    Ok(LgResult { omega_tau: spec.omega() * tau, c12, c23, c13, k: c12 + c23 - c13 })
}

/// [`lg_correlator`] over several `τ`, in input order.
pub fn lg_sweep(
    rho0: &DensityOperator,
    spec: &PrecessionSpec,
    taus: &[f64],
    part: &SlotPartition,
) -> Result<Vec<LgResult>> {
    taus.par_iter().map(|&tau| lg_correlator(rho0, spec, tau, part)).collect()
}

/// Writes `omega_tau,delta_m,c12,c23,c13,K` rows.
pub fn write_lg_csv<W: Write>(mut out: W, delta_m: usize, results: &[LgResult]) -> io::Result<()> {
    writeln!(out, "omega_tau,delta_m,c12,c23,c13,K")?;
    for r in results {
        let fields =
            [fmt_f64(r.omega_tau), delta_m.to_string(), fmt_f64(r.c12), fmt_f64(r.c23), fmt_f64(r.c13), fmt_f64(r.k)];
        writeln!(out, "{}", row(&fields))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::make_partition;
    use crate::spin::SpinJ;
    use std::f64::consts::PI;

    #[test]
    fn spin_half_matches_two_level_formula() {
        let j = SpinJ::from_twice(1);
        let part = make_partition(j, 1).unwrap();
        let spec = PrecessionSpec::new([1.0, 0.0, 0.0], 1.0).unwrap();
        let rho = DensityOperator::maximally_mixed(j);
        for i in 0..=60 {
            let x = i as f64 * PI / 60.0;
            let r = lg_correlator(&rho, &spec, x, &part).unwrap();
            assert!((r.k - (2.0 * x.cos() - (2.0 * x).cos())).abs() < 1e-12);
            assert!((r.c12 - x.cos()).abs() < 1e-12);
        }
        let peak = lg_correlator(&rho, &spec, PI / 3.0, &part).unwrap();
        assert!((peak.k - 1.5).abs() < 1e-12);
    }

    #[test]
    fn zero_delay_is_perfectly_correlated() {
        let j = SpinJ::from_twice(7);
        let part = make_partition(j, 3).unwrap();
        let spec = PrecessionSpec::new([0.0, 1.0, 0.0], 2.0).unwrap();
        let r = lg_correlator(&DensityOperator::maximally_mixed(j), &spec, 0.0, &part).unwrap();
        assert!((r.c12 - 1.0).abs() < 1e-14 && (r.c23 - 1.0).abs() < 1e-14 && (r.c13 - 1.0).abs() < 1e-14);
        assert!((r.k - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dichotomy_tie_goes_up() {
        let part = make_partition(SpinJ::from_twice(4), 1).unwrap();
        let signs: Vec<f64> = (0..5).map(|i| dichotomy(&part, i)).collect();
        assert_eq!(signs, vec![-1.0, -1.0, 1.0, 1.0, 1.0]);
        let one_slot = make_partition(SpinJ::from_twice(4), 5).unwrap();
        let spec = PrecessionSpec::new([1.0, 0.0, 0.0], 1.0).unwrap();
        assert!(matches!(
            lg_correlator(&DensityOperator::maximally_mixed(SpinJ::from_twice(4)), &spec, 1.0, &one_slot),
            Err(Error::TooFewSlots { .. })
        ));
    }

    #[test]
    fn sweep_preserves_order() {
        let j = SpinJ::from_twice(3);
        let part = make_partition(j, 2).unwrap();
        let spec = PrecessionSpec::new([1.0, 0.0, 0.0], 1.0).unwrap();
        let taus: Vec<f64> = (0..10).map(|i| 0.1 * i as f64).collect();
        let res = lg_sweep(&DensityOperator::maximally_mixed(j), &spec, &taus, &part).unwrap();
        for (r, t) in res.iter().zip(&taus) {
            assert_eq!(r.omega_tau, *t);
            assert!(r.c12.abs() <= 1.0 + 1e-12 && r.c13.abs() <= 1.0 + 1e-12);
        }
        let mut buf = Vec::new();
        write_lg_csv(&mut buf, 2, &res).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("omega_tau,delta_m,c12,c23,c13,K\n0.0000000000000000e0,2,"));
    }
}
