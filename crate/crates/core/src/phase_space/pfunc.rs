use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::grid::SphereGrid;
use super::multipoles::TensorBasis;
use super::qmap::SphereMap;
use super::ylm::legendre_table;
use crate::spin::{CoherentKernel, DensityOperator, SpinJ};
use crate::{Error, Result};

/// Largest `j` accepted by [`p_function`].
pub const DEFAULT_P_J_CAP: f64 = 20.0;

/// Glauber-Sudarshan P function sampled on a grid; may be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct PMap {
    grid: SphereGrid,
    values: Vec<f64>,
    j: SpinJ,
}

impl PMap {
    pub fn new(j: SpinJ, grid: SphereGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        Ok(Self { grid, values, j })
    }
}

impl SphereMap for PMap {
    fn grid(&self) -> &SphereGrid {
        &self.grid
    }
    fn values(&self) -> &[f64] {
        &self.values
    }
    fn spin(&self) -> SpinJ {
        self.j
    }
}

/// P function of `rho` with the default cap `j <= 20`.
pub fn p_function(rho: &DensityOperator, grid: &SphereGrid) -> Result<PMap> {
    p_function_with_cap(rho, grid, DEFAULT_P_J_CAP)
}

/// P function of `rho`, refusing `j > cap`.
///
/// With `<Ω|T_LM|Ω> = t_L sqrt(4π/(2L+1)) Y_LM(Ω)`, the expansion
/// `P = Σ p_LM Y_LM` has `p_LM = ρ_LM / (t_L sqrt(4π/(2L+1)))`. The factors
/// `t_L` shrink roughly like binomial ratios in `L`, which is what the cap
/// guards against.
pub fn p_function_with_cap(rho: &DensityOperator, grid: &SphereGrid, cap: f64) -> Result<PMap> {
    let j = rho.spin();
    if j.j() > cap {
        return Err(Error::JAboveCap { j: j.j(), cap });
    }
    let basis = TensorBasis::new(j);
    let rho_lm = basis.multipoles(rho.matrix());
    let l_max = j.twice_j() as usize;
    // p[L][M] for M >= 0; negative M follow from Hermiticity
    let p: Vec<Vec<Complex64>> = (0..=l_max)
        .map(|l| {
            let f = basis.top_entry(l) * (4.0 * PI / (2 * l + 1) as f64).sqrt();
            (0..=l as i64).map(|m| rho_lm.get(l, m) / f).collect()
        })
        .collect();
    let n_phi = grid.n_phi();
    let rows: Vec<Vec<f64>> = grid
        .rows()
        .par_iter()
        .map(|r| {
            let leg = legendre_table(l_max, r.cos_theta);
            let a: Vec<Complex64> = (0..=l_max).map(|m| (m..=l_max).map(|l| p[l][m] * leg[l][m]).sum()).collect();
            (0..n_phi)
                .map(|i| {
                    let phi = grid.phi(i);
                    let tail: f64 = (1..=l_max).map(|m| (a[m] * Complex64::from_polar(1.0, m as f64 * phi)).re).sum();
                    a[0].re + 2.0 * tail
                })
                .collect()
        })
        .collect();
    PMap::new(j, grid.clone(), rows.concat())
}

/// `∫ P(Ω) |Ω><Ω| d²Ω` by quadrature; the grid must be exact to degree `4j`.
pub fn state_from_p(p: &PMap) -> Result<DensityOperator> {
    let j = p.spin();
    let grid = p.grid();
    let need = 2 * j.twice_j() as usize;
    if grid.exact_degree() < need {
        return Err(Error::GridTooCoarse { need, have: grid.exact_degree() });
    }
    let dim = j.dim();
    let n_phi = grid.n_phi();
    let kernel = CoherentKernel::new(j);
    let fft = FftPlanner::new().plan_fft_forward(n_phi);
    let dphi = grid.phi_weight();
    let parts: Vec<DMatrix<Complex64>> = grid
        .rows()
        .par_iter()
        .enumerate()
        .map(|(ri, r)| {
            let mut f: Vec<Complex64> =
                p.values()[ri * n_phi..(ri + 1) * n_phi].iter().map(|&v| Complex64::new(v, 0.0)).collect();
            // f[d mod n] = Σ_l P_l e^{-i d φ_l}
            fft.process(&mut f);
            let mags = kernel.magnitudes(r.theta);
            let w = r.weight * dphi;
            DMatrix::from_fn(dim, dim, |a, b| {
                let d = (a as i64 - b as i64).rem_euclid(n_phi as i64) as usize;
                f[d] * (w * mags[a] * mags[b])
            })
        })
        .collect();
    let mut m = DMatrix::zeros(dim, dim);
    for part in &parts {
        m += part;
    }
    for r in 0..dim {
        m[(r, r)].im = 0.0;
        for c in r + 1..dim {
            let avg = 0.5 * (m[(r, c)] + m[(c, r)].conj());
            m[(r, c)] = avg;
            m[(c, r)] = avg.conj();
        }
    }
    DensityOperator::from_matrix_unchecked(j, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{build_grid, q_function, spherical_harmonic};
    use crate::random::{random_density, random_direction};
    use crate::spin::{coherent_state, PureState};
    use nalgebra::DVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coherent_expectation_of_tensors_is_harmonic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let j = SpinJ::from_twice(5);
        let basis = TensorBasis::new(j);
        for _ in 0..5 {
            let dir = random_direction(&mut rng);
            let v = coherent_state(j, dir).amplitudes().clone();
            for l in 0..j.dim() {
                for m in -(l as i64)..=l as i64 {
                    let got = (v.adjoint() * basis.matrix(l, m) * &v)[(0, 0)];
                    let want = spherical_harmonic(l, m, dir.theta(), dir.phi())
                        * (basis.top_entry(l) * (4.0 * PI / (2 * l + 1) as f64).sqrt());
                    assert!((got - want).norm() < 1e-13, "L={l} M={m}");
                }
            }
        }
    }

    #[test]
    fn maximally_mixed_is_flat() {
        let j = SpinJ::from_twice(6);
        let p = p_function(&DensityOperator::maximally_mixed(j), &build_grid(12)).unwrap();
        for v in p.values() {
            assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-10);
        }
        let back = state_from_p(&p).unwrap();
        assert!(back.max_abs_diff(&DensityOperator::maximally_mixed(j)) < 1e-10);
    }

    #[test]
    fn round_trip_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for twice in 1..=10u32 {
            let j = SpinJ::from_twice(twice);
            let grid = build_grid(2 * twice as usize);
            let rho = random_density(j, 2, &mut rng);
            let p = p_function(&rho, &grid).unwrap();
            assert!((p.integral() - 1.0).abs() < 1e-8);
            let back = state_from_p(&p).unwrap();
            assert!(back.max_abs_diff(&rho) < 1e-6, "2j={twice}");
            assert!((back.trace().re - 1.0).abs() < 1e-8);
            assert!(back.hermitian_deviation() == 0.0);
        }
    }

    #[test]
    fn q_from_p_smoothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for twice in [2u32, 7, 10] {
            let j = SpinJ::from_twice(twice);
            let grid = build_grid(2 * twice as usize);
            let rho = random_density(j, 3, &mut rng);
            let p = p_function(&rho, &grid).unwrap();
            let q = q_function(&rho, &grid);
            let pref = j.dim() as f64 / (4.0 * PI);
            for (target, qv) in grid.nodes().zip(q.values()).step_by(7) {
                let smoothed: f64 = grid
                    .nodes()
                    .zip(p.values())
                    .map(|(n, pv)| {
                        let c = n.dir.cos_angle_to(target.dir);
                        n.weight * pv * pref * ((1.0 + c) / 2.0).powi(twice as i32)
                    })
                    .sum();
                assert!((smoothed - qv).abs() < 1e-8, "2j={twice}");
            }
        }
    }

    #[test]
    fn cat_state_has_negative_p() {
        let j = SpinJ::from_twice(4);
        let mut v = DVector::zeros(5);
        v[0] = Complex64::new(0.5f64.sqrt(), 0.0);
        v[4] = Complex64::new(0.5f64.sqrt(), 0.0);
        let rho = PureState::new(j, v).unwrap().to_density();
        let grid = build_grid(8);
        let p = p_function(&rho, &grid).unwrap();
        assert!(p.min_value() < 0.0);
        let back = state_from_p(&p).unwrap();
        assert!(back.max_abs_diff(&rho) < 1e-6);
    }

    #[test]
    fn cap_and_grid_checks() {
        let j = SpinJ::from_twice(42);
        let rho = DensityOperator::maximally_mixed(j);
        assert!(matches!(p_function(&rho, &build_grid(4)), Err(Error::JAboveCap { .. })));
        assert!(p_function_with_cap(&rho, &build_grid(4), 25.0).is_ok());
        let j = SpinJ::from_twice(4);
        let p = p_function(&DensityOperator::maximally_mixed(j), &build_grid(6)).unwrap();
        assert_eq!(state_from_p(&p), Err(Error::GridTooCoarse { need: 8, have: 6 }));
    }
}
