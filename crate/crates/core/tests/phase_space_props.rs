use std::f64::consts::PI;

use macrospin::dynamics::rodrigues;
use macrospin::phase_space::{build_grid, p_function, q_function, state_from_p, SphereMap};
use macrospin::random::{random_density, random_pure};
use macrospin::spin::{coherent_state, DensityOperator, Direction, Rotation, SpinJ};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spin() -> impl Strategy<Value = SpinJ> {
    (1u32..=40).prop_map(SpinJ::from_twice)
}

/// `(2j+1)/(4π) <Ω|ρ|Ω>` straight from the definition.
fn q_at(rho: &DensityOperator, dir: Direction) -> f64 {
    let c = coherent_state(rho.spin(), dir);
    let v = c.amplitudes();
    let e = (v.adjoint() * rho.matrix() * v)[(0, 0)].re;
    rho.spin().dim() as f64 / (4.0 * PI) * e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn q_is_a_probability_density(j in spin(), rank in 1usize..5, seed: u64) {
        let rho = random_density(j, rank, &mut ChaCha8Rng::seed_from_u64(seed));
        let q = q_function(&rho, &build_grid(j.twice_j() as usize));
        prop_assert!(q.min_value() >= 0.0);
        prop_assert!((q.integral() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn q_matches_its_definition_at_every_node(twice in 1u32..=12, seed: u64) {
        let j = SpinJ::from_twice(twice);
        let rho = random_density(j, 3, &mut ChaCha8Rng::seed_from_u64(seed));
        let grid = build_grid(twice as usize);
        let q = q_function(&rho, &grid);
        for (i, node) in grid.nodes().enumerate() {
            prop_assert!((q.values()[i] - q_at(&rho, node.dir)).abs() < 1e-12);
        }
    }

    #[test]
    fn q_is_linear_in_the_state(j in spin(), p in 0.0..=1.0f64, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_density(j, 2, &mut rng);
        let b = random_pure(j, &mut rng).to_density();
        let mix = DensityOperator::mixture(&[(p, &a), (1.0 - p, &b)]).unwrap();
        let grid = build_grid(j.twice_j() as usize);
        let (qa, qb, qm) = (q_function(&a, &grid), q_function(&b, &grid), q_function(&mix, &grid));
        for i in 0..grid.len() {
            prop_assert!((qm.values()[i] - p * qa.values()[i] - (1.0 - p) * qb.values()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn q_is_rotation_covariant(twice in 1u32..=16, angle in -PI..PI, seed: u64) {
        let j = SpinJ::from_twice(twice);
        let rho = random_density(j, 2, &mut ChaCha8Rng::seed_from_u64(seed));
        let n: [f64; 3] = [0.3, -0.5, 0.81];
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        let n = n.map(|x| x / norm);
        let rotated = Rotation::axis_angle(n, angle).apply_density(&rho);
        let grid = build_grid(6);
        let q = q_function(&rotated, &grid);
        for (i, node) in grid.nodes().enumerate() {
            let back = Direction::from_vector(rodrigues(node.dir.to_vector(), n, -angle)).unwrap();
            prop_assert!((q.values()[i] - q_at(&rho, back)).abs() < 1e-10);
        }
    }

    #[test]
    fn p_function_inverts(twice in 1u32..=8, rank in 1usize..4, seed: u64) {
        let j = SpinJ::from_twice(twice);
        let rho = random_density(j, rank, &mut ChaCha8Rng::seed_from_u64(seed));
        let grid = build_grid(2 * twice as usize);
        let p = p_function(&rho, &grid).unwrap();
        prop_assert!((p.integral() - 1.0).abs() < 1e-10);
        prop_assert!(rho.trace_distance(&state_from_p(&p).unwrap()).unwrap() < 1e-9);
    }
}

#[test]
fn coherent_q_peaks_at_its_direction() {
    let j = SpinJ::from_twice(30);
    let dir = Direction::new(1.1, 0.4).unwrap();
    let rho = coherent_state(j, dir).to_density();
    assert!((q_at(&rho, dir) - 31.0 / (4.0 * PI)).abs() < 1e-12);
}
