use std::f64::consts::PI;

use macrospin::coarse::make_partition;
use macrospin::dynamics::{evolve, lg_correlator, quantum_trajectory, rodrigues, PrecessionSpec, TrajectoryMode};
use macrospin::random::{random_density, random_direction, random_pure};
use macrospin::spin::{mean_spin, SpinJ};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spin() -> impl Strategy<Value = SpinJ> {
    (1u32..=40).prop_map(SpinJ::from_twice)
}

fn spec(seed: u64) -> PrecessionSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    PrecessionSpec::new(random_direction(&mut rng).to_vector(), 0.3 + (seed % 7) as f64 * 0.4).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn evolution_is_a_one_parameter_group(j in spin(), t1 in -3.0..3.0f64, t2 in -3.0..3.0f64, seed: u64) {
        let s = spec(seed);
        let rho = random_density(j, 2, &mut ChaCha8Rng::seed_from_u64(seed));
        let a = evolve(&evolve(&rho, &s, t1), &s, t2);
        let b = evolve(&rho, &s, t1 + t2);
        prop_assert!(a.max_abs_diff(&b) < 1e-11);
    }

    #[test]
    fn mean_spin_precesses_classically_for_any_state(j in spin(), t in -5.0..5.0f64, seed: u64) {
        let s = spec(seed);
        let rho = random_density(j, 3, &mut ChaCha8Rng::seed_from_u64(seed));
        let expected = rodrigues(mean_spin(&rho), s.axis(), s.omega() * t);
        let got = mean_spin(&evolve(&rho, &s, t));
        for i in 0..3 {
            prop_assert!((got[i] - expected[i]).abs() < 1e-10 * j.j().max(1.0));
        }
    }

    #[test]
    fn a_single_slot_measurement_is_unitary_evolution(j in spin(), seed: u64) {
        let s = spec(seed);
        let psi = random_pure(j, &mut ChaCha8Rng::seed_from_u64(seed));
        let times: Vec<f64> = (0..8).map(|k| k as f64 * 0.4).collect();
        let whole = make_partition(j, j.dim()).unwrap();
        let a = quantum_trajectory(&psi, &s, &times, TrajectoryMode::Unitary).unwrap();
        let b = quantum_trajectory(&psi, &s, &times, TrajectoryMode::Nonselective(&whole)).unwrap();
        for (x, y) in a.quantum_len.iter().zip(&b.quantum_len) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn correlators_are_bounded((twice, dm) in (2u32..=30).prop_flat_map(|t| (Just(t), 1..=t as usize)), tau in 0.0..PI, seed: u64) {
        let j = SpinJ::from_twice(twice);
        let part = make_partition(j, dm).unwrap();
        let rho = random_density(j, 2, &mut ChaCha8Rng::seed_from_u64(seed));
        let r = lg_correlator(&rho, &spec(seed), tau, &part).unwrap();
        for c in [r.c12, r.c23, r.c13] {
            prop_assert!(c.abs() <= 1.0 + 1e-12);
        }
        prop_assert!((r.k - (r.c12 + r.c23 - r.c13)).abs() < 1e-15);
        prop_assert!(r.k <= 3.0 + 1e-12);
    }
}

#[test]
fn times_must_increase() {
    let j = SpinJ::from_twice(4);
    let psi = random_pure(j, &mut ChaCha8Rng::seed_from_u64(1));
    let s = spec(1);
    assert!(quantum_trajectory(&psi, &s, &[0.0, 0.5, 0.5], TrajectoryMode::Unitary).is_err());
    assert!(quantum_trajectory(&psi, &s, &[], TrajectoryMode::Unitary).is_err());
}
