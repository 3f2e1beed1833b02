use std::f64::consts::PI;

use macrospin::coarse::{
    band_edges, exact_slot_probs, invasiveness, luders_update, make_partition, mixture_residual, nonselective_update,
    slot_bands,
};
use macrospin::phase_space::{build_grid, Metric};
use macrospin::random::random_density;
use macrospin::spin::{coherent_state, Direction, SpinJ};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

fn spin_and_width() -> impl Strategy<Value = (SpinJ, usize)> {
    (1u32..=80).prop_flat_map(|twice| (Just(SpinJ::from_twice(twice)), 1..=twice as usize + 1))
}

/// Born probability of `m` in the coherent state at polar angle `θ`:
/// `C(2j, j+m) cos^{2(j+m)}(θ/2) sin^{2(j-m)}(θ/2)`.
fn binomial_weight(twice_j: u32, k: usize, theta: f64) -> f64 {
    let n = twice_j as f64;
    let k = k as f64;
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let ln_c = ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0);
    (ln_c + 2.0 * k * c.ln() + 2.0 * (n - k) * s.ln()).exp()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn slots_tile_the_spectrum_and_bands_tile_the_sphere((j, dm) in spin_and_width()) {
        let part = make_partition(j, dm).unwrap();
        let slots = part.slots();
        prop_assert_eq!(slots[0].k_lo, 0);
        prop_assert_eq!(slots.last().unwrap().k_hi, j.dim() - 1);
        for w in slots.windows(2) {
            prop_assert_eq!(w[0].k_hi + 1, w[1].k_lo);
        }
        prop_assert!(slots.iter().all(|s| s.width() <= dm));
        let edges = band_edges(&part);
        prop_assert_eq!(edges[0], -1.0);
        prop_assert_eq!(*edges.last().unwrap(), 1.0);
        let total: f64 = slot_bands(&part).iter().map(|b| b.width()).sum();
        prop_assert!((total - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_slot_probabilities_are_binomial_sums((j, dm) in spin_and_width(), theta in 0.05..PI - 0.05) {
        let part = make_partition(j, dm).unwrap();
        let psi = coherent_state(j, Direction::new(theta, 0.7).unwrap());
        let probs = exact_slot_probs(&psi, &part).unwrap();
        for (i, s) in part.slots().iter().enumerate() {
            let oracle: f64 = (s.k_lo..=s.k_hi).map(|k| binomial_weight(j.twice_j(), k, theta)).sum();
            prop_assert!((probs.probabilities()[i] - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn nonselective_measurement_is_idempotent_and_keeps_statistics((j, dm) in spin_and_width(), seed: u64) {
        let part = make_partition(j, dm).unwrap();
        let rho = random_density(j, 3, &mut ChaCha8Rng::seed_from_u64(seed));
        let once = nonselective_update(&rho, &part).unwrap();
        let twice = nonselective_update(&once, &part).unwrap();
        prop_assert!(once.max_abs_diff(&twice) < 1e-15);
        let before = exact_slot_probs(&rho, &part).unwrap();
        let after = exact_slot_probs(&once, &part).unwrap();
        prop_assert!(before.max_abs_diff(&after) < 1e-14);
        prop_assert!((once.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn luders_states_live_in_their_slot((j, dm) in spin_and_width(), seed: u64) {
        let part = make_partition(j, dm).unwrap();
        let rho = random_density(j, 2, &mut ChaCha8Rng::seed_from_u64(seed));
        let index = (seed as usize) % part.len();
        let (post, p) = luders_update(&rho, &part, index).unwrap();
        prop_assert!((p - exact_slot_probs(&rho, &part).unwrap().probabilities()[index]).abs() < 1e-14);
        prop_assert!((post.trace().re - 1.0).abs() < 1e-12);
        let inside = exact_slot_probs(&post, &part).unwrap().probabilities()[index];
        prop_assert!((inside - 1.0).abs() < 1e-12);
    }

    #[test]
    fn block_diagonal_states_are_not_disturbed((j, dm) in spin_and_width(), seed: u64) {
        let part = make_partition(j, dm).unwrap();
        let grid = build_grid(j.twice_j() as usize);
        let rho = nonselective_update(&random_density(j, 4, &mut ChaCha8Rng::seed_from_u64(seed)), &part).unwrap();
        prop_assert!(invasiveness(&rho, &part, &grid, Metric::L1).unwrap() < 1e-12);
        prop_assert!(mixture_residual(&rho, &part, &grid).unwrap() < 1e-12);
    }

    #[test]
    fn one_slot_never_disturbs((twice, seed) in (1u32..=60, any::<u64>())) {
        let j = SpinJ::from_twice(twice);
        let part = make_partition(j, j.dim()).unwrap();
        let rho = random_density(j, 3, &mut ChaCha8Rng::seed_from_u64(seed));
        let grid = build_grid(twice as usize);
        prop_assert_eq!(invasiveness(&rho, &part, &grid, Metric::Sup).unwrap(), 0.0);
    }
}

#[test]
fn coarse_disturbance_depends_on_distance_to_slot_edges() {
    let j = SpinJ::from_twice(200);
    let part = make_partition(j, 50).unwrap();
    let grid = build_grid(200);
    let scale = 201.0 / (4.0 * PI);
    let residual_at = |m: f64| {
        let rho = coherent_state(j, Direction::new((m / 100.0).acos(), 0.3).unwrap()).to_density();
        mixture_residual(&rho, &part, &grid).unwrap()
    };
    // centres of the outer slots, where the peak is narrow (sin θ ≈ 0.66)
    for m in [-75.5, 74.5] {
        assert!(residual_at(m) <= 1e-3 * scale, "m = {m}: {}", residual_at(m) / scale);
    }
    // near the equator the peak is wider and only ~3.6 standard deviations from an edge
    for m in [-25.5, 24.5] {
        let r = residual_at(m) / scale;
        assert!(r > 1e-3 && r < 1e-2, "m = {m}: {r}");
    }
    // a peak on a slot edge is split by the measurement whatever the width
    assert!(residual_at(50.0) > 0.1 * scale);
}

#[test]
fn invasiveness_decreases_as_slots_double() {
    let j = SpinJ::from_twice(100);
    let grid = build_grid(100);
    let a = coherent_state(j, Direction::new(PI / 3.0, 0.0).unwrap());
    let b = coherent_state(j, Direction::new(2.0 * PI / 3.0, PI).unwrap());
    let rho = macrospin::spin::PureState::normalized(j, a.amplitudes() + b.amplitudes()).unwrap().to_density();
    let mut widths: Vec<usize> =
        std::iter::successors(Some(1usize), |x| Some(2 * x)).take_while(|&x| x < 101).collect();
    widths.push(101);
    let values: Vec<f64> = widths
        .iter()
        .map(|&dm| invasiveness(&rho, &make_partition(j, dm).unwrap(), &grid, Metric::L1).unwrap())
        .collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0]), "{values:?}");
    assert_eq!(*values.last().unwrap(), 0.0);
}
