//! Random states for tests, sweeps and property checks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::distr::{Distribution, StandardUniform};
use rand::Rng;

use crate::spin::{DensityOperator, Direction, PureState, SpinJ};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller, cosine branch only
    let u1: f64 = 1.0 - <StandardUniform as Distribution<f64>>::sample(&StandardUniform, rng);
    let u2: f64 = StandardUniform.sample(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng))
}

/// Haar-random pure state.
pub fn random_pure<R: Rng + ?Sized>(j: SpinJ, rng: &mut R) -> PureState {
    let v = DVector::from_fn(j.dim(), |_, _| complex_gaussian(rng));
    PureState::normalized(j, v).expect("gaussian vector is non-zero")
}

/// Mixed state `G G† / Tr(G G†)` with `G` a `dim x rank` complex Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(j: SpinJ, rank: usize, rng: &mut R) -> DensityOperator {
    let rank = rank.max(1);
    let g = DMatrix::from_fn(j.dim(), rank, |_, _| complex_gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let mut m = m.unscale(tr);
    // exact Hermiticity
    for r in 0..m.nrows() {
        m[(r, r)].im = 0.0;
        for c in r + 1..m.ncols() {
            m[(c, r)] = m[(r, c)].conj();
        }
    }
    DensityOperator::from_matrix_unchecked(j, m).expect("square")
}

/// Uniformly distributed direction on the sphere.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> Direction {
    let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi: f64 = std::f64::consts::TAU * rng.random::<f64>();
    Direction::new(z.clamp(-1.0, 1.0).acos(), phi).expect("in range")
}
