//! SU(2) rotations and their spin-j representation matrices.
//!
//! Conventions: `Rotation::y(θ) = exp(-iθσ_y/2)`, `Rotation::z(φ) = exp(-iφσ_z/2)`,
//! and a rotation acts on spin-j states as `exp(-iα n·J)`. Spin-j matrices are
//! the symmetric tensor powers of the 2x2 matrix, built by adding one spin-1/2
//! factor at a time.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{DensityOperator, Direction, PureState, SpinJ};

const DOWN: usize = 0;
const UP: usize = 1;

/// Element of SU(2), stored as `u[b][a] = <b|U|a>` with index 0 = spin down, 1 = spin up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    u: [[Complex64; 2]; 2],
}

impl Rotation {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { u: [[one, zero], [zero, one]] }
    }

    pub fn from_matrix(u: [[Complex64; 2]; 2]) -> Self {
        Self { u }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.u
    }

    /// `exp(-i angle n·σ/2)` for a unit axis `n`.
    pub fn axis_angle(axis: [f64; 3], angle: f64) -> Self {
        let (s, c) = (0.5 * angle).sin_cos();
        let [nx, ny, nz] = axis;
        let mut u = [[Complex64::new(0.0, 0.0); 2]; 2];
        u[UP][UP] = Complex64::new(c, -s * nz);
        u[DOWN][DOWN] = Complex64::new(c, s * nz);
        u[UP][DOWN] = Complex64::new(-s * ny, -s * nx);
        u[DOWN][UP] = Complex64::new(s * ny, -s * nx);
        Self { u }
    }

    pub fn y(theta: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        let mut u = [[Complex64::new(0.0, 0.0); 2]; 2];
        u[UP][UP] = Complex64::new(c, 0.0);
        u[DOWN][DOWN] = Complex64::new(c, 0.0);
        u[UP][DOWN] = Complex64::new(-s, 0.0);
        u[DOWN][UP] = Complex64::new(s, 0.0);
        Self { u }
    }

    pub fn z(phi: f64) -> Self {
        let mut u = [[Complex64::new(0.0, 0.0); 2]; 2];
        u[UP][UP] = Complex64::from_polar(1.0, -0.5 * phi);
        u[DOWN][DOWN] = Complex64::from_polar(1.0, 0.5 * phi);
        Self { u }
    }

    /// Rotation by `θ` about the equatorial axis at azimuth `φ + π/2`, which
    /// carries `+z` to `dir`. In z-y-z Euler angles this is `(φ, θ, -φ)`; it
    /// differs from `(φ, θ, 0)` only by a trailing `z` rotation, which leaves
    /// `|m=j>` invariant up to phase, and it reduces to the identity at `θ = 0`.
    pub fn to_direction(dir: Direction) -> Self {
        let (s, c) = dir.phi().sin_cos();
        Rotation::axis_angle([-s, c, 0.0], dir.theta())
    }

    /// `self · other` (apply `other` first).
    pub fn then_after(&self, other: &Rotation) -> Rotation {
        let mut u = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (b, row) in u.iter_mut().enumerate() {
            for (a, entry) in row.iter_mut().enumerate() {
                *entry = self.u[b][0] * other.u[0][a] + self.u[b][1] * other.u[1][a];
            }
        }
        Rotation { u }
    }

    pub fn inverse(&self) -> Rotation {
        let mut u = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (b, row) in u.iter_mut().enumerate() {
            for (a, entry) in row.iter_mut().enumerate() {
                *entry = self.u[a][b].conj();
            }
        }
        Rotation { u }
    }

    /// Spin-j representation matrix `D^j(U)` in the Dicke basis.
    pub fn wigner_matrix(&self, j: SpinJ) -> DMatrix<Complex64> {
        sym_power(&self.u, j.twice_j())
    }

    pub fn apply_pure(&self, state: &PureState) -> PureState {
        let d = self.wigner_matrix(state.spin());
        apply_matrix_pure(&d, state)
    }

    pub fn apply_density(&self, rho: &DensityOperator) -> DensityOperator {
        let d = self.wigner_matrix(rho.spin());
        apply_matrix_density(&d, rho)
    }
}

pub(crate) fn apply_matrix_pure(d: &DMatrix<Complex64>, state: &PureState) -> PureState {
    let amps: DVector<Complex64> = d * state.amplitudes();
    PureState::from_raw(state.spin(), amps)
}

pub(crate) fn apply_matrix_density(d: &DMatrix<Complex64>, rho: &DensityOperator) -> DensityOperator {
    let m = d * rho.matrix() * d.adjoint();
    DensityOperator::from_matrix_unchecked(rho.spin(), m).expect("shape preserved")
}

/// Symmetric tensor power `Sym^n(u)` of a 2x2 matrix in the normalized monomial
/// basis `x^a y^{n-a} / sqrt(a!(n-a)!)`, where `a` counts spin-up factors.
///
/// Degree `n` is the compression `V† (u ⊗ Sym^{n-1}(u)) V` of degree `n - 1`,
/// with `V` the isometry embedding `Sym^n` into `C^2 ⊗ Sym^{n-1}`. A compression
/// of a unitary is a contraction, so rounding errors grow at most linearly in `n`.
/// For real `u` this is Risbo's recursion for the Wigner d-matrix.
pub fn sym_power(u: &[[Complex64; 2]; 2], n: u32) -> DMatrix<Complex64> {
    let n = n as usize;
    let sqrt: Vec<f64> = (0..=n).map(|k| (k as f64).sqrt()).collect();
    let mut prev = vec![Complex64::new(1.0, 0.0)];
    let mut next = Vec::new();
    for deg in 1..=n {
        let size = deg + 1;
        let psize = deg;
        let inv = (deg as f64).recip();
        next.clear();
        next.resize(size * size, Complex64::new(0.0, 0.0));
        for b in 0..psize {
            let wb_down = sqrt[deg - b];
            let wb_up = sqrt[b + 1];
            for a in 0..psize {
                let v = prev[b * psize + a] * inv;
                let wa_down = sqrt[deg - a];
                let wa_up = sqrt[a + 1];
                next[b * size + a] += u[DOWN][DOWN] * v * (wb_down * wa_down);
                next[(b + 1) * size + a] += u[UP][DOWN] * v * (wb_up * wa_down);
                next[b * size + a + 1] += u[DOWN][UP] * v * (wb_down * wa_up);
                next[(b + 1) * size + a + 1] += u[UP][UP] * v * (wb_up * wa_up);
            }
        }
        std::mem::swap(&mut prev, &mut next);
    }
    let size = n + 1;
    DMatrix::from_fn(size, size, |b, a| prev[b * size + a])
}

/// Applies the rotation carrying `+z` to `dir`; see [`Rotation::to_direction`].
pub fn rotate(state: &PureState, dir: Direction) -> PureState {
    Rotation::to_direction(dir).apply_pure(state)
}
