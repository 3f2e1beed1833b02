//! Spin-j linear algebra in the ordered Dicke basis.

mod coherent;
mod operators;
mod rotation;
mod state;

use std::f64::consts::{PI, TAU};
use std::fmt;

use crate::{Error, Result};

pub use coherent::{coherent_state, log_binomial_table, overlap, CoherentKernel};
pub use operators::{
    expectation, j_omega_operator, jx_operator, jy_operator, jz_operator, lowering_operator, mean_spin, mean_spin_pure,
    raising_operator, SpinOperator,
};
pub use rotation::{rotate, sym_power, Rotation};
pub use state::{fidelity, DensityOperator, LogAmplitude, PureState};

/// Spin quantum number stored as the integer `2j`, so half-integer spins are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinJ {
    twice_j: u32,
}

impl SpinJ {
    pub const fn from_twice(twice_j: u32) -> Self {
        Self { twice_j }
    }

    /// Accepts non-negative multiples of 1/2.
    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !twice.is_finite() || twice < 0.0 || twice.fract() != 0.0 || twice > u32::MAX as f64 {
            return Err(Error::InvalidState(format!("j = {j} is not a non-negative half-integer")));
        }
        Ok(Self { twice_j: twice as u32 })
    }

    pub const fn twice_j(self) -> u32 {
        self.twice_j
    }

    pub fn j(self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    /// Hilbert space dimension `2j + 1`.
    pub const fn dim(self) -> usize {
        self.twice_j as usize + 1
    }

    pub fn is_integer(self) -> bool {
        self.twice_j.is_multiple_of(2)
    }

    /// `2m` for basis index `k`.
    pub fn twice_m(self, k: usize) -> i64 {
        2 * k as i64 - self.twice_j as i64
    }

    /// Magnetic quantum number `m = k - j` of basis index `k`.
    pub fn m(self, k: usize) -> f64 {
        self.twice_m(k) as f64 / 2.0
    }

    /// Matrix element `<k+1| J_+ |k>`.
    pub fn raising_coefficient(self, k: usize) -> f64 {
        let n = self.twice_j as f64;
        let k = k as f64;
        ((n - k) * (k + 1.0)).sqrt()
    }
}

impl fmt::Display for SpinJ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice_j / 2)
        } else {
            write!(f, "{}/2", self.twice_j)
        }
    }
}

/// A point on the unit sphere, polar angle `theta` in `[0, π]` and azimuth `phi` in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    /// `phi` is wrapped into `[0, 2π)`; `theta` must already lie in `[0, π]`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(Error::InvalidDirection { theta, phi });
        }
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub const NORTH: Direction = Direction { theta: 0.0, phi: 0.0 };
    pub const SOUTH: Direction = Direction { theta: PI, phi: 0.0 };

    pub fn theta(self) -> f64 {
        self.theta
    }

    pub fn phi(self) -> f64 {
        self.phi
    }

    /// Direction of a non-zero 3-vector.
    pub fn from_vector(v: [f64; 3]) -> Option<Self> {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !r.is_finite() || r <= 0.0 {
            return None;
        }
        let theta = (v[2] / r).clamp(-1.0, 1.0).acos();
        let phi = v[1].atan2(v[0]);
        Direction::new(theta, phi).ok()
    }

    pub fn to_vector(self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Cosine of the angle between two directions.
    pub fn cos_angle_to(self, other: Direction) -> f64 {
        let c =
            self.theta.cos() * other.theta.cos() + self.theta.sin() * other.theta.sin() * (self.phi - other.phi).cos();
        c.clamp(-1.0, 1.0)
    }
}

/// Angle between two (not necessarily normalized) 3-vectors, in radians.
pub fn angle_between(a: [f64; 3], b: [f64; 3]) -> f64 {
    let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let c = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    let d = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    c.atan2(d)
}
