use crate::spin::{DensityOperator, PureState, Rotation};
use crate::{Error, Result};

/// `H = ω (n·J)` with a unit axis `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecessionSpec {
    axis: [f64; 3],
    omega: f64,
}

impl PrecessionSpec {
    /// Normalizes `axis`; rejects zero or non-finite axes and non-finite `omega`.
    pub fn new(axis: [f64; 3], omega: f64) -> Result<Self> {
        let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 || !omega.is_finite() {
            return Err(Error::InvalidAxis(axis));
        }
        Ok(Self { axis: axis.map(|x| x / norm), omega })
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `U(t) = exp(-iωt n·J)`: a rotation by `ωt` about `n`.
    pub fn rotation(&self, t: f64) -> Rotation {
        Rotation::axis_angle(self.axis, self.omega * t)
    }
}

/// Quantum states the propagator acts on.
pub trait Evolve: Sized {
    fn rotated(&self, r: &Rotation) -> Self;
}

impl Evolve for PureState {
    fn rotated(&self, r: &Rotation) -> Self {
        r.apply_pure(self)
    }
}

impl Evolve for DensityOperator {
    fn rotated(&self, r: &Rotation) -> Self {
        r.apply_density(self)
    }
}

/// Exact Schrödinger evolution for time `t`; no time stepping is involved.
pub fn evolve<S: Evolve>(state: &S, spec: &PrecessionSpec, t: f64) -> S {
    state.rotated(&spec.rotation(t))
}

/// Rodrigues rotation of `v` by `angle` about the unit vector `n`.
pub fn rodrigues(v: [f64; 3], n: [f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    let cross = [n[1] * v[2] - n[2] * v[1], n[2] * v[0] - n[0] * v[2], n[0] * v[1] - n[1] * v[0]];
    let dot = n[0] * v[0] + n[1] * v[1] + n[2] * v[2];
    [0, 1, 2].map(|i| v[i] * c + cross[i] * s + n[i] * dot * (1.0 - c))
}

/// Solution of `dS/dt = ω (n × S)` from `s0` at every time in `times`
/// (time is measured from zero).
pub fn classical_trajectory(s0: [f64; 3], spec: &PrecessionSpec, times: &[f64]) -> Result<Vec<[f64; 3]>> {
    let norm = s0.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("initial classical spin has length {norm}, expected 1")));
    }
    Ok(times.iter().map(|&t| rodrigues(s0, spec.axis, spec.omega * t)).collect())
}
