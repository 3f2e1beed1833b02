use nalgebra::DVector;
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use super::{Direction, LogAmplitude, PureState, SpinJ};
use crate::{Error, Result};

/// `ln C(n, k)` for `k = 0..=n`.
pub fn log_binomial_table(n: u32) -> Vec<f64> {
    let ln_n_fact = ln_gamma(n as f64 + 1.0);
    (0..=n)
        .map(
            |k| {
                if k == 0 || k == n {
                    0.0
                } else {
                    ln_n_fact - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
                }
            },
        )
        .collect()
}

/// `count * ln_base`, with `0 * ln 0 = 0`.
fn log_power(count: u32, ln_base: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * ln_base
    }
}

/// Precomputed log-binomials for repeated coherent-state evaluation at a fixed `j`.
///
/// The amplitude of `|m>` in `|θ, φ>` is
/// `C(2j, j+m)^{1/2} cos^{j+m}(θ/2) sin^{j-m}(θ/2) e^{-imφ}`.
#[derive(Debug, Clone)]
pub struct CoherentKernel {
    j: SpinJ,
    half_log_binom: Vec<f64>,
}

impl CoherentKernel {
    pub fn new(j: SpinJ) -> Self {
        let half_log_binom = log_binomial_table(j.twice_j()).into_iter().map(|l| 0.5 * l).collect();
        Self { j, half_log_binom }
    }

    pub fn spin(&self) -> SpinJ {
        self.j
    }

    /// Log-magnitudes `ln |<m|θ,φ>|`, `-inf` where the amplitude vanishes exactly.
    pub fn log_magnitudes(&self, theta: f64) -> Vec<f64> {
        let n = self.j.twice_j();
        let half = 0.5 * theta;
        let ln_cos = if theta >= std::f64::consts::PI { f64::NEG_INFINITY } else { half.cos().ln() };
        let ln_sin = if theta <= 0.0 { f64::NEG_INFINITY } else { half.sin().ln() };
        (0..=n)
            .map(|k| {
                let a = log_power(k, ln_cos);
                let b = log_power(n - k, ln_sin);
                self.half_log_binom[k as usize] + a + b
            })
            .collect()
    }

    /// Amplitude moduli at polar angle `theta`, renormalized so their squares sum to one.
    pub fn magnitudes_into(&self, theta: f64, out: &mut [f64]) {
        let logs = self.log_magnitudes(theta);
        let shift = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for (o, l) in out.iter_mut().zip(&logs) {
            *o = (l - shift).exp();
            total += *o * *o;
        }
        let scale = total.sqrt().recip();
        for o in out.iter_mut() {
            *o *= scale;
        }
    }

    pub fn magnitudes(&self, theta: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.j.dim()];
        self.magnitudes_into(theta, &mut out);
        out
    }

    pub fn log_amplitudes(&self, dir: Direction) -> Vec<LogAmplitude> {
        self.log_magnitudes(dir.theta())
            .into_iter()
            .enumerate()
            .map(|(k, l)| LogAmplitude::new(l, -self.j.m(k) * dir.phi()))
            .collect()
    }

    pub fn state(&self, dir: Direction) -> PureState {
        let mags = self.magnitudes(dir.theta());
        let phi = dir.phi();
        let amps = DVector::from_iterator(
            self.j.dim(),
            mags.iter().enumerate().map(|(k, &r)| {
                if r == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::from_polar(r, -self.j.m(k) * phi)
                }
            }),
        );
        PureState::from_raw(self.j, amps)
    }
}

/// Spin coherent state `|Ω>`, the `J_Ω` eigenstate of eigenvalue `j`.
///
/// Amplitudes are assembled in log space so `2j` in the tens of thousands does
/// not underflow.
pub fn coherent_state(j: SpinJ, dir: Direction) -> PureState {
    CoherentKernel::new(j).state(dir)
}

/// `<a|b>`.
pub fn overlap(a: &PureState, b: &PureState) -> Result<Complex64> {
    if a.spin() != b.spin() {
        return Err(Error::DimensionMismatch { expected: a.spin().dim(), found: b.spin().dim() });
    }
    Ok(a.amplitudes().dotc(b.amplitudes()))
}
