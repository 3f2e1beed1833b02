use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::SpinJ;
use crate::{Error, Result};

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// A complex number held as `exp(log_magnitude) * e^{i phase}`.
///
/// Coherent-state amplitudes scale like `2^{-j}`, so they are assembled in
/// this form and exponentiated only once the dominant scale is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogAmplitude {
    pub log_magnitude: f64,
    pub phase: f64,
}

impl LogAmplitude {
    pub const ZERO: LogAmplitude = LogAmplitude { log_magnitude: f64::NEG_INFINITY, phase: 0.0 };

    pub fn new(log_magnitude: f64, phase: f64) -> Self {
        Self { log_magnitude, phase }
    }

    pub fn is_zero(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    /// Value scaled by `exp(-shift)`.
    pub fn to_complex_scaled(&self, shift: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar((self.log_magnitude - shift).exp(), self.phase)
    }

    pub fn to_complex(&self) -> Complex64 {
        self.to_complex_scaled(0.0)
    }

    pub fn mul(&self, other: &LogAmplitude) -> LogAmplitude {
        LogAmplitude::new(self.log_magnitude + other.log_magnitude, self.phase + other.phase)
    }
}

/// Normalized pure state of a spin-j system; index `k` holds the amplitude of `m = k - j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    j: SpinJ,
    amplitudes: DVector<Complex64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized to within `1e-12`.
    pub fn new(j: SpinJ, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != j.dim() {
            return Err(Error::DimensionMismatch { expected: j.dim(), found: amplitudes.len() });
        }
        let norm = amplitudes.norm_squared();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm} differs from 1")));
        }
        Ok(Self { j, amplitudes })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(j: SpinJ, mut amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != j.dim() {
            return Err(Error::DimensionMismatch { expected: j.dim(), found: amplitudes.len() });
        }
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        amplitudes.unscale_mut(norm);
        Ok(Self { j, amplitudes })
    }

    pub(crate) fn from_raw(j: SpinJ, amplitudes: DVector<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), j.dim());
        Self { j, amplitudes }
    }

    /// Dicke state with basis index `k` (`m = k - j`).
    pub fn basis(j: SpinJ, k: usize) -> Self {
        let mut amplitudes = DVector::zeros(j.dim());
        amplitudes[k.min(j.dim() - 1)] = Complex64::new(1.0, 0.0);
        Self { j, amplitudes }
    }

    /// `|m = j>`.
    pub fn top(j: SpinJ) -> Self {
        Self::basis(j, j.dim() - 1)
    }

    /// `|m = -j>`.
    pub fn bottom(j: SpinJ) -> Self {
        Self::basis(j, 0)
    }

    pub fn spin(&self) -> SpinJ {
        self.j
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, k: usize) -> Complex64 {
        self.amplitudes[k]
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// Outcome distribution of a `J_z` measurement, indexed like the basis.
    pub fn jz_distribution(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn to_density(&self) -> DensityOperator {
        let matrix = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator { j: self.j, matrix }
    }
}

/// `|<a|b>|^2`.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(super::overlap(a, b)?.norm_sqr())
}

/// Density operator of a spin-j system in the Dicke basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    j: SpinJ,
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(j: SpinJ, matrix: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(j, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Skips the physical checks; the shape is still verified.
    pub fn from_matrix_unchecked(j: SpinJ, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != j.dim() || matrix.ncols() != j.dim() {
            return Err(Error::DimensionMismatch { expected: j.dim(), found: matrix.nrows() });
        }
        Ok(Self { j, matrix })
    }

    pub fn maximally_mixed(j: SpinJ) -> Self {
        let n = j.dim();
        let matrix = DMatrix::from_diagonal_element(n, n, Complex64::new(1.0 / n as f64, 0.0));
        Self { j, matrix }
    }

    /// Convex combination `Σ w_i ρ_i`; weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let j = first.1.j;
        let mut matrix = DMatrix::zeros(j.dim(), j.dim());
        let mut total = 0.0;
        for (w, rho) in parts {
            if rho.j != j {
                return Err(Error::DimensionMismatch { expected: j.dim(), found: rho.j.dim() });
            }
            if *w < 0.0 {
                return Err(Error::InvalidState(format!("negative mixture weight {w}")));
            }
            total += w;
            matrix += rho.matrix.scale(*w);
        }
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("mixture weights sum to {total}")));
        }
        Ok(Self { j, matrix })
    }

    pub fn spin(&self) -> SpinJ {
        self.j
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Diagonal of the matrix: the exact `J_z` outcome distribution.
    pub fn jz_distribution(&self) -> Vec<f64> {
        (0..self.j.dim()).map(|k| self.matrix[(k, k)].re).collect()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.matrix)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = hermitian_part(&self.matrix);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        let dev = self.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `½ Σ |λ_i|` over the eigenvalues of `self - other`.
    pub fn trace_distance(&self, other: &DensityOperator) -> Result<f64> {
        if self.j != other.j {
            return Err(Error::DimensionMismatch { expected: self.j.dim(), found: other.j.dim() });
        }
        let diff = hermitian_part(&(&self.matrix - &other.matrix));
        Ok(0.5 * diff.symmetric_eigenvalues().iter().map(|l| l.abs()).sum::<f64>())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DensityOperator) -> f64 {
        (&self.matrix - &other.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for r in 0..n {
        for c in r..n {
            dev = dev.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()).scale(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_amplitude_round_trip() {
        let a = LogAmplitude::new(-2000.0, 0.3);
        assert_eq!(a.to_complex(), Complex64::new(0.0, 0.0));
        let z = a.to_complex_scaled(-2000.0);
        assert!((z - Complex64::from_polar(1.0, 0.3)).norm() < 1e-15);
        assert!(LogAmplitude::ZERO.is_zero());
        assert_eq!(LogAmplitude::ZERO.to_complex_scaled(-1e5), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn rejects_unnormalized_and_mismatched() {
        let j = SpinJ::from_twice(2);
        let v = DVector::from_element(3, Complex64::new(1.0, 0.0));
        assert!(PureState::new(j, v.clone()).is_err());
        assert!(PureState::normalized(j, v).is_ok());
        let bad = DVector::from_element(2, Complex64::new(1.0, 0.0));
        assert!(matches!(PureState::new(j, bad), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn density_validation() {
        let j = SpinJ::from_twice(1);
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.5, 0.0);
        m[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(DensityOperator::new(j, m).is_err());
        let rho = DensityOperator::maximally_mixed(j);
        assert!(rho.validate().is_ok());
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states_is_one() {
        let j = SpinJ::from_twice(4);
        let a = PureState::top(j).to_density();
        let b = PureState::bottom(j).to_density();
        assert!((a.trace_distance(&b).unwrap() - 1.0).abs() < 1e-12);
        assert!(a.trace_distance(&a).unwrap() < 1e-14);
    }
}
