use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::hermitian_deviation;
use super::{DensityOperator, Direction, PureState, SpinJ};
use crate::{Error, Result};

/// Dense operator on a spin-j space. Observables are Hermitian; ladder operators are not.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperator {
    j: SpinJ,
    matrix: DMatrix<Complex64>,
    hermitian: bool,
}

impl SpinOperator {
    /// Wraps a matrix, recording whether it is Hermitian to within `1e-12`.
    pub fn new(j: SpinJ, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != j.dim() || matrix.ncols() != j.dim() {
            return Err(Error::DimensionMismatch { expected: j.dim(), found: matrix.nrows() });
        }
        let hermitian = hermitian_deviation(&matrix) <= 1e-12;
        Ok(Self { j, matrix, hermitian })
    }

    pub fn spin(&self) -> SpinJ {
        self.j
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn jz_operator(j: SpinJ) -> SpinOperator {
    let n = j.dim();
    let matrix = DMatrix::from_fn(n, n, |r, col| if r == col { c(j.m(r)) } else { c(0.0) });
    SpinOperator { j, matrix, hermitian: true }
}

pub fn raising_operator(j: SpinJ) -> SpinOperator {
    let n = j.dim();
    let mut matrix = DMatrix::zeros(n, n);
    for k in 0..n - 1 {
        matrix[(k + 1, k)] = c(j.raising_coefficient(k));
    }
    SpinOperator { j, matrix, hermitian: n == 1 }
}

pub fn lowering_operator(j: SpinJ) -> SpinOperator {
    let raising = raising_operator(j);
    SpinOperator { j, matrix: raising.matrix.transpose(), hermitian: raising.hermitian }
}

/// `(J_+ + J_-) / 2`.
pub fn jx_operator(j: SpinJ) -> SpinOperator {
    let up = raising_operator(j).matrix;
    let matrix = (&up + up.transpose()).scale(0.5);
    SpinOperator { j, matrix, hermitian: true }
}

/// `(J_+ - J_-) / 2i`.
pub fn jy_operator(j: SpinJ) -> SpinOperator {
    let up = raising_operator(j).matrix;
    let matrix = (&up - up.transpose()) * Complex64::new(0.0, -0.5);
    SpinOperator { j, matrix, hermitian: true }
}

/// `J_Ω = sinθ cosφ J_x + sinθ sinφ J_y + cosθ J_z`.
pub fn j_omega_operator(j: SpinJ, dir: Direction) -> SpinOperator {
    let [nx, ny, nz] = dir.to_vector();
    let n = j.dim();
    let mut matrix = DMatrix::zeros(n, n);
    for k in 0..n {
        matrix[(k, k)] = c(nz * j.m(k));
        if k + 1 < n {
            // <k+1|J_x + i... |k>: J_x contributes l/2, J_y contributes -i l/2
            let l = 0.5 * j.raising_coefficient(k);
            let below = Complex64::new(nx * l, -ny * l);
            matrix[(k + 1, k)] = below;
            matrix[(k, k + 1)] = below.conj();
        }
    }
    SpinOperator { j, matrix, hermitian: true }
}

/// `Tr(ρ A)` for a Hermitian observable `A`.
pub fn expectation(rho: &DensityOperator, op: &SpinOperator) -> Result<f64> {
    if rho.spin() != op.spin() {
        return Err(Error::DimensionMismatch { expected: rho.spin().dim(), found: op.spin().dim() });
    }
    if !op.hermitian {
        return Err(Error::NotHermitian { deviation: hermitian_deviation(&op.matrix) });
    }
    let r = rho.matrix();
    let a = &op.matrix;
    let n = r.nrows();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            total += r[(i, k)] * a[(k, i)];
        }
    }
    if total.im.abs() > 1e-10 {
        return Err(Error::ComplexExpectation(total.im));
    }
    Ok(total.re)
}

/// `(<J_x>, <J_y>, <J_z>)` without materializing the operators.
pub fn mean_spin(rho: &DensityOperator) -> [f64; 3] {
    let j = rho.spin();
    let r = rho.matrix();
    let n = j.dim();
    let mut jz = 0.0;
    let mut jplus = Complex64::new(0.0, 0.0);
    for k in 0..n {
        jz += j.m(k) * r[(k, k)].re;
        if k + 1 < n {
            // Tr(ρ J_+) = Σ_k ρ_{k,k+1} <k+1|J_+|k>
            jplus += r[(k, k + 1)] * j.raising_coefficient(k);
        }
    }
    [jplus.re, jplus.im, jz]
}

/// [`mean_spin`] for a pure state, `O(dim)`.
pub fn mean_spin_pure(psi: &PureState) -> [f64; 3] {
    let j = psi.spin();
    let a = psi.amplitudes();
    let n = j.dim();
    let mut jz = 0.0;
    let mut jplus = Complex64::new(0.0, 0.0);
    for k in 0..n {
        jz += j.m(k) * a[k].norm_sqr();
        if k + 1 < n {
            jplus += a[k + 1].conj() * a[k] * j.raising_coefficient(k);
        }
    }
    [jplus.re, jplus.im, jz]
}
