use std::f64::consts::PI;

use num_complex::Complex64;

/// Orthonormal associated Legendre functions `P̄_L^M(x)` for `0 <= M <= L <= l_max`,
/// Condon-Shortley phase included, so `Y_LM(θ, φ) = P̄_L^M(cos θ) e^{iMφ}`.
///
/// Returned as `table[L][M]`.
pub fn legendre_table(l_max: usize, x: f64) -> Vec<Vec<f64>> {
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut t: Vec<Vec<f64>> = (0..=l_max).map(|l| vec![0.0; l + 1]).collect();
    t[0][0] = (4.0 * PI).sqrt().recip();
    for m in 1..=l_max {
        let mf = m as f64;
        t[m][m] = -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * t[m - 1][m - 1];
    }
    for m in 0..l_max {
        t[m + 1][m] = (2.0 * m as f64 + 3.0).sqrt() * x * t[m][m];
        for l in m + 2..=l_max {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            t[l][m] = a * (x * t[l - 1][m] - b * t[l - 2][m]);
        }
    }
    t
}

/// `Y_LM(θ, φ)` for a single `(L, M)`, any sign of `M`.
pub fn spherical_harmonic(l: usize, m: i64, theta: f64, phi: f64) -> Complex64 {
    let am = m.unsigned_abs() as usize;
    assert!(am <= l, "|M| must not exceed L");
    let p = legendre_table(l, theta.cos())[l][am];
    let y = Complex64::from_polar(p, am as f64 * phi);
    if m >= 0 {
        y
    } else if am.is_multiple_of(2) {
        y.conj()
    } else {
        -y.conj()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::build_grid;

    #[test]
    fn low_order_closed_forms() {
        let (theta, phi) = (0.7f64, 1.9f64);
        let (c, s) = (theta.cos(), theta.sin());
        let y10 = (3.0 / (4.0 * PI)).sqrt() * c;
        let y11 = -(3.0 / (8.0 * PI)).sqrt() * s * Complex64::from_polar(1.0, phi);
        let y20 = (5.0 / (16.0 * PI)).sqrt() * (3.0 * c * c - 1.0);
        let y22 = 0.25 * (15.0 / (2.0 * PI)).sqrt() * s * s * Complex64::from_polar(1.0, 2.0 * phi);
        assert!((spherical_harmonic(1, 0, theta, phi) - y10).norm() < 1e-15);
        assert!((spherical_harmonic(1, 1, theta, phi) - y11).norm() < 1e-15);
        assert!((spherical_harmonic(1, -1, theta, phi) + y11.conj()).norm() < 1e-15);
        assert!((spherical_harmonic(2, 0, theta, phi) - y20).norm() < 1e-15);
        assert!((spherical_harmonic(2, 2, theta, phi) - y22).norm() < 1e-15);
    }

    #[test]
    fn orthonormal_on_exact_grid() {
        let l_max = 12;
        let grid = build_grid(2 * l_max);
        let pairs = [(0usize, 0i64), (3, 2), (3, -2), (7, 5), (12, -12), (12, 11)];
        for &(l1, m1) in &pairs {
            for &(l2, m2) in &pairs {
                let mut acc = Complex64::new(0.0, 0.0);
                for node in grid.nodes() {
                    let (t, p) = (node.dir.theta(), node.dir.phi());
                    acc += spherical_harmonic(l1, m1, t, p).conj() * spherical_harmonic(l2, m2, t, p) * node.weight;
                }
                let want = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
                assert!((acc - want).norm() < 1e-12, "({l1},{m1}) ({l2},{m2}): {acc}");
            }
        }
    }
}
