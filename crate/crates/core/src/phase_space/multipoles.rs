use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::spin::{DensityOperator, SpinJ};

/// Spherical tensor operators `T_LM` of a spin-j system, `L = 0..=2j`.
///
/// `T_LM` is real and lives on a single diagonal: `<m + M| T_LM |m>` is its only
/// nonzero family. They are orthonormal under `Tr(A† B)` and follow the usual
/// Condon-Shortley convention `T_{L,-M} = (-1)^M T_LM†`.
///
/// On diagonal `M` the entries of `T_LM` are a fixed weight times a polynomial
/// of degree `L - M` in `m`, so for each `M` the family is the Lanczos sequence
/// of "multiply by m" started from `T_MM ∝ (-1)^M J_+^M`. Full
/// reorthogonalization keeps it orthonormal to rounding; the commutator ladder
/// `[J_-, T_LM] ∝ T_{L,M-1}` loses about one digit per few ranks instead.
/// Signs follow from `<j| T_LM |j - M>` having sign `(-1)^M` for every `L`.
#[derive(Debug, Clone)]
pub struct TensorBasis {
    j: SpinJ,
    /// `diags[L][M][c] = <c + M| T_LM |c>` for `M >= 0`.
    diags: Vec<Vec<Vec<f64>>>,
}

impl TensorBasis {
    pub fn new(j: SpinJ) -> Self {
        let dim = j.dim();
        let ln_lp: Vec<f64> = (0..dim).map(|k| j.raising_coefficient(k).ln()).collect();
        let mut diags: Vec<Vec<Vec<f64>>> = (0..dim).map(|l| vec![Vec::new(); l + 1]).collect();
        for m in 0..dim {
            let n = dim - m;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            // products of l+ run to ~ (2j)!, so start in log space
            let logs: Vec<f64> = (0..n).map(|c| ln_lp[c..c + m].iter().sum()).collect();
            let shift = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut first: Vec<f64> = logs.iter().map(|x| (x - shift).exp()).collect();
            normalize(&mut first);
            first.iter_mut().for_each(|x| *x *= sign);
            let centre = 0.5 * (n as f64 - 1.0);
            let mut family: Vec<Vec<f64>> = vec![first];
            while family.len() < n {
                let last = family.last().expect("non-empty");
                let mut w: Vec<f64> = last.iter().enumerate().map(|(c, v)| (c as f64 - centre) * v).collect();
                for _ in 0..2 {
                    for q in &family {
                        let dot: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
                        w.iter_mut().zip(q).for_each(|(x, y)| *x -= dot * y);
                    }
                }
                normalize(&mut w);
                if w[n - 1] * sign < 0.0 {
                    w.iter_mut().for_each(|x| *x = -*x);
                }
                family.push(w);
            }
            for (i, v) in family.into_iter().enumerate() {
                diags[m + i][m] = v;
            }
        }
        Self { j, diags }
    }

    pub fn spin(&self) -> SpinJ {
        self.j
    }

    /// Entries `<c + M| T_LM |c>`, `M >= 0`.
    pub fn diagonal(&self, l: usize, m: usize) -> &[f64] {
        &self.diags[l][m]
    }

    /// `<j| T_L0 |j>`, the weight of `T_L0` on the top basis state.
    pub fn top_entry(&self, l: usize) -> f64 {
        *self.diags[l][0].last().expect("non-empty")
    }

    pub fn matrix(&self, l: usize, m: i64) -> DMatrix<Complex64> {
        let dim = self.j.dim();
        let am = m.unsigned_abs() as usize;
        let d = &self.diags[l][am];
        let mut out = DMatrix::zeros(dim, dim);
        for (c, &v) in d.iter().enumerate() {
            if m >= 0 {
                out[(c + am, c)] = Complex64::new(v, 0.0);
            } else {
                let s = if am.is_multiple_of(2) { 1.0 } else { -1.0 };
                out[(c, c + am)] = Complex64::new(s * v, 0.0);
            }
        }
        out
    }

    /// `ρ_LM = Tr(ρ T_LM†)` for every `(L, M)`.
    pub fn multipoles(&self, rho: &DMatrix<Complex64>) -> MultipoleCoeffs {
        let dim = self.j.dim();
        let coeffs = (0..dim)
            .map(|l| {
                (-(l as i64)..=l as i64)
                    .map(|m| {
                        let am = m.unsigned_abs() as usize;
                        let d = &self.diags[l][am];
                        if m >= 0 {
                            d.iter().enumerate().map(|(c, &v)| rho[(c + am, c)] * v).sum()
                        } else {
                            let s = if am.is_multiple_of(2) { 1.0 } else { -1.0 };
                            d.iter().enumerate().map(|(c, &v)| rho[(c, c + am)] * v).sum::<Complex64>() * s
                        }
                    })
                    .collect()
            })
            .collect();
        MultipoleCoeffs { j: self.j, coeffs }
    }

    /// `Σ ρ_LM T_LM`.
    pub fn reconstruct(&self, coeffs: &MultipoleCoeffs) -> DMatrix<Complex64> {
        let dim = self.j.dim();
        let mut out = DMatrix::zeros(dim, dim);
        for l in 0..dim {
            for m in -(l as i64)..=l as i64 {
                let w = coeffs.get(l, m);
                let am = m.unsigned_abs() as usize;
                for (c, &v) in self.diags[l][am].iter().enumerate() {
                    if m >= 0 {
                        out[(c + am, c)] += w * v;
                    } else {
                        let s = if am.is_multiple_of(2) { 1.0 } else { -1.0 };
                        out[(c, c + am)] += w * (s * v);
                    }
                }
            }
        }
        out
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

/// Dense `T_LM` for one `(L, M)`.
pub fn tensor_operator(j: SpinJ, l: usize, m: i64) -> DMatrix<Complex64> {
    TensorBasis::new(j).matrix(l, m)
}

/// State multipoles `ρ_LM`, `L = 0..=2j`, `M = -L..=L`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipoleCoeffs {
    j: SpinJ,
    /// `coeffs[L][M + L]`
    coeffs: Vec<Vec<Complex64>>,
}

impl MultipoleCoeffs {
    pub fn spin(&self) -> SpinJ {
        self.j
    }

    pub fn l_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        self.coeffs[l][(m + l as i64) as usize]
    }

    /// Rebuilds the operator `Σ ρ_LM T_LM`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        TensorBasis::new(self.j).reconstruct(self)
    }
}

pub fn state_multipoles(rho: &DensityOperator) -> MultipoleCoeffs {
    TensorBasis::new(rho.spin()).multipoles(rho.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_density;
    use crate::spin::{jz_operator, raising_operator, PureState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::function::gamma::ln_gamma;

    fn ln_fact(n: i64) -> f64 {
        ln_gamma(n as f64 + 1.0)
    }

    /// Clebsch-Gordan `<j1 m1; j2 m2 | J M>` from Racah's closed sum; arguments doubled.
    fn clebsch_gordan(tj1: i64, tm1: i64, tj2: i64, tm2: i64, tj: i64, tm: i64) -> f64 {
        if tm1 + tm2 != tm {
            return 0.0;
        }
        let h = |x: i64| {
            assert!(x % 2 == 0);
            x / 2
        };
        let (a, b, c) = (h(tj1 + tj2 - tj), h(tj1 - tj2 + tj), h(-tj1 + tj2 + tj));
        if a < 0 || b < 0 || c < 0 {
            return 0.0;
        }
        let pre = 0.5 * ((tj + 1) as f64).ln()
            + 0.5 * (ln_fact(a) + ln_fact(b) + ln_fact(c) - ln_fact(h(tj1 + tj2 + tj) + 1))
            + 0.5
                * (ln_fact(h(tj + tm))
                    + ln_fact(h(tj - tm))
                    + ln_fact(h(tj1 - tm1))
                    + ln_fact(h(tj1 + tm1))
                    + ln_fact(h(tj2 - tm2))
                    + ln_fact(h(tj2 + tm2)));
        let mut sum = 0.0;
        for k in 0..=200 {
            let den = [k, a - k, h(tj1 - tm1) - k, h(tj2 + tm2) - k, h(tj - tj2 + tm1) + k, h(tj - tj1 - tm2) + k];
            if den.iter().any(|&x| x < 0) {
                continue;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * (pre - den.iter().map(|&x| ln_fact(x)).sum::<f64>()).exp();
        }
        sum
    }

    /// `<j m'| T_LM |j m> = (-1)^{j-m} <j m'; j -m | L M>`, the coupled-basis definition.
    fn cg_tensor(j: SpinJ, l: usize, m: i64) -> DMatrix<f64> {
        let dim = j.dim();
        let tj = j.twice_j() as i64;
        DMatrix::from_fn(dim, dim, |r, c| {
            let (tmr, tmc) = (j.twice_m(r), j.twice_m(c));
            let phase = if ((tj - tmc) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            phase * clebsch_gordan(tj, tmr, tj, -tmc, 2 * l as i64, 2 * m)
        })
    }

    #[test]
    fn matches_clebsch_gordan_construction() {
        for twice in [1u32, 2, 3, 6, 9] {
            let j = SpinJ::from_twice(twice);
            let basis = TensorBasis::new(j);
            for l in 0..j.dim() {
                for m in -(l as i64)..=l as i64 {
                    let ours = basis.matrix(l, m);
                    let theirs = cg_tensor(j, l, m);
                    let err =
                        ours.iter().zip(theirs.iter()).map(|(a, b)| (a.re - b).abs() + a.im.abs()).fold(0.0, f64::max);
                    assert!(err < 1e-12, "2j={twice} L={l} M={m} err={err}");
                }
            }
        }
    }

    #[test]
    fn low_rank_tensors_are_spin_operators() {
        let j = SpinJ::from_twice(7);
        let basis = TensorBasis::new(j);
        let jz = jz_operator(j).matrix().clone();
        let norm = jz.norm();
        assert!((basis.matrix(1, 0) - jz.unscale(norm)).norm() < 1e-13);
        let jp = raising_operator(j).matrix().clone();
        assert!((basis.matrix(1, 1) + jp.unscale(jp.norm())).norm() < 1e-13);
    }

    #[test]
    fn lowering_ladder_holds() {
        let j = SpinJ::from_twice(30);
        let basis = TensorBasis::new(j);
        let jm = crate::spin::lowering_operator(j).matrix().clone();
        for l in [1usize, 9, 22, 30] {
            for m in 1..=l as i64 {
                let t = basis.matrix(l, m);
                let comm = &jm * &t - &t * &jm;
                let want =
                    basis.matrix(l, m - 1) * Complex64::from(((l as i64 + m) * (l as i64 - m + 1)) as f64).sqrt();
                let err = (comm - want).iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(err < 1e-10, "L={l} M={m} err={err:e}");
            }
        }
    }

    #[test]
    fn orthonormal_up_to_2j_80() {
        let j = SpinJ::from_twice(80);
        let basis = TensorBasis::new(j);
        for l in 0..j.dim() {
            for m in 0..=l {
                let d = basis.diagonal(l, m);
                let n: f64 = d.iter().map(|x| x * x).sum();
                assert!((n - 1.0).abs() < 1e-12, "L={l} M={m} norm={n}");
            }
        }
        // same-diagonal cross terms between different ranks
        let mut worst = 0.0f64;
        for m in [0usize, 3, 17] {
            for l1 in m..j.dim() {
                for l2 in l1 + 1..j.dim() {
                    let dot: f64 = basis.diagonal(l1, m).iter().zip(basis.diagonal(l2, m)).map(|(a, b)| a * b).sum();
                    worst = worst.max(dot.abs());
                }
            }
        }
        assert!(worst < 1e-12, "worst overlap {worst:e}");
    }

    #[test]
    fn maximally_mixed_has_only_monopole() {
        let j = SpinJ::from_twice(6);
        let c = state_multipoles(&DensityOperator::maximally_mixed(j));
        for l in 0..j.dim() {
            for m in -(l as i64)..=l as i64 {
                let v = c.get(l, m);
                if l == 0 {
                    assert!((v.re - (j.dim() as f64).sqrt().recip()).abs() < 1e-14);
                } else {
                    assert!(v.norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn top_state_is_axial() {
        let j = SpinJ::from_twice(11);
        let c = state_multipoles(&PureState::top(j).to_density());
        for l in 0..j.dim() {
            for m in -(l as i64)..=l as i64 {
                if m != 0 {
                    assert!(c.get(l, m).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn round_trip_and_hermitian_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for twice in [1u32, 4, 11, 20] {
            let j = SpinJ::from_twice(twice);
            let rho = random_density(j, 2, &mut rng);
            let c = state_multipoles(&rho);
            let back = c.reconstruct();
            assert!((back - rho.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-10, "2j={twice}");
            for l in 0..j.dim() {
                for m in 1..=l as i64 {
                    let s = if m % 2 == 0 { 1.0 } else { -1.0 };
                    assert!((c.get(l, -m) - c.get(l, m).conj() * s).norm() < 1e-13);
                }
            }
        }
    }
}
