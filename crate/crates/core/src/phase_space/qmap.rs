use std::f64::consts::PI;
use std::io::{self, BufRead, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::grid::SphereGrid;
use crate::csv::{fmt_f64, row};
use crate::spin::{CoherentKernel, DensityOperator, PureState, SpinJ};
use crate::{Error, Result};

pub const MAP_CSV_HEADER: &str = "theta,phi,weight,value";

/// A real function sampled at the nodes of a [`SphereGrid`].
pub trait SphereMap {
    fn grid(&self) -> &SphereGrid;
    fn values(&self) -> &[f64];
    fn spin(&self) -> SpinJ;

    fn integral(&self) -> f64 {
        self.grid().integrate(self.values())
    }

    fn min_value(&self) -> f64 {
        self.values().iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn max_value(&self) -> f64 {
        self.values().iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Writes `theta,phi,weight,value` rows in node order.
    fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()>
    where
        Self: Sized,
    {
        writeln!(out, "{MAP_CSV_HEADER}")?;
        for (node, v) in self.grid().nodes().zip(self.values()) {
            let fields = [node.dir.theta(), node.dir.phi(), node.weight, *v].map(fmt_f64);
            writeln!(out, "{}", row(&fields))?;
        }
        Ok(())
    }
}

/// Husimi Q function `(2j+1)/(4π) <Ω|ρ|Ω>` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QMap {
    grid: SphereGrid,
    values: Vec<f64>,
    j: SpinJ,
}

impl SphereMap for QMap {
    fn grid(&self) -> &SphereGrid {
        &self.grid
    }
    fn values(&self) -> &[f64] {
        &self.values
    }
    fn spin(&self) -> SpinJ {
        self.j
    }
}

impl QMap {
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// States whose Q function can be sampled.
pub trait QSource {
    fn spin(&self) -> SpinJ;
    /// `(2j+1)/(4π) <Ω|·|Ω>` at every grid node.
    fn q_values(&self, grid: &SphereGrid) -> Vec<f64>;
}

impl QSource for PureState {
    fn spin(&self) -> SpinJ {
        PureState::spin(self)
    }

    fn q_values(&self, grid: &SphereGrid) -> Vec<f64> {
        pure_q_values(self.spin(), self.amplitudes().as_slice(), grid)
    }
}

impl QSource for DensityOperator {
    fn spin(&self) -> SpinJ {
        DensityOperator::spin(self)
    }

    fn q_values(&self, grid: &SphereGrid) -> Vec<f64> {
        matrix_q_values(self.spin(), self.matrix(), grid)
    }
}

/// Samples the Q function of `state`.
///
/// Grids that are not exact to degree `2j` still give correct node values but
/// no longer integrate Q to one; a warning is logged.
pub fn q_function<S: QSource + ?Sized>(state: &S, grid: &SphereGrid) -> QMap {
    let j = state.spin();
    let need = j.twice_j() as usize;
    if grid.exact_degree() < need {
        log::warn!(
            "grid exact to degree {} but Q of spin {} has degree {}; normalization is approximate",
            grid.exact_degree(),
            j,
            need
        );
    }
    QMap { grid: grid.clone(), values: state.q_values(grid), j }
}

/// `(2j+1)/(4π) |<Ω|ψ>|²` row by row.
///
/// On a ring of fixed θ, `<Ω|ψ> = e^{-ijφ} Σ_k c_k ψ_k e^{ikφ}` with real
/// `c_k`, so all azimuths come from one inverse FFT with `k` folded modulo
/// `n_phi`.
pub(crate) fn pure_q_values(j: SpinJ, amps: &[Complex64], grid: &SphereGrid) -> Vec<f64> {
    let kernel = CoherentKernel::new(j);
    let n_phi = grid.n_phi();
    let fft = FftPlanner::new().plan_fft_inverse(n_phi);
    let prefactor = j.dim() as f64 / (4.0 * PI);
    let rows: Vec<Vec<f64>> = grid
        .rows()
        .par_iter()
        .map(|r| {
            let mags = kernel.magnitudes(r.theta);
            let mut buf = vec![Complex64::new(0.0, 0.0); n_phi];
            for (k, (c, a)) in mags.iter().zip(amps).enumerate() {
                buf[k % n_phi] += a * c;
            }
            fft.process(&mut buf);
            buf.iter().map(|f| prefactor * f.norm_sqr()).collect()
        })
        .collect();
    rows.concat()
}

/// `(2j+1)/(4π) Re <Ω|M|Ω>` for an arbitrary square matrix.
///
/// Entries are grouped by diagonal offset `d = r - c`, which carries the
/// azimuthal factor `e^{idφ}`; each ring is then one inverse FFT.
pub(crate) fn matrix_q_values(j: SpinJ, m: &DMatrix<Complex64>, grid: &SphereGrid) -> Vec<f64> {
    let kernel = CoherentKernel::new(j);
    let dim = j.dim();
    let n_phi = grid.n_phi();
    let fft = FftPlanner::new().plan_fft_inverse(n_phi);
    let prefactor = dim as f64 / (4.0 * PI);
    let rows: Vec<Vec<f64>> = grid
        .rows()
        .par_iter()
        .map(|r| {
            let mags = kernel.magnitudes(r.theta);
            let mut buf = vec![Complex64::new(0.0, 0.0); n_phi];
            for c in 0..dim {
                if mags[c] == 0.0 {
                    continue;
                }
                for rr in 0..dim {
                    let d = (rr as i64 - c as i64).rem_euclid(n_phi as i64) as usize;
                    buf[d] += m[(rr, c)] * (mags[rr] * mags[c]);
                }
            }
            fft.process(&mut buf);
            buf.iter().map(|f| prefactor * f.re).collect()
        })
        .collect();
    rows.concat()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Quadrature of `|a - b|`.
    L1,
    /// Largest node-wise `|a - b|`.
    Sup,
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" | "L1" => Ok(Metric::L1),
            "sup" | "Sup" | "linf" => Ok(Metric::Sup),
            other => Err(Error::Config(format!("unknown metric '{other}' (expected l1 or sup)"))),
        }
    }
}

/// Distance between two maps on the same grid.
pub fn q_distance(a: &QMap, b: &QMap, metric: Metric) -> Result<f64> {
    map_distance(a, b, metric)
}

pub fn map_distance<A: SphereMap, B: SphereMap>(a: &A, b: &B, metric: Metric) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let diff: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).collect();
    Ok(match metric {
        Metric::L1 => a.grid().integrate(&diff),
        Metric::Sup => diff.iter().copied().fold(0.0, f64::max),
    })
}

/// One row of a map CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapSample {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
    pub value: f64,
}

/// Reads a `theta,phi,weight,value` CSV as written by [`SphereMap::write_csv`].
///
/// Angles must lie in `[0, π] x [0, 2π)`, weights must be finite and
/// non-negative, values finite.
pub fn parse_map_csv<R: BufRead>(input: R) -> Result<Vec<MapSample>> {
    let mut lines = input.lines().enumerate();
    let io_err = |line: usize, e: io::Error| Error::MapCsv { line, message: e.to_string() };
    match lines.next() {
        Some((_, Ok(h))) if h.trim_end() == MAP_CSV_HEADER => {}
        Some((_, Ok(h))) => {
            return Err(Error::MapCsv { line: 1, message: format!("expected header '{MAP_CSV_HEADER}', got '{h}'") })
        }
        Some((_, Err(e))) => return Err(io_err(1, e)),
        None => return Err(Error::MapCsv { line: 1, message: "empty input".into() }),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.map_err(|e| io_err(lineno, e))?;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::MapCsv { line: lineno, message: format!("expected 4 fields, got {}", fields.len()) });
        }
        let mut nums = [0.0; 4];
        for (n, f) in nums.iter_mut().zip(&fields) {
            *n = f.trim().parse::<f64>().map_err(|e| Error::MapCsv { line: lineno, message: format!("'{f}': {e}") })?;
            if !n.is_finite() {
                return Err(Error::MapCsv { line: lineno, message: format!("non-finite field '{f}'") });
            }
        }
        let [theta, phi, weight, value] = nums;
        if !(0.0..=PI).contains(&theta) || !(0.0..std::f64::consts::TAU).contains(&phi) {
            return Err(Error::MapCsv { line: lineno, message: format!("angles out of range: ({theta}, {phi})") });
        }
        if weight < 0.0 {
            return Err(Error::MapCsv { line: lineno, message: format!("negative weight {weight}") });
        }
        out.push(MapSample { theta, phi, weight, value });
    }
    Ok(out)
}
