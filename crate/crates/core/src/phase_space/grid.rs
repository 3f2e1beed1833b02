use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use crate::spin::Direction;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
///
/// Newton iteration on the three-term Legendre recurrence from the usual
/// cosine initial guess; accurate to a few ulps for `n` in the thousands.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            deriv = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, dp) = legendre_with_derivative(n, x);
                deriv = dp;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        // descending from +1 at i = 0; store ascending
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// One ring of constant polar angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub cos_theta: f64,
    pub theta: f64,
    /// Quadrature weight in `cos θ`; node weight is this times `2π / n_phi`.
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridNode {
    pub dir: Direction,
    pub weight: f64,
}

#[derive(Debug, PartialEq)]
struct GridData {
    rows: Vec<GridRow>,
    n_phi: usize,
    exact_degree: usize,
}

/// Product quadrature on the unit sphere: rows in `cos θ` times a uniform
/// azimuthal rule. Weights sum to `4π`.
///
/// Nodes are ordered row-major (polar ring outer, azimuth inner). Cloning is
/// cheap; maps sampled on clones of one grid compare as compatible.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    data: Arc<GridData>,
}

impl PartialEq for SphereGrid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.data, &other.data) || self.data == other.data
    }
}

/// Gauss-Legendre x uniform-azimuth grid exact for spherical harmonics up to `l_max`.
///
/// Uses `l_max + 1` nodes in both `cos θ` and `φ`.
pub fn build_grid(l_max: usize) -> SphereGrid {
    SphereGrid::gauss_legendre(l_max + 1, l_max + 1)
}

impl SphereGrid {
    pub fn gauss_legendre(n_theta: usize, n_phi: usize) -> Self {
        let n_theta = n_theta.max(1);
        let n_phi = n_phi.max(1);
        let (x, w) = gauss_legendre(n_theta);
        let rows = x
            .into_iter()
            .zip(w)
            .map(|(c, w)| GridRow { cos_theta: c, theta: c.clamp(-1.0, 1.0).acos(), weight: w })
            .collect();
        let exact_degree = (2 * n_theta - 1).min(n_phi - 1);
        Self { data: Arc::new(GridData { rows, n_phi, exact_degree }) }
    }

    /// Composite grid with `per_band` Gauss-Legendre rows inside each interval
    /// `[edges[i], edges[i+1]]` of `cos θ`. No row lies on an edge, so every
    /// node belongs to exactly one band.
    pub fn banded(edges: &[f64], per_band: usize, n_phi: usize) -> Self {
        let per_band = per_band.max(1);
        let n_phi = n_phi.max(1);
        let (t, w) = gauss_legendre(per_band);
        let mut rows = Vec::with_capacity(per_band * edges.len().saturating_sub(1));
        for pair in edges.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            for (ti, wi) in t.iter().zip(&w) {
                let c = mid + half * ti;
                rows.push(GridRow { cos_theta: c, theta: c.clamp(-1.0, 1.0).acos(), weight: half * wi });
            }
        }
        let exact_degree = (2 * per_band - 1).min(n_phi - 1);
        Self { data: Arc::new(GridData { rows, n_phi, exact_degree }) }
    }

    pub fn rows(&self) -> &[GridRow] {
        &self.data.rows
    }

    pub fn n_theta(&self) -> usize {
        self.data.rows.len()
    }

    pub fn n_phi(&self) -> usize {
        self.data.n_phi
    }

    pub fn len(&self) -> usize {
        self.n_theta() * self.n_phi()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Highest spherical-harmonic degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        self.data.exact_degree
    }

    pub fn phi(&self, l: usize) -> f64 {
        TAU * l as f64 / self.data.n_phi as f64
    }

    pub fn phi_weight(&self) -> f64 {
        TAU / self.data.n_phi as f64
    }

    pub fn node(&self, index: usize) -> GridNode {
        let row = &self.data.rows[index / self.data.n_phi];
        let l = index % self.data.n_phi;
        GridNode {
            dir: Direction::new(row.theta, self.phi(l)).expect("grid angles in range"),
            weight: row.weight * self.phi_weight(),
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = GridNode> + '_ {
        (0..self.len()).map(|i| self.node(i))
    }

    /// Weight of node `index`.
    pub fn weight(&self, index: usize) -> f64 {
        self.data.rows[index / self.data.n_phi].weight * self.phi_weight()
    }

    pub fn cos_theta(&self, index: usize) -> f64 {
        self.data.rows[index / self.data.n_phi].cos_theta
    }

    /// Quadrature of node-aligned samples, summed in node order.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        let dphi = self.phi_weight();
        let n_phi = self.n_phi();
        self.rows()
            .iter()
            .enumerate()
            .map(|(r, row)| row.weight * dphi * values[r * n_phi..(r + 1) * n_phi].iter().sum::<f64>())
            .sum()
    }

    /// Samples `f` at every node, in node order.
    pub fn sample<F: Fn(Direction) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes().map(|n| f(n.dir)).collect()
    }
}
