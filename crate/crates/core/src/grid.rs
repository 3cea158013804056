//! Quadrature grids on the upper hemisphere.
//!
//! Spherical integrals over `θ ∈ [0, π/2]`, `φ ∈ [−π, π)` with measure
//! `sinθ dφ dθ` are evaluated as weighted sums over a product grid:
//! Gauss–Legendre in `cosθ` crossed with a uniform (trapezoid) rule in `φ`.
//! Both integrand families that appear here are smooth, so the rule converges
//! spectrally.

use crate::error::Error;
use crate::Result;
use std::f64::consts::PI;

/// Default number of Gauss–Legendre nodes in `cosθ`.
pub const DEFAULT_N_THETA: usize = 64;
/// Default number of uniform nodes in `φ`.
pub const DEFAULT_N_PHI: usize = 128;

/// Quadrature nodes and weights on the hemisphere.
///
/// The weights sum to `2π`, the measure of the hemisphere in `sinθ dφ dθ`.
#[derive(Debug, Clone)]
pub struct AngularGrid {
    nodes: Vec<(f64, f64)>,
    weights: Vec<f64>,
}

impl AngularGrid {
    /// Product rule with `n_theta` Gauss–Legendre nodes in `cosθ` and `n_phi`
    /// uniform nodes in `φ`.
    pub fn hemisphere(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::InvalidArgument(
                "angular grid needs at least one node per axis".into(),
            ));
        }
        let (x, w) = gauss_legendre(n_theta);
        let w_phi = 2.0 * PI / n_phi as f64;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (xi, wi) in x.iter().zip(&w) {
            // map from [-1, 1] to cosθ ∈ [0, 1]
            let c = 0.5 * (xi + 1.0);
            let theta = c.clamp(0.0, 1.0).acos();
            for j in 0..n_phi {
                let phi = -PI + 2.0 * PI * j as f64 / n_phi as f64;
                nodes.push((theta, phi));
                weights.push(0.5 * wi * w_phi);
            }
        }
        Ok(Self { nodes, weights })
    }

    /// The default grid used by diagnostics and far-field sampling.
    pub fn default_hemisphere() -> Self {
        Self::hemisphere(DEFAULT_N_THETA, DEFAULT_N_PHI).expect("default grid sizes are valid")
    }

    /// `(θ, φ)` node coordinates.
    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// Quadrature weights, aligned with [`Self::nodes`].
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// True when the grid holds no nodes.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
///
/// Nodes are the roots of the Legendre polynomial `P_n`, found by Newton
/// iteration from the Chebyshev-like initial guess; weights follow from the
/// derivative at the root.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Value and derivative of the Legendre polynomial `P_n` at `z`.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        let (x, w) = gauss_legendre(8);
        // degree–15 exactness: ∫ x^k over [-1,1]
        for k in 0..16 {
            let num: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k)).sum();
            let exact = if k % 2 == 0 {
                2.0 / (k as f64 + 1.0)
            } else {
                0.0
            };
            assert!((num - exact).abs() < 1e-13, "k={k}: {num} vs {exact}");
        }
    }

    #[test]
    fn default_grid_measures_hemisphere() {
        let g = AngularGrid::default_hemisphere();
        let total: f64 = g.weights().iter().sum();
        assert!((total - 2.0 * PI).abs() < 1e-9, "sum = {total}");
        assert!(g.weights().iter().all(|&w| w > 0.0));
        assert!(g
            .nodes()
            .iter()
            .all(|&(t, p)| (0.0..=PI / 2.0).contains(&t) && (-PI..PI).contains(&p)));
    }

    #[test]
    fn integrates_cos_theta() {
        // ∫∫ cosθ sinθ dφ dθ over the hemisphere = π
        let g = AngularGrid::hemisphere(16, 32).unwrap();
        let v: f64 = g
            .nodes()
            .iter()
            .zip(g.weights())
            .map(|(&(t, _), &w)| w * t.cos())
            .sum();
        assert!((v - PI).abs() < 1e-12);
    }

    #[test]
    fn rejects_empty_axes() {
        assert!(AngularGrid::hemisphere(0, 8).is_err());
        assert!(AngularGrid::hemisphere(8, 0).is_err());
    }
}
