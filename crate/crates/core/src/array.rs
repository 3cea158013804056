//! Planar-array geometry, embedded patterns, coupling and terminal scattering.
//!
//! A square `√M × √M` array with sub-wavelength spacing has strongly coupled
//! elements. The coupling matrix `B` is the Gram matrix of the embedded
//! element patterns over the hemisphere and admits a closed form through the
//! first-order Bessel function; the lossless terminal scattering matrix
//! follows from `S_aa S_aaᴴ + B = I` together with reciprocity `S_aa = S_aaᵀ`.

use crate::bessel::j1;
use crate::error::Error;
use crate::{Result, C64};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Eigenvalues of `B` below this are treated as exactly zero.
const EIG_FLOOR: f64 = -1e-10;
/// Eigenvalues of `B` above `1 +` this are rejected as non-passive.
const EIG_CEIL_SLACK: f64 = 1e-6;

/// Square planar array in wavelength units.
///
/// `spacing` is the inter-element distance `a/λ`; the aperture area is
/// `M a²` in units of `λ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    n_side: usize,
    spacing: f64,
}

impl ArrayGeometry {
    /// New geometry with `n_side ≥ 1` elements per side and positive spacing.
    pub fn new(n_side: usize, spacing: f64) -> Result<Self> {
        if n_side == 0 {
            return Err(Error::Geometry("n_side must be at least 1".into()));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::Geometry(format!(
                "spacing must be positive and finite, got {spacing}"
            )));
        }
        Ok(Self { n_side, spacing })
    }

    /// Elements per side.
    pub fn n_side(&self) -> usize {
        self.n_side
    }

    /// Element spacing in wavelengths.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Total element count `M = n_side²`.
    pub fn elements(&self) -> usize {
        self.n_side * self.n_side
    }

    /// Aperture area `M a²` in `λ²` units.
    pub fn area(&self) -> f64 {
        self.elements() as f64 * self.spacing * self.spacing
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=PI / 2.0).contains(&theta) {
        return Err(Error::Domain(format!(
            "theta = {theta} outside [0, pi/2]"
        )));
    }
    Ok(())
}

/// Array response for a plane wave from `(θ, φ)`.
///
/// Element `(row ℓ over y, col k over x)` sits at flat index `ℓ·√M + k` and
/// carries the phase `exp(−2πj (k_y ℓ + k_x k))` with spatial frequencies
/// `k_x = a sinθ cosφ`, `k_y = a sinθ sinφ`; equivalently the Kronecker
/// product of the y-axis and x-axis steering vectors.
pub fn steering_vector(geom: &ArrayGeometry, theta: f64, phi: f64) -> Result<DVector<C64>> {
    check_theta(theta)?;
    let n = geom.n_side;
    let ky = geom.spacing * theta.sin() * phi.sin();
    let kx = geom.spacing * theta.sin() * phi.cos();
    let mut v = DVector::from_element(n * n, C64::new(0.0, 0.0));
    for l in 0..n {
        for k in 0..n {
            let phase = -2.0 * PI * (ky * l as f64 + kx * k as f64);
            v[l * n + k] = C64::from_polar(1.0, phase);
        }
    }
    Ok(v)
}

/// Effective element area `a² cosθ` in `λ²` units.
pub fn effective_area(geom: &ArrayGeometry, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(geom.spacing * geom.spacing * theta.cos())
}

/// Embedded element pattern `√(a² cosθ) · a(θ, φ)`.
pub fn embedded_pattern(geom: &ArrayGeometry, theta: f64, phi: f64) -> Result<DVector<C64>> {
    let amp = effective_area(geom, theta)?.sqrt();
    let mut v = steering_vector(geom, theta, phi)?;
    v *= C64::new(amp, 0.0);
    Ok(v)
}

/// Embedded-pattern coupling matrix of the cosine element pattern.
///
/// Entry between elements offset by `(Δk, Δℓ)` on the grid:
/// `π a²` on the diagonal, else `a · J1(2π a d) / d` with `d = √(Δk² + Δℓ²)`.
pub fn coupling_matrix(geom: &ArrayGeometry) -> DMatrix<f64> {
    let n = geom.n_side;
    let a = geom.spacing;
    let m = n * n;
    // All entries depend on the absolute grid offset only.
    let mut kernel = DMatrix::zeros(n, n);
    for dl in 0..n {
        for dk in 0..n {
            kernel[(dl, dk)] = if dl == 0 && dk == 0 {
                PI * a * a
            } else {
                let d = ((dk * dk + dl * dl) as f64).sqrt();
                a * j1(2.0 * PI * a * d) / d
            };
        }
    }
    let mut b = DMatrix::zeros(m, m);
    for l in 0..n {
        for k in 0..n {
            let p = l * n + k;
            for nn in 0..n {
                for mm in 0..n {
                    let q = nn * n + mm;
                    b[(p, q)] = kernel[(l.abs_diff(nn), k.abs_diff(mm))];
                }
            }
        }
    }
    b
}

/// Terminal scattering matrix synthesized from a coupling matrix.
///
/// With `B = U Λ Uᵀ`, returns `S_aa = U √(I − Λ) Uᵀ` (all square-root signs
/// positive), which satisfies `S_aa S_aaᴴ + B = I` and `S_aa = S_aaᵀ`.
/// Eigenvalues inside `[−1e-10, 0)` and `(1, 1 + 1e-6]` are clamped to the
/// unit interval; anything further out is rejected.
pub fn scattering_matrix(b: &DMatrix<f64>) -> Result<DMatrix<C64>> {
    let (u, lambda) = symmetric_eigen(b)?;
    let s_real = scattering_from_eigen(&u, &lambda);
    Ok(s_real.map(|x| C64::new(x, 0.0)))
}

/// Eigendecomposition of a symmetric coupling matrix with admissibility checks.
fn symmetric_eigen(b: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let eig = nalgebra::SymmetricEigen::new(b.clone());
    for &l in eig.eigenvalues.iter() {
        if l < EIG_FLOOR || l > 1.0 + EIG_CEIL_SLACK {
            return Err(Error::InadmissiblePattern(l));
        }
    }
    Ok((eig.eigenvectors, eig.eigenvalues))
}

fn scattering_from_eigen(u: &DMatrix<f64>, lambda: &DVector<f64>) -> DMatrix<f64> {
    let sqrt = DVector::from_iterator(
        lambda.len(),
        lambda.iter().map(|l| (1.0 - l.clamp(0.0, 1.0)).sqrt()),
    );
    let mut s = u.clone();
    for (j, col) in sqrt.iter().enumerate() {
        s.column_mut(j).scale_mut(*col);
    }
    &s * u.transpose()
}

/// Coupled planar array: geometry, coupling matrix, terminal scattering and
/// the eigenbasis of `B` retained for diagnostics.
#[derive(Debug, Clone)]
pub struct CoupledArray {
    geometry: ArrayGeometry,
    b: DMatrix<f64>,
    s_aa: DMatrix<C64>,
    eigen_basis: DMatrix<f64>,
    eigenvalues: DVector<f64>,
}

impl CoupledArray {
    /// Build the coupling matrix and synthesize the terminal scattering.
    pub fn new(geometry: ArrayGeometry) -> Result<Self> {
        let b = coupling_matrix(&geometry);
        let (u, lambda) = symmetric_eigen(&b)?;
        let s_aa = scattering_from_eigen(&u, &lambda).map(|x| C64::new(x, 0.0));
        Ok(Self {
            geometry,
            b,
            s_aa,
            eigen_basis: u,
            eigenvalues: lambda,
        })
    }

    /// Array geometry.
    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    /// Coupling matrix `B`.
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    /// Terminal scattering matrix `S_aa`.
    pub fn s_aa(&self) -> &DMatrix<C64> {
        &self.s_aa
    }

    /// Orthogonal eigenbasis of `B`.
    pub fn eigen_basis(&self) -> &DMatrix<f64> {
        &self.eigen_basis
    }

    /// Eigenvalues of `B`, in the order of [`Self::eigen_basis`] columns.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Eigenvalues of `B` sorted ascending.
    pub fn sorted_eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }

    /// Element count.
    pub fn elements(&self) -> usize {
        self.geometry.elements()
    }
}

/// Unitary symmetric DFT matrix with entries `exp(−2πj k n / M) / √M`.
pub fn dft_matrix(m: usize) -> DMatrix<C64> {
    let mut f = DMatrix::from_element(m, m, C64::new(0.0, 0.0));
    for r in 0..m {
        for c in 0..m {
            let phase = -2.0 * PI * (r * c % m) as f64 / m as f64;
            f[(r, c)] = C64::from_polar(1.0 / (m as f64).sqrt(), phase);
        }
    }
    f
}

/// Two-dimensional DFT over the element grid, as the Kronecker product of two
/// `n_side`-point DFT matrices in the row-major element ordering.
pub fn dft_matrix_2d(n_side: usize) -> DMatrix<C64> {
    let f1 = dft_matrix(n_side);
    f1.kronecker(&f1)
}

/// Propagation direction a beam port of the `M`-point DFT termination points
/// at, or `None` for beams outside the visible region.
///
/// Beam `b` of the flattened `M`-point DFT couples to the plane wave with
/// spatial frequencies `k_y ≡ −b/√M (mod 1)`, `k_x ≡ −b/M (mod 1)` wrapped
/// into `[−1/2, 1/2)`; it is visible when `|k| ≤ a/λ`.
pub fn beam_direction(geom: &ArrayGeometry, beam: usize) -> Option<(f64, f64)> {
    let n = geom.n_side;
    let m = geom.elements();
    if beam >= m {
        return None;
    }
    let wrap = |x: f64| {
        let mut y = x.rem_euclid(1.0);
        if y >= 0.5 {
            y -= 1.0;
        }
        y
    };
    let ky = wrap(-((beam % n) as f64) / n as f64);
    let kx = wrap(-(beam as f64) / m as f64);
    let r = (kx * kx + ky * ky).sqrt();
    let sin_theta = r / geom.spacing;
    if sin_theta > 1.0 {
        return None;
    }
    Some((sin_theta.asin(), ky.atan2(kx)))
}
