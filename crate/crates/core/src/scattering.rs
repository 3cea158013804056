//! Load configurations, total scattering, far-field spectra, stability and
//! re-radiation densities.
//!
//! The terminal loads reflect the array's outgoing port wave back into it,
//! so the port excitation solves `a = S_L (S_aa a + ã)` for the captured wave
//! `ã`. The transfer matrix `T = (I − S_L S_aa)⁻¹ S_L` stays well defined for
//! absorptive (singular) loads, unlike the equivalent `(S_L⁻¹ − S_aa)⁻¹`.

use crate::array::{dft_matrix, embedded_pattern, CoupledArray};
use crate::error::Error;
use crate::grid::AngularGrid;
use crate::{Result, C64};
use nalgebra::{DMatrix, DVector};

/// Margin below unit spectral norm required of `S_L S_aa`.
pub const STABILITY_SLACK: f64 = 1e-9;

/// Reconfigurable RF termination of the array ports.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadConfig {
    /// Per-element phase shifters: `S_L = Diag(exp(jφ_i))`.
    Phased {
        /// One phase per element, radians.
        phases: Vec<f64>,
    },
    /// DFT (lens) front end with back-to-back beam-port connections:
    /// `S_L = F S' F` with `S'` a partial symmetric permutation. Ports not
    /// mentioned in any connection are terminated by matched loads.
    SwitchedDft {
        /// Unordered beam-port pairs; `(b, b)` short-circuits beam `b` onto
        /// itself.
        connections: Vec<(usize, usize)>,
        /// Ports explicitly absorbed (matched). Informational beyond
        /// validation: unlisted ports are matched as well.
        absorbed: Vec<usize>,
    },
    /// All ports matched: `S_L = 0`.
    Zero,
    /// A load scaled by an amplifier gain: `S_L = g · inner`.
    ActiveScaled {
        /// Linear amplitude gain, positive.
        gain: f64,
        /// The load being amplified.
        inner: Box<LoadConfig>,
    },
}

impl LoadConfig {
    /// Convenience constructor for a single-beam-pair redirective load.
    pub fn switched_pair(b1: usize, b2: usize) -> Self {
        LoadConfig::SwitchedDft {
            connections: vec![(b1, b2)],
            absorbed: Vec::new(),
        }
    }
}

/// Materialize a load configuration as its `M × M` scattering matrix.
pub fn realize_load(cfg: &LoadConfig, m: usize) -> Result<DMatrix<C64>> {
    match cfg {
        LoadConfig::Phased { phases } => {
            if phases.len() != m {
                return Err(Error::LoadConfig(format!(
                    "phased load has {} phases for {} ports",
                    phases.len(),
                    m
                )));
            }
            Ok(DMatrix::from_diagonal(&DVector::from_iterator(
                m,
                phases.iter().map(|&p| C64::from_polar(1.0, p)),
            )))
        }
        LoadConfig::SwitchedDft {
            connections,
            absorbed,
        } => {
            let sp = beam_permutation(connections, absorbed, m)?;
            let f = dft_matrix(m);
            let sl = &f * sp.map(|x| C64::new(x, 0.0)) * &f;
            // symmetric in exact arithmetic; keep it exact
            Ok((&sl + sl.transpose()) * C64::new(0.5, 0.0))
        }
        LoadConfig::Zero => Ok(DMatrix::from_element(m, m, C64::new(0.0, 0.0))),
        LoadConfig::ActiveScaled { gain, inner } => {
            if !(gain > &0.0) || !gain.is_finite() {
                return Err(Error::LoadConfig(format!(
                    "amplifier gain must be positive and finite, got {gain}"
                )));
            }
            Ok(realize_load(inner, m)? * C64::new(*gain, 0.0))
        }
    }
}

/// Build the partial symmetric permutation `S'` from beam-port connections.
pub fn beam_permutation(
    connections: &[(usize, usize)],
    absorbed: &[usize],
    m: usize,
) -> Result<DMatrix<f64>> {
    let mut used = vec![false; m];
    let mut clashes = Vec::new();
    let mut claim = |port: usize, used: &mut Vec<bool>| -> Result<()> {
        if port >= m {
            return Err(Error::LoadConfig(format!(
                "beam port {port} out of range for {m} ports"
            )));
        }
        if used[port] {
            clashes.push(port);
        }
        used[port] = true;
        Ok(())
    };
    let mut sp = DMatrix::zeros(m, m);
    for &(p, q) in connections {
        claim(p, &mut used)?;
        if q != p {
            claim(q, &mut used)?;
        }
        sp[(p, q)] = 1.0;
        sp[(q, p)] = 1.0;
    }
    for &p in absorbed {
        claim(p, &mut used)?;
    }
    if !clashes.is_empty() {
        clashes.sort_unstable();
        clashes.dedup();
        return Err(Error::RouteConflict(clashes));
    }
    Ok(sp)
}

/// Largest singular value by power iteration on `AᴴA`, with relative
/// tolerance 1e-10 on the estimate and a 10 000 iteration cap.
pub fn spectral_norm(a: &DMatrix<C64>) -> f64 {
    let n = a.ncols();
    if n == 0 || a.iter().all(|x| x.norm_sqr() == 0.0) {
        return 0.0;
    }
    // deterministic start with aperiodic structure so it is never orthogonal
    // to the top singular subspace in practice
    let mut v = DVector::from_iterator(
        n,
        (0..n).map(|i| C64::new(1.0 + 0.2 * ((i + 1) as f64).sin(), 0.1 * (i as f64).cos())),
    );
    v /= C64::new(v.norm(), 0.0);
    let mut sigma = 0.0;
    for _ in 0..10_000 {
        let w = a.adjoint() * (a * &v);
        let lambda = w.norm();
        if lambda == 0.0 {
            return 0.0;
        }
        let next = lambda.sqrt();
        let done = (next - sigma).abs() <= 1e-10 * next.max(1e-300);
        sigma = next;
        v = w / C64::new(lambda, 0.0);
        if done {
            break;
        }
    }
    sigma
}

/// Transfer matrix `T = (I − S_L S_aa)⁻¹ S_L` of the loaded array.
///
/// Fails with [`Error::Unstable`] when `‖S_L S_aa‖₂ ≥ 1 − 1e-9`.
pub fn exact_transfer(s_aa: &DMatrix<C64>, s_l: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let m = s_aa.nrows();
    if s_l.nrows() != m || s_l.ncols() != m || s_aa.ncols() != m {
        return Err(Error::InvalidArgument(
            "load and scattering matrices must share dimensions".into(),
        ));
    }
    let loop_matrix = s_l * s_aa;
    let norm = spectral_norm(&loop_matrix);
    if norm >= 1.0 - STABILITY_SLACK {
        return Err(Error::Unstable { norm });
    }
    let system = DMatrix::<C64>::identity(m, m) - loop_matrix;
    system
        .lu()
        .solve(s_l)
        .ok_or(Error::Unstable { norm: 1.0 })
}

/// Stability margin `1 − ‖S_L S_aa‖₂`; positive means stable.
pub fn stability_margin(s_aa: &DMatrix<C64>, s_l: &DMatrix<C64>) -> f64 {
    1.0 - spectral_norm(&(s_l * s_aa))
}

/// A plane wave impinging on the array.
///
/// `weight` is the angular measure the wave stands for in the discretized
/// incident field: the port capture integral becomes `Σ s(θ_i, φ_i) amp_i w_i`
/// and the impinging power `Σ w_i |amp_i|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    /// Elevation, `[0, π/2]`.
    pub theta: f64,
    /// Azimuth, radians.
    pub phi: f64,
    /// Complex amplitude, `√W` per steradian sample.
    pub amplitude: C64,
    /// Angular measure of the sample, steradians.
    pub weight: f64,
}

impl PlaneWave {
    /// Unit-measure plane wave.
    pub fn new(theta: f64, phi: f64, amplitude: C64) -> Self {
        Self {
            theta,
            phi,
            amplitude,
            weight: 1.0,
        }
    }

    /// Plane wave sitting on a quadrature node, carrying that node's weight.
    pub fn on_grid(grid: &AngularGrid, node: usize, amplitude: C64) -> Self {
        let (theta, phi) = grid.nodes()[node];
        Self {
            theta,
            phi,
            amplitude,
            weight: grid.weights()[node],
        }
    }
}

/// Discretized incident field.
#[derive(Debug, Clone, Default)]
pub struct PlaneWaveSet(pub Vec<PlaneWave>);

impl PlaneWaveSet {
    /// Validate angles, amplitudes and weights.
    fn check(&self) -> Result<()> {
        for w in &self.0 {
            if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&w.theta) {
                return Err(Error::Domain(format!(
                    "incident theta = {} outside [0, pi/2]",
                    w.theta
                )));
            }
            if !w.amplitude.re.is_finite() || !w.amplitude.im.is_finite() || !(w.weight > 0.0) {
                return Err(Error::InvalidArgument(
                    "incident amplitudes must be finite with positive weights".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Scattering model used to map port captures to port excitations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScatterModel {
    /// Full multiple-reflection solution `T = (I − S_L S_aa)⁻¹ S_L`.
    Exact,
    /// Matched-array shortcut `T = S_L`, which ignores mutual coupling.
    Naive,
}

/// Outgoing far-field amplitudes over a grid.
#[derive(Debug, Clone)]
pub struct FarFieldSpectrum {
    grid: AngularGrid,
    values: Vec<C64>,
}

impl FarFieldSpectrum {
    /// Grid the amplitudes are sampled on.
    pub fn grid(&self) -> &AngularGrid {
        &self.grid
    }

    /// Complex amplitude per node.
    pub fn values(&self) -> &[C64] {
        &self.values
    }
}

/// Far-field response of the loaded array to an incident field.
pub fn scatter(
    coupled: &CoupledArray,
    load: &LoadConfig,
    incident: &PlaneWaveSet,
    out_grid: &AngularGrid,
    model: ScatterModel,
) -> Result<FarFieldSpectrum> {
    incident.check()?;
    let m = coupled.elements();
    let s_l = realize_load(load, m)?;
    let transfer = match model {
        ScatterModel::Exact => exact_transfer(coupled.s_aa(), &s_l)?,
        ScatterModel::Naive => s_l,
    };
    let captured = capture(coupled, incident)?;
    let port_wave = &transfer * captured;
    let values = out_grid
        .nodes()
        .iter()
        .map(|&(t, p)| {
            let s = embedded_pattern(coupled.geometry(), t, p)?;
            // s(θ,φ)ᵀ · a_port, transpose without conjugation
            Ok(s.iter().zip(port_wave.iter()).map(|(a, b)| a * b).sum())
        })
        .collect::<Result<Vec<C64>>>()?;
    Ok(FarFieldSpectrum {
        grid: out_grid.clone(),
        values,
    })
}

/// Port wave captured from the incident field: `Σ s(θ_i, φ_i) amp_i w_i`.
fn capture(coupled: &CoupledArray, incident: &PlaneWaveSet) -> Result<DVector<C64>> {
    let m = coupled.elements();
    let mut acc = DVector::from_element(m, C64::new(0.0, 0.0));
    for w in &incident.0 {
        let s = embedded_pattern(coupled.geometry(), w.theta, w.phi)?;
        acc += s * (w.amplitude * C64::new(w.weight, 0.0));
    }
    Ok(acc)
}

/// Quadrature power of a far-field spectrum, `Σ w |b|²`.
pub fn scattered_power(spectrum: &FarFieldSpectrum) -> f64 {
    spectrum
        .values
        .iter()
        .zip(spectrum.grid.weights())
        .map(|(v, w)| w * v.norm_sqr())
        .sum()
}

/// Power carried by a discretized incident field, `Σ w |amp|²`.
pub fn impinging_power(incident: &PlaneWaveSet) -> f64 {
    incident
        .0
        .iter()
        .map(|w| w.weight * w.amplitude.norm_sqr())
        .sum()
}

/// Common re-radiation quadratic form `sᵀ T B Tᴴ s*` at one direction.
fn reradiation_form(
    coupled: &CoupledArray,
    transfer: &DMatrix<C64>,
    theta: f64,
    phi: f64,
) -> Result<f64> {
    let s = embedded_pattern(coupled.geometry(), theta, phi)?;
    let u = transfer.adjoint() * s.map(|x| x.conj());
    let bu = multiply_real(coupled.b(), &u);
    Ok(u.dotc(&bu).re)
}

fn multiply_real(b: &DMatrix<f64>, v: &DVector<C64>) -> DVector<C64> {
    let n = b.nrows();
    DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += v[j] * b[(i, j)];
            }
            acc
        }),
    )
}

/// Amplified thermal-noise radiation density at `(θ, φ)` in W/Hz per
/// steradian sample:
/// `N = N_F^∞ N_0 max(sᵀ T B Tᴴ s* − (A/λ²) cosθ, 0)`,
/// the excess of the re-radiated port noise over the passive background.
pub fn noise_density(
    coupled: &CoupledArray,
    load: &LoadConfig,
    theta: f64,
    phi: f64,
    n0: f64,
    nf_inf: f64,
) -> Result<f64> {
    if !(nf_inf >= 1.0) {
        return Err(Error::Domain(format!(
            "asymptotic noise figure must be >= 1, got {nf_inf}"
        )));
    }
    if !(n0 >= 0.0) {
        return Err(Error::Domain(format!(
            "noise density must be nonnegative, got {n0}"
        )));
    }
    let m = coupled.elements();
    let s_l = realize_load(load, m)?;
    let transfer = exact_transfer(coupled.s_aa(), &s_l)?;
    let form = reradiation_form(coupled, &transfer, theta, phi)?;
    let background = coupled.geometry().area() * theta.cos();
    Ok(nf_inf * n0 * (form - background).max(0.0))
}

/// Re-radiated and amplified isotropic interference density at `(θ, φ)`:
/// `I = N_I sᵀ T B Tᴴ s*`, no background subtraction.
pub fn interference_density(
    coupled: &CoupledArray,
    load: &LoadConfig,
    theta: f64,
    phi: f64,
    n_i: f64,
) -> Result<f64> {
    let m = coupled.elements();
    let s_l = realize_load(load, m)?;
    let transfer = exact_transfer(coupled.s_aa(), &s_l)?;
    Ok(n_i * reradiation_form(coupled, &transfer, theta, phi)?)
}

/// Hemisphere integral of the interference density over a grid.
pub fn interference_integral(
    coupled: &CoupledArray,
    load: &LoadConfig,
    grid: &AngularGrid,
    n_i: f64,
) -> Result<f64> {
    let m = coupled.elements();
    let s_l = realize_load(load, m)?;
    let transfer = exact_transfer(coupled.s_aa(), &s_l)?;
    let mut total = 0.0;
    for (&(t, p), &w) in grid.nodes().iter().zip(grid.weights()) {
        total += w * reradiation_form(coupled, &transfer, t, p)?;
    }
    Ok(n_i * total)
}
