//! Deployment geometry and control-overhead rate analysis.
//!
//! Covers the Fresnel-zone sizing rule, the fractional-bandwidth limit of
//! phase-only surfaces, and the sum-rate models in which the in-band control
//! overhead scales logarithmically with the access gain for switched-DFT
//! surfaces but linearly for phased ones, together with the closed-form
//! optimal access gains of both.

use crate::error::Error;
use crate::Result;
use std::f64::consts::E;

/// Blockage-relay geometry, lengths in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryScenario {
    /// Transmitter-to-surface distance.
    pub d_tx: f64,
    /// Surface-to-receiver distance.
    pub d_rx: f64,
    /// Incident elevation, `[−π/2, π/2]`.
    pub theta_i: f64,
    /// Reflected elevation, `[−π/2, π/2]`.
    pub theta_r: f64,
    /// Surface side length.
    pub side_len: f64,
}

impl GeometryScenario {
    fn check(&self) -> Result<()> {
        if !(self.d_tx > 0.0) || !(self.d_rx > 0.0) {
            return Err(Error::Geometry("distances must be positive".into()));
        }
        let half = std::f64::consts::FRAC_PI_2;
        if !(-half..=half).contains(&self.theta_i) || !(-half..=half).contains(&self.theta_r) {
            return Err(Error::Geometry(
                "incident/reflected angles must lie in [-pi/2, pi/2]".into(),
            ));
        }
        Ok(())
    }
}

/// Fresnel-zone surface sizing for a blockage relay.
///
/// Returns `(required_size, l_max)`: the first-Fresnel-zone size
/// `√(d_rx d_tx / (d_tx + d_rx))` for the given placement, and the worst-case
/// (halfway) size `½ √(d_tx + d_rx)`, both in wavelengths.
pub fn fresnel_size(d_tx: f64, d_rx: f64) -> Result<(f64, f64)> {
    if !(d_tx > 0.0) || !(d_rx > 0.0) {
        return Err(Error::Geometry("distances must be positive".into()));
    }
    let required = (d_rx * d_tx / (d_tx + d_rx)).sqrt();
    let l_max = 0.5 * (d_tx + d_rx).sqrt();
    Ok((required, l_max))
}

/// Fractional-bandwidth limit of a phase-only surface without true-delay
/// elements: `λ / (L |sinθ_I − sinθ_R|)`, or with `use_distance_form` the
/// Fresnel-sized variant `2/|sinθ_I − sinθ_R| · √(λ/(d_tx + d_rx))`.
///
/// Specular settings (`sinθ_I = sinθ_R`) have no aperture dispersion and
/// return `+∞`.
pub fn fractional_bandwidth_limit(scn: &GeometryScenario, use_distance_form: bool) -> Result<f64> {
    scn.check()?;
    if !use_distance_form && !(scn.side_len > 0.0) {
        return Err(Error::Geometry(format!(
            "side length must be positive, got {}",
            scn.side_len
        )));
    }
    let dsin = (scn.theta_i.sin() - scn.theta_r.sin()).abs();
    if dsin == 0.0 {
        return Ok(f64::INFINITY);
    }
    if use_distance_form {
        Ok(2.0 / dsin * (1.0 / (scn.d_tx + scn.d_rx)).sqrt())
    } else {
        Ok(1.0 / (scn.side_len * dsin))
    }
}

/// Scalar parameters of the control-overhead rate models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverheadParams {
    /// Number of surface nodes served by the control channel.
    pub k: f64,
    /// Isotropic channel gain (dimensionless).
    pub g_c: f64,
    /// Transmit power, W.
    pub p_t: f64,
    /// Bandwidth, Hz.
    pub b_w: f64,
    /// Noise power density, W/Hz.
    pub n_0: f64,
    /// Fronthaul beamforming gain.
    pub m_b: f64,
    /// Access beamforming gain.
    pub m_a: f64,
    /// Control bits per beam-index bit.
    pub b_a: f64,
    /// Control-channel spectral efficiency, bit/s/Hz.
    pub eta_b: f64,
    /// Slot length, symbols.
    pub n_s: f64,
}

impl OverheadParams {
    /// Reference SNR `G_c P_T / (B_w N_0)` before beamforming gains.
    pub fn snr0(&self) -> f64 {
        self.g_c * self.p_t / (self.b_w * self.n_0)
    }
}

/// A sum rate together with its overhead status.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOutcome {
    /// Sum rate in bit/s/Hz; zero when saturated.
    pub rate: f64,
    /// True when the control overhead reached the whole slot.
    pub saturated: bool,
}

impl RateOutcome {
    fn from_parts(prelog: f64, log_arg: f64, k: f64) -> Self {
        if prelog <= 0.0 {
            RateOutcome {
                rate: 0.0,
                saturated: true,
            }
        } else {
            RateOutcome {
                rate: k * prelog * log_arg.log2(),
                saturated: false,
            }
        }
    }
}

/// Sum rate of `K` switched-DFT nodes with logarithmic control overhead:
/// `K (1 − b_A log₂M_A / (η_B N_s)) log₂(1 + SNR₀ M_B M_A)`.
pub fn rate_redirective(p: &OverheadParams) -> RateOutcome {
    let overhead = p.b_a * p.m_a.log2() / (p.eta_b * p.n_s);
    RateOutcome::from_parts(1.0 - overhead, 1.0 + p.snr0() * p.m_b * p.m_a, p.k)
}

/// Sum rate of `K` phased nodes with linear control overhead and matched
/// fronthaul/access gains: `K (1 − b_A M_A / (η_B N_s)) log₂(1 + SNR₀ M_A²)`.
pub fn rate_reflective(p: &OverheadParams) -> RateOutcome {
    let overhead = p.b_a * p.m_a / (p.eta_b * p.n_s);
    RateOutcome::from_parts(1.0 - overhead, 1.0 + p.snr0() * p.m_a * p.m_a, p.k)
}

/// High-SNR optimal access gain of the switched-DFT rate:
/// `2^(η_B N_s / (2 b_A)) / √(SNR₀ M_B)`.
pub fn optimal_gain_redirective(p: &OverheadParams) -> f64 {
    (p.eta_b * p.n_s / (2.0 * p.b_a)).exp2() / (p.snr0() * p.m_b).sqrt()
}

/// High-SNR optimal access gain of the phased rate:
/// `(η_B N_s / b_A) / W((η_B N_s / b_A) √SNR₀)`.
pub fn optimal_gain_reflective(p: &OverheadParams) -> Result<f64> {
    let c = p.eta_b * p.n_s / p.b_a;
    let arg = c * p.snr0().sqrt();
    if !(arg > 0.0) {
        return Err(Error::Domain(format!(
            "Lambert argument must be positive, got {arg}"
        )));
    }
    Ok(c / lambert_w(arg)?)
}

/// Principal branch of the Lambert W function for `x ≥ −1/e`.
///
/// Halley iteration from a branch-point or logarithmic initial guess;
/// converges to `|W e^W − x| ≤ 1e-12 max(1, |x|)`.
pub fn lambert_w(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("Lambert W of non-finite {x}")));
    }
    let min = -1.0 / E;
    if x < min {
        return Err(Error::Domain(format!("Lambert W undefined for {x} < -1/e")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut w = if x < -0.25 {
        // branch-point series around -1/e
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0
    } else if x < E {
        // cheap rational seed near the origin
        x / (1.0 + x)
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        if f.abs() <= 1e-13 * x.abs().max(1.0) {
            break;
        }
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        w -= f / denom;
    }
    Ok(w)
}

/// Exhaustive rate maximization over an explicit access-gain grid.
///
/// Returns the maximizing gain and its rate. Saturated points score zero.
pub fn brute_force_gain<F>(rate_fn: F, p: &OverheadParams, grid: &[f64]) -> Result<(f64, f64)>
where
    F: Fn(&OverheadParams) -> RateOutcome,
{
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty search grid".into()));
    }
    let mut best = (grid[0], f64::NEG_INFINITY);
    for &m_a in grid {
        let rate = rate_fn(&OverheadParams { m_a, ..*p }).rate;
        if rate > best.1 {
            best = (m_a, rate);
        }
    }
    Ok(best)
}

/// Access gain at which the switched-DFT overhead saturates the slot.
pub fn saturation_gain_redirective(p: &OverheadParams) -> f64 {
    (p.eta_b * p.n_s / p.b_a).exp2().min(1e290)
}

/// Access gain at which the phased overhead saturates the slot.
pub fn saturation_gain_reflective(p: &OverheadParams) -> f64 {
    p.eta_b * p.n_s / p.b_a
}

/// Logarithmically spaced grid over `[lo, hi)`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && points >= 1);
    if points == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln();
    (0..points)
        .map(|i| lo * (ratio * i as f64 / points as f64).exp())
        .collect()
}
