//! Browser bindings: three interactive views over the core models.
//!
//! Each export returns a JSON document for the static demo page to plot.
//! The functions are ordinary Rust on native targets, so the same entry
//! points are exercised by the host test suite.

use ris_core::array::{beam_direction, ArrayGeometry, CoupledArray};
use ris_core::grid::AngularGrid;
use ris_core::link::{
    brute_force_gain, log_grid, optimal_gain_redirective, optimal_gain_reflective,
    rate_redirective, rate_reflective, saturation_gain_redirective, saturation_gain_reflective,
    OverheadParams,
};
use ris_core::routing::steering_phases;
use ris_core::scattering::{
    impinging_power, scatter, scattered_power, stability_margin, realize_load, LoadConfig,
    PlaneWave, PlaneWaveSet, ScatterModel,
};
use ris_core::C64;
use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

fn err_str<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Far-field power pattern of a loaded array for one incident wave.
///
/// `load_kind`: `steer` (phase profile for the out direction), `route`
/// (switched-DFT connection between the beams nearest the two directions),
/// or `mirror` (short-circuit terminations). Angles in degrees. Returns a
/// JSON heatmap over the hemisphere plus the power balance.
#[wasm_bindgen]
pub fn scatter_pattern_json(
    n_side: u32,
    spacing: f64,
    theta_in_deg: f64,
    phi_in_deg: f64,
    theta_out_deg: f64,
    phi_out_deg: f64,
    load_kind: &str,
    exact: bool,
    n_theta: u32,
    n_phi: u32,
) -> Result<String, String> {
    let geom = ArrayGeometry::new(n_side as usize, spacing).map_err(err_str)?;
    let arr = CoupledArray::new(geom).map_err(err_str)?;
    let din = (theta_in_deg.to_radians(), phi_in_deg.to_radians());
    let dout = (theta_out_deg.to_radians(), phi_out_deg.to_radians());
    let load = match load_kind {
        "steer" => LoadConfig::Phased {
            phases: steering_phases(&arr, din, dout).map_err(err_str)?,
        },
        "route" => {
            let b_in = nearest_beam(&geom, din).ok_or("no visible beam near the in direction")?;
            let b_out =
                nearest_beam(&geom, dout).ok_or("no visible beam near the out direction")?;
            if b_in == b_out {
                LoadConfig::SwitchedDft {
                    connections: vec![(b_in, b_out)],
                    absorbed: Vec::new(),
                }
            } else {
                LoadConfig::switched_pair(b_in, b_out)
            }
        }
        "mirror" => LoadConfig::Phased {
            phases: vec![std::f64::consts::PI; geom.elements()],
        },
        other => return Err(format!("unknown load kind '{other}'")),
    };
    let grid = AngularGrid::hemisphere(n_theta as usize, n_phi as usize).map_err(err_str)?;
    let incident = PlaneWaveSet(vec![PlaneWave::new(din.0, din.1, C64::new(1.0, 0.0))]);
    let model = if exact {
        ScatterModel::Exact
    } else {
        ScatterModel::Naive
    };
    let spectrum = scatter(&arr, &load, &incident, &grid, model).map_err(err_str)?;
    let s_l = realize_load(&load, geom.elements()).map_err(err_str)?;
    let margin = stability_margin(arr.s_aa(), &s_l);
    let thetas: Vec<f64> = grid.nodes().iter().map(|n| n.0).collect();
    let phis: Vec<f64> = grid.nodes().iter().map(|n| n.1).collect();
    let power: Vec<f64> = spectrum.values().iter().map(|v| v.norm_sqr()).collect();
    Ok(json!({
        "n_theta": n_theta,
        "n_phi": n_phi,
        "theta": thetas,
        "phi": phis,
        "power": power,
        "scattered_power": scattered_power(&spectrum),
        "impinging_power": impinging_power(&incident),
        "stability_margin": margin,
    })
    .to_string())
}

/// Eigenvalue spectrum of the coupling matrix with the visible-mode count.
#[wasm_bindgen]
pub fn coupling_spectrum_json(n_side: u32, spacing: f64) -> Result<String, String> {
    let geom = ArrayGeometry::new(n_side as usize, spacing).map_err(err_str)?;
    let arr = CoupledArray::new(geom).map_err(err_str)?;
    let ev = arr.sorted_eigenvalues();
    let m = ev.len() as f64;
    let modes = ev.iter().filter(|&&l| l > 0.5).count();
    let midband = ev.iter().filter(|&&l| l > 0.1 && l < 0.9).count() as f64 / m;
    Ok(json!({
        "eigenvalues": ev,
        "mode_count": modes,
        "predicted_modes": std::f64::consts::PI * spacing * spacing * m,
        "midband_fraction": midband,
    })
    .to_string())
}

/// Control-overhead rate curves over the access gain, for both surface
/// architectures, with closed-form and brute-force optima.
#[wasm_bindgen]
pub fn overhead_curves_json(
    k: f64,
    snr0_db: f64,
    m_b: f64,
    b_a: f64,
    eta_b: f64,
    n_s: f64,
    points: u32,
) -> Result<String, String> {
    if points < 2 {
        return Err("need at least two curve points".into());
    }
    let base = OverheadParams {
        k,
        g_c: 10f64.powf(snr0_db / 10.0),
        p_t: 1.0,
        b_w: 1.0,
        n_0: 1.0,
        m_b,
        m_a: 1.0,
        b_a,
        eta_b,
        n_s,
    };
    let top_refl = saturation_gain_reflective(&base);
    if !(top_refl > 1.0) {
        return Err("overhead saturates below unit access gain".into());
    }
    let m_a: Vec<f64> = log_grid(1.0, top_refl, points as usize);
    let red: Vec<f64> = m_a
        .iter()
        .map(|&m| rate_redirective(&OverheadParams { m_a: m, ..base }).rate)
        .collect();
    let refl: Vec<f64> = m_a
        .iter()
        .map(|&m| rate_reflective(&OverheadParams { m_a: m, ..base }).rate)
        .collect();
    let grid_red = log_grid(1.0, saturation_gain_redirective(&base), 512);
    let grid_refl = log_grid(1.0, top_refl, 512);
    let (brute_red_m, brute_red_rate) =
        brute_force_gain(rate_redirective, &base, &grid_red).map_err(err_str)?;
    let (brute_refl_m, brute_refl_rate) =
        brute_force_gain(rate_reflective, &base, &grid_refl).map_err(err_str)?;
    let closed_refl = optimal_gain_reflective(&base).map_err(err_str)?;
    Ok(json!({
        "m_a": m_a,
        "rate_redirective": red,
        "rate_reflective": refl,
        "closed_form": {
            "redirective_m_a": optimal_gain_redirective(&base),
            "reflective_m_a": closed_refl,
        },
        "brute_force": {
            "redirective_m_a": brute_red_m,
            "redirective_rate": brute_red_rate,
            "reflective_m_a": brute_refl_m,
            "reflective_rate": brute_refl_rate,
        },
    })
    .to_string())
}

/// Beam port whose direction is closest to `dir`, visible beams only.
fn nearest_beam(geom: &ArrayGeometry, dir: (f64, f64)) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for b in 0..geom.elements() {
        if let Some((t, p)) = beam_direction(geom, b) {
            let dot =
                t.sin() * dir.0.sin() * (p - dir.1).cos() + t.cos() * dir.0.cos();
            let dist = dot.clamp(-1.0, 1.0).acos();
            if best.map_or(true, |(_, d)| dist < d) {
                best = Some((b, dist));
            }
        }
    }
    best.map(|(b, _)| b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scatter_pattern_returns_consistent_grid() {
        let doc = scatter_pattern_json(4, 0.5, 30.0, 0.0, 30.0, 180.0, "steer", true, 16, 32)
            .unwrap();
        let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(v["power"].as_array().unwrap().len(), 16 * 32);
        assert!(v["scattered_power"].as_f64().unwrap() > 0.0);
        assert!(v["stability_margin"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn route_load_redirects_toward_requested_beam() {
        let doc = scatter_pattern_json(8, 0.5, 20.0, 0.0, 25.0, 120.0, "route", true, 24, 48)
            .unwrap();
        let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
        let power: Vec<f64> = v["power"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        let thetas: Vec<f64> = v["theta"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        let phis: Vec<f64> = v["phi"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        // the strongest node should sit near the outgoing direction
        let peak = (0..power.len())
            .max_by(|&i, &j| power[i].total_cmp(&power[j]))
            .unwrap();
        let (t, p) = (thetas[peak], phis[peak]);
        let target = (25f64.to_radians(), 120f64.to_radians());
        let dot = t.sin() * target.0.sin() * (p - target.1).cos() + t.cos() * target.0.cos();
        assert!(dot.acos() < 0.35, "peak at ({t:.2}, {p:.2})");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(scatter_pattern_json(0, 0.5, 0.0, 0.0, 0.0, 0.0, "steer", true, 8, 8).is_err());
        assert!(scatter_pattern_json(4, 0.5, 0.0, 0.0, 0.0, 0.0, "bogus", true, 8, 8).is_err());
        assert!(coupling_spectrum_json(4, -1.0).is_err());
        assert!(overhead_curves_json(4.0, -60.0, 1024.0, 8.0, 2.0, 1024.0, 1).is_err());
    }

    #[test]
    fn coupling_spectrum_counts_visible_modes() {
        let doc = coupling_spectrum_json(8, 0.5).unwrap();
        let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
        let modes = v["mode_count"].as_u64().unwrap() as f64;
        let predicted = v["predicted_modes"].as_f64().unwrap();
        assert!((modes - predicted).abs() / predicted < 0.15);
        assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 64);
    }

    #[test]
    fn overhead_curves_favor_redirective() {
        let doc = overhead_curves_json(4.0, -60.0, 1024.0, 8.0, 2.0, 1024.0, 64).unwrap();
        let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
        let brute = &v["brute_force"];
        assert!(
            brute["redirective_rate"].as_f64().unwrap()
                >= brute["reflective_rate"].as_f64().unwrap()
        );
        assert_eq!(v["m_a"].as_array().unwrap().len(), 64);
    }
}
