//! Self-contained verification checks behind the `selftest` command and the
//! acceptance test suite.
//!
//! Each check runs at desk scale, returns its measurements in the detail
//! string, and owns its tolerances; the suite asserts on `passed`.

use crate::array::{
    beam_direction, coupling_matrix, dft_matrix, embedded_pattern, ArrayGeometry, CoupledArray,
};
use crate::estimation::{
    self, make_probe_schedule, retro_measure, retro_recover, ProbeKind, SparseAngularChannel,
};
use crate::grid::AngularGrid;
use crate::link::{
    brute_force_gain, lambert_w, log_grid, optimal_gain_redirective, optimal_gain_reflective,
    rate_redirective, rate_reflective, saturation_gain_redirective, saturation_gain_reflective,
    OverheadParams,
};
use crate::routing::{
    combine_redirective, combine_reflective, route_gain, steering_phases, RedirectiveRoute,
};
use crate::scattering::{
    exact_transfer, impinging_power, noise_density, realize_load, scatter, scattered_power,
    spectral_norm, LoadConfig, PlaneWave, PlaneWaveSet, ScatterModel,
};
use crate::C64;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Result of one verification check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    /// Stable identifier, `c1` through `c9`.
    pub id: &'static str,
    /// Human-readable name.
    pub name: &'static str,
    /// Whether every assertion of the check held.
    pub passed: bool,
    /// Measured quantities backing the verdict.
    pub detail: String,
}

impl CheckOutcome {
    fn new(id: &'static str, name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            id,
            name,
            passed,
            detail,
        }
    }
}

/// Run all library-level checks (the CLI determinism check lives with the
/// CLI itself).
pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    vec![
        lossless_construction(),
        quadrature_consistency(),
        passivity_and_power_ordering(seed),
        partial_isometry_trend(),
        noise_clamp(seed),
        overhead_optimality(),
        routing_gains(seed),
        estimation_scaling(seed),
    ]
}

/// c1: synthesized terminal scattering is lossless and reciprocal.
pub fn lossless_construction() -> CheckOutcome {
    let mut worst_lossless: f64 = 0.0;
    let mut worst_sym: f64 = 0.0;
    let mut ok = true;
    for &n in &[2usize, 4, 8, 16] {
        for &a in &[0.25, 0.5] {
            let geom = ArrayGeometry::new(n, a).unwrap();
            let Ok(arr) = CoupledArray::new(geom) else {
                ok = false;
                continue;
            };
            let m = arr.elements();
            let s = arr.s_aa();
            let lossless = (s * s.adjoint() + arr.b().map(|x| C64::new(x, 0.0))
                - DMatrix::<C64>::identity(m, m))
            .norm();
            let sym = (s - s.transpose()).norm();
            worst_lossless = worst_lossless.max(lossless);
            worst_sym = worst_sym.max(sym);
        }
    }
    ok &= worst_lossless <= 1e-9 && worst_sym <= 1e-12;
    CheckOutcome::new(
        "c1",
        "lossless construction",
        ok,
        format!("max ||S Sᴴ + B − I||_F = {worst_lossless:.3e} (tol 1e-9), max ||S − Sᵀ||_F = {worst_sym:.3e} (tol 1e-12)"),
    )
}

/// c2: the closed-form coupling matrix equals its defining spherical integral.
pub fn quadrature_consistency() -> CheckOutcome {
    let geom = ArrayGeometry::new(4, 0.5).unwrap();
    let m = geom.elements();
    let b = coupling_matrix(&geom);
    let grid = AngularGrid::default_hemisphere();
    let mut bq = DMatrix::<C64>::zeros(m, m);
    for (&(t, p), &w) in grid.nodes().iter().zip(grid.weights()) {
        let s = embedded_pattern(&geom, t, p).unwrap();
        // rank-one update w · s sᴴ
        for i in 0..m {
            for j in 0..m {
                bq[(i, j)] += s[i] * s[j].conj() * C64::new(w, 0.0);
            }
        }
    }
    let diff = (bq - b.map(|x| C64::new(x, 0.0))).norm();
    let rel = diff / b.norm();
    CheckOutcome::new(
        "c2",
        "quadrature consistency",
        rel <= 1e-3,
        format!("relative Frobenius error {rel:.3e} (tol 1e-3)"),
    )
}

/// c3: exact scattering never exceeds the impinging power, and the
/// matched-array model never out-radiates the exact one in operator norm.
pub fn passivity_and_power_ordering(seed: u64) -> CheckOutcome {
    let geom = ArrayGeometry::new(4, 0.5).unwrap();
    let arr = CoupledArray::new(geom).unwrap();
    let m = arr.elements();
    let grid = AngularGrid::hemisphere(32, 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b_half = matrix_sqrt(&arr);
    let trials = 120;
    let mut max_power_ratio: f64 = 0.0;
    let mut worst_order_gap: f64 = f64::INFINITY;
    let mut ok = true;
    for _ in 0..trials {
        let load = random_phased(&mut rng, m);
        let s_l = realize_load(&load, m).unwrap();
        // random 1..=3 plane waves sitting on grid nodes
        let count = rng.random_range(1..=3);
        let waves: Vec<PlaneWave> = (0..count)
            .map(|_| {
                let node = rng.random_range(0..grid.len());
                let amp = C64::from_polar(1.0, rng.random_range(-3.14..3.14));
                PlaneWave::on_grid(&grid, node, amp)
            })
            .collect();
        let incident = PlaneWaveSet(waves);
        let spec = scatter(&arr, &load, &incident, &grid, ScatterModel::Exact).unwrap();
        let p_out = scattered_power(&spec);
        let p_in = impinging_power(&incident);
        ok &= p_out <= p_in + 1e-9;
        max_power_ratio = max_power_ratio.max(p_out / p_in);

        // worst-case power gain over incident fields: σ(B^½ T B^½)
        let transfer = exact_transfer(arr.s_aa(), &s_l).unwrap();
        let sigma_exact = spectral_norm(&(&b_half * &transfer * &b_half));
        let sigma_naive = spectral_norm(&(&b_half * &s_l * &b_half));
        ok &= sigma_naive * sigma_naive <= sigma_exact * sigma_exact + 1e-9;
        worst_order_gap = worst_order_gap.min(sigma_exact - sigma_naive);
    }
    CheckOutcome::new(
        "c3",
        "passivity and power ordering",
        ok,
        format!(
            "{trials} trials: max scattered/impinging = {max_power_ratio:.3e} (must be ≤ 1 + 1e-9), min operator-norm gap exact − naive = {worst_order_gap:.3e} (must be ≥ −1e-9)"
        ),
    )
}

/// c4: the coupling spectrum approaches a partial isometry as the array
/// grows, with the visible-region mode count.
pub fn partial_isometry_trend() -> CheckOutcome {
    let a = 0.5;
    let mut fractions = Vec::new();
    let mut detail = String::new();
    let mut ok = true;
    for &n in &[4usize, 8, 16] {
        let arr = CoupledArray::new(ArrayGeometry::new(n, a).unwrap()).unwrap();
        let ev = arr.sorted_eigenvalues();
        let m = ev.len() as f64;
        let frac = ev.iter().filter(|&&l| l > 0.1 && l < 0.9).count() as f64 / m;
        fractions.push(frac);
        if n >= 8 {
            let modes = ev.iter().filter(|&&l| l > 0.5).count() as f64;
            let predicted = std::f64::consts::PI * a * a * m;
            let rel = (modes - predicted).abs() / predicted;
            ok &= rel <= 0.15;
            detail.push_str(&format!(
                "n={n}: modes {modes} vs πa²M = {predicted:.1} ({:+.1}%); ",
                100.0 * (modes - predicted) / predicted
            ));
        }
    }
    ok &= fractions.windows(2).all(|w| w[1] <= w[0]);
    detail.push_str(&format!("mid-band fractions {fractions:.3?} non-increasing"));
    CheckOutcome::new("c4", "partial-isometry trend", ok, detail)
}

/// c5: amplified-noise density clamps to exactly zero for passive
/// redirective loads and turns positive under a stable tenfold amplifier.
pub fn noise_clamp(seed: u64) -> CheckOutcome {
    let geom = ArrayGeometry::new(8, 0.5).unwrap();
    let arr = CoupledArray::new(geom).unwrap();
    let m = arr.elements();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let visible = visible_beams_by_coupling(&arr);
    let n0 = 1e-20;
    let nf = 2.0;

    // Passive side: matched and short-circuit-type terminations, for which
    // the re-radiated port noise never exceeds the passive background (the
    // excess form is negative semidefinite), so the clamp lands on exactly
    // zero. Generic unitary phases re-radiate above background near loop
    // resonances; see the scattering tests for that documented behaviour.
    let short_all = vec![std::f64::consts::PI; m];
    let passive_loads = [
        LoadConfig::Zero,
        LoadConfig::Phased {
            phases: short_all.clone(),
        },
        LoadConfig::ActiveScaled {
            gain: 0.7,
            inner: Box::new(LoadConfig::Phased {
                phases: short_all.clone(),
            }),
        },
        LoadConfig::ActiveScaled {
            gain: 0.3,
            inner: Box::new(LoadConfig::Phased { phases: short_all }),
        },
    ];
    let mut angles_checked = 0usize;
    let mut ok = true;
    for load in &passive_loads {
        for _ in 0..250 {
            let (t, p) = random_angle(&mut rng);
            let n = noise_density(&arr, load, t, p, n0, nf).unwrap();
            ok &= n == 0.0;
            angles_checked += 1;
        }
    }

    // active side: gain 10 across the two most strongly coupled beams
    let active = LoadConfig::ActiveScaled {
        gain: 10.0,
        inner: Box::new(LoadConfig::switched_pair(visible[0], visible[1])),
    };
    let s_l = realize_load(&active, m).unwrap();
    let margin = 1.0 - spectral_norm(&(&s_l * arr.s_aa()));
    let mut max_noise: f64 = 0.0;
    for _ in 0..1000 {
        let (t, p) = random_angle(&mut rng);
        max_noise = max_noise.max(noise_density(&arr, &active, t, p, n0, nf).unwrap());
    }
    ok &= margin > 0.0 && max_noise > 0.0;
    CheckOutcome::new(
        "c5",
        "noise clamp",
        ok,
        format!(
            "passive matched/short-circuit terminations: N = 0 at {angles_checked} random angle/load pairs; active gain-10 margin {margin:.3}, max N = {max_noise:.3e} W/Hz"
        ),
    )
}

/// c6: closed-form optimal access gains against brute-force maximization,
/// redirective dominance, and the Lambert W round trip.
pub fn overhead_optimality() -> CheckOutcome {
    let fixture = OverheadParams {
        k: 4.0,
        g_c: 1e-6,
        p_t: 1.0,
        b_w: 1.0,
        n_0: 1.0,
        m_b: 1024.0,
        m_a: 64.0,
        b_a: 8.0,
        eta_b: 2.0,
        n_s: 1024.0,
    };
    let mut ok = true;
    let mut detail = String::new();

    // redirective closed form at the documented fixture
    let grid_red = log_grid(1.0, saturation_gain_redirective(&fixture), 512);
    let (_, brute_red) = brute_force_gain(rate_redirective, &fixture, &grid_red).unwrap();
    let m_red = optimal_gain_redirective(&fixture);
    let closed_red = rate_redirective(&OverheadParams {
        m_a: m_red,
        ..fixture
    })
    .rate;
    let dev_red = (brute_red - closed_red).abs() / closed_red;
    ok &= dev_red <= 0.02;
    detail.push_str(&format!(
        "redirective: brute {brute_red:.4} vs closed-form {closed_red:.4} ({:.2}%, tol 2%); ",
        100.0 * dev_red
    ));

    // the reflective closed form is a high-SNR asymptotic; at the documented
    // fixture its optimum exceeds overhead saturation (kept as a regression),
    // so the 5% comparison runs where its validity condition holds
    let m_refl_doc = optimal_gain_reflective(&fixture).unwrap();
    let doc_saturates = m_refl_doc >= saturation_gain_reflective(&fixture)
        && rate_reflective(&OverheadParams {
            m_a: m_refl_doc,
            ..fixture
        })
        .saturated;
    ok &= doc_saturates;
    let high_snr = OverheadParams {
        g_c: 0.1,
        ..fixture
    };
    let grid_refl = log_grid(1.0, saturation_gain_reflective(&high_snr), 512);
    let (_, brute_refl) = brute_force_gain(rate_reflective, &high_snr, &grid_refl).unwrap();
    let m_refl = optimal_gain_reflective(&high_snr).unwrap();
    let closed_refl = rate_reflective(&OverheadParams {
        m_a: m_refl,
        ..high_snr
    })
    .rate;
    let dev_refl = (brute_refl - closed_refl).abs() / brute_refl;
    ok &= dev_refl <= 0.05;
    detail.push_str(&format!(
        "reflective (high-SNR point): brute {brute_refl:.4} vs closed-form {closed_refl:.4} ({:.2}%, tol 5%); documented fixture saturates the closed form as expected: {doc_saturates}; ",
        100.0 * dev_refl
    ));

    // redirective dominance at matched parameters, both operating points
    for p in [&fixture, &high_snr] {
        let g_red = log_grid(1.0, saturation_gain_redirective(p), 512);
        let g_refl = log_grid(1.0, saturation_gain_reflective(p), 512);
        let (_, r1) = brute_force_gain(rate_redirective, p, &g_red).unwrap();
        let (_, r2) = brute_force_gain(rate_reflective, p, &g_refl).unwrap();
        ok &= r1 >= r2;
    }

    // Lambert W round trip across the whole acceptance interval
    let mut worst_rt: f64 = 0.0;
    let mut xs = vec![-1.0 / std::f64::consts::E + 1e-6, -0.25, -0.05];
    xs.extend(log_grid(1e-6, 1e12, 400));
    xs.push(1e12);
    for &x in &xs {
        let w = lambert_w(x).unwrap();
        worst_rt = worst_rt.max((w * w.exp() - x).abs() / x.abs().max(1.0));
    }
    ok &= worst_rt <= 1e-12;
    detail.push_str(&format!(
        "max redirective ≥ max reflective at matched parameters; Lambert W worst round-trip {worst_rt:.2e} (tol 1e-12)"
    ));
    CheckOutcome::new("c6", "overhead optimality", ok, detail)
}

/// c7: disjoint redirective routes keep full gain; reflective sharing loses
/// the factor `K`.
pub fn routing_gains(seed: u64) -> CheckOutcome {
    let mut ok = true;
    let mut detail = String::new();

    // redirective: two disjoint routes on a 4×4 array, beam-aligned links
    let geom = ArrayGeometry::new(4, 0.5).unwrap();
    let arr = CoupledArray::new(geom).unwrap();
    let m = geom.elements();
    let routes = [RedirectiveRoute::pair(0, 4), RedirectiveRoute::pair(12, 1)];
    let combined = combine_redirective(&routes, m).unwrap();
    let mut worst_dev: f64 = 0.0;
    for r in &routes {
        let (b_in, b_out) = r.connections[0];
        let single = LoadConfig::switched_pair(b_in, b_out);
        let din = beam_direction(&geom, b_in).unwrap();
        let dout = beam_direction(&geom, b_out).unwrap();
        let g = route_gain(&arr, &combined, &single, din, dout, ScatterModel::Naive).unwrap();
        worst_dev = worst_dev.max((g - 1.0).abs());
    }
    ok &= worst_dev <= 1e-9;
    detail.push_str(&format!(
        "redirective disjoint per-route gain dev {worst_dev:.2e} (tol 1e-9, beam domain); "
    ));

    // the full multiple-reflection model perturbs the unit gain only mildly
    let geom8 = ArrayGeometry::new(8, 0.5).unwrap();
    let arr8 = CoupledArray::new(geom8).unwrap();
    let vis8 = visible_beams_by_coupling(&arr8);
    let routes8 = [
        RedirectiveRoute::pair(vis8[0], vis8[2]),
        RedirectiveRoute::pair(vis8[4], vis8[6]),
    ];
    let combined8 = combine_redirective(&routes8, geom8.elements()).unwrap();
    let single8 = LoadConfig::switched_pair(vis8[0], vis8[2]);
    let din = beam_direction(&geom8, vis8[0]).unwrap();
    let dout = beam_direction(&geom8, vis8[2]).unwrap();
    let g_exact = route_gain(&arr8, &combined8, &single8, din, dout, ScatterModel::Exact).unwrap();
    ok &= (g_exact - 1.0).abs() < 0.01;
    detail.push_str(&format!(
        "exact-model spot check dev {:.2e} (tol 1e-2); ",
        (g_exact - 1.0).abs()
    ));

    // reflective sharing at M = 256
    let geom16 = ArrayGeometry::new(16, 0.5).unwrap();
    let arr16 = CoupledArray::new(geom16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &k in &[2usize, 4] {
        let draws = 200;
        let mut mean_gain = 0.0;
        for _ in 0..draws {
            let links: Vec<((f64, f64), (f64, f64))> = (0..k)
                .map(|_| (random_angle_capped(&mut rng), random_angle_capped(&mut rng)))
                .collect();
            let per_route: Vec<Vec<f64>> = links
                .iter()
                .map(|&(din, dout)| steering_phases(&arr16, din, dout).unwrap())
                .collect();
            let shared = LoadConfig::Phased {
                phases: combine_reflective(&per_route).unwrap(),
            };
            for (i, &(din, dout)) in links.iter().enumerate() {
                let dedicated = LoadConfig::Phased {
                    phases: per_route[i].clone(),
                };
                mean_gain +=
                    route_gain(&arr16, &shared, &dedicated, din, dout, ScatterModel::Naive)
                        .unwrap();
            }
        }
        mean_gain /= (draws * k) as f64;
        let lo = 0.7 / k as f64;
        let hi = 1.3 / k as f64;
        ok &= mean_gain >= lo && mean_gain <= hi;
        detail.push_str(&format!(
            "reflective K={k}: mean gain {mean_gain:.4} ∈ [{lo:.3}, {hi:.3}]; "
        ));
    }
    CheckOutcome::new("c7", "multi-route gains", ok, detail)
}

/// c8: retro estimation keeps the full aperture gain: noiseless exactness,
/// the σ²/(M²T) against σ²/(MT) error laws, and the gain ratio growing
/// linearly in `M`.
pub fn estimation_scaling(seed: u64) -> CheckOutcome {
    let mut ok = true;
    let mut detail = String::new();

    // noiseless recovery
    let m = 64;
    let ch = SparseAngularChannel::random(m, 4, seed).unwrap();
    let sched = make_probe_schedule(m, m, ProbeKind::Orthogonal, 0).unwrap();
    let y = retro_measure(&ch, &sched, 0.0, 0).unwrap();
    let q_hat = retro_recover(&y, &sched).unwrap();
    let exact_err = (q_hat - ch.beam().map(|x| x * x)).norm();
    ok &= exact_err <= 1e-12;
    detail.push_str(&format!("noiseless recovery error {exact_err:.2e} (tol 1e-12); "));

    // error-law slopes over an SNR sweep at M = T = 64
    let snrs = [0.01, 0.1, 1.0, 10.0, 100.0];
    let report = estimation::compare_estimators(m, 4, &snrs, 150, seed).unwrap();
    let log_sigma2: Vec<f64> = snrs.iter().map(|s| (1.0 / s).ln()).collect();
    let retro_slope = fit_slope(
        &log_sigma2,
        &report.rows.iter().map(|r| r.1.ln()).collect::<Vec<_>>(),
    );
    let casc_slope = fit_slope(
        &log_sigma2,
        &report.rows.iter().map(|r| r.2.ln()).collect::<Vec<_>>(),
    );
    ok &= (retro_slope - 1.0).abs() <= 0.1 && (casc_slope - 1.0).abs() <= 0.1;
    let mt = (m * m * m) as f64; // M² T at T = M
    let retro_const = report.rows[2].1 * snrs[2] * mt;
    let casc_const = report.rows[2].2 * snrs[2] * (m * m) as f64;
    detail.push_str(&format!(
        "slopes vs σ²: retro {retro_slope:.3}, cascaded {casc_slope:.3} (tol ±0.1); error constants ×(M²T), ×(MT): {retro_const:.2}, {casc_const:.2}; "
    ));

    // ratio grows like M
    let sizes = [16usize, 64, 256];
    let mut log_m = Vec::new();
    let mut log_ratio = Vec::new();
    for (i, &mi) in sizes.iter().enumerate() {
        let rep = estimation::compare_estimators(mi, 4.min(mi), &[1.0], 120, seed + i as u64)
            .unwrap();
        let ratio = rep.rows[0].3.unwrap();
        log_m.push((mi as f64).ln());
        log_ratio.push(ratio.ln());
    }
    let ratio_slope = fit_slope(&log_m, &log_ratio);
    ok &= (ratio_slope - 1.0).abs() <= 0.2;
    detail.push_str(&format!(
        "gain-ratio log-log slope over M∈{{16,64,256}}: {ratio_slope:.3} (tol 1 ± 0.2)"
    ));
    CheckOutcome::new("c8", "estimation scaling", ok, detail)
}

fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

fn matrix_sqrt(arr: &CoupledArray) -> DMatrix<C64> {
    let u = arr.eigen_basis();
    let lam = arr.eigenvalues();
    let sqrt = DVector::from_iterator(lam.len(), lam.iter().map(|l| l.max(0.0).sqrt()));
    let mut s = u.clone();
    for (j, v) in sqrt.iter().enumerate() {
        s.column_mut(j).scale_mut(*v);
    }
    (s * u.transpose()).map(|x| C64::new(x, 0.0))
}

fn random_phased(rng: &mut ChaCha8Rng, m: usize) -> LoadConfig {
    LoadConfig::Phased {
        phases: (0..m)
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect(),
    }
}

fn random_angle(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let t = rng.random_range(0.0..1.0f64).acos();
    let p = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    (t, p)
}

/// Random direction bounded away from grazing, uniform in solid angle.
fn random_angle_capped(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u = rng.random_range(0.0..1.0f64);
    let t = (u.sqrt() * 0.95).asin();
    let p = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    (t, p)
}

/// Visible beam ports sorted by decreasing beam-domain coupling.
fn visible_beams_by_coupling(arr: &CoupledArray) -> Vec<usize> {
    let m = arr.elements();
    let f = dft_matrix(m);
    let b = arr.b().map(|x| C64::new(x, 0.0));
    let beam_gram = f.adjoint() * &b * &f;
    let mut beams: Vec<(usize, f64)> = (0..m)
        .filter(|&bi| beam_direction(arr.geometry(), bi).is_some())
        .map(|bi| (bi, beam_gram[(bi, bi)].re))
        .collect();
    beams.sort_by(|a, b| b.1.total_cmp(&a.1));
    beams.into_iter().map(|(b, _)| b).collect()
}
