//! Scenario execution: pure library composition plus a small worker pool.

use crate::config::{
    IncidentWave, LoadSpec, ModelSpec, ScenarioConfig, WorkflowKind,
};
use crate::error::CliError;
use crate::table::{Cell, Metadata, OutputFormat, ResultTable};
use ris_core::array::{ArrayGeometry, CoupledArray};
use ris_core::estimation;
use ris_core::grid::AngularGrid;
use ris_core::link::{
    self, brute_force_gain, log_grid, optimal_gain_redirective, optimal_gain_reflective,
    rate_redirective, rate_reflective, OverheadParams,
};
use ris_core::routing::{combine_reflective, route_gain, steering_phases};
use ris_core::scattering::{
    impinging_power, scatter, scattered_power, LoadConfig, PlaneWave, PlaneWaveSet, ScatterModel,
};
use ris_core::C64;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Everything a run needs besides the parsed configuration.
pub struct RunContext {
    /// Effective seed (command line overrides the file).
    pub seed: u64,
    /// Worker threads for sweep points.
    pub jobs: usize,
    /// Output directory.
    pub out_dir: PathBuf,
    /// Output format.
    pub format: OutputFormat,
}

/// Run one scenario end to end and write its tables; returns written paths.
pub fn run_scenario(cfg: &ScenarioConfig, ctx: &RunContext) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate().map_err(CliError::Config)?;
    let meta = Metadata {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: ctx.seed,
        config_hash: cfg.hash(),
        timestamp: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    let tables = match cfg.workflow {
        WorkflowKind::Coupling => coupling_tables(cfg, &meta)?,
        WorkflowKind::Scatter => scatter_tables(cfg, &meta)?,
        WorkflowKind::Bandwidth => bandwidth_tables(cfg, ctx, &meta)?,
        WorkflowKind::Overhead => overhead_tables(cfg, ctx, &meta)?,
        WorkflowKind::Routing => routing_tables(cfg, ctx, &meta)?,
        WorkflowKind::Estimate => estimate_tables(cfg, ctx, &meta)?,
    };
    let stem = cfg.stem();
    let mut written = Vec::new();
    for table in &tables {
        let file_stem = if table.name.is_empty() {
            stem.clone()
        } else {
            format!("{stem}_{}", table.name)
        };
        let path = table
            .write(&ctx.out_dir, &file_stem, ctx.format)
            .map_err(|e| CliError::Io(e.to_string()))?;
        written.push(path);
    }
    Ok(written)
}

/// Index-ordered parallel map over sweep items.
fn par_map<T, U, F>(items: &[T], jobs: usize, f: F) -> Result<Vec<U>, CliError>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> Result<U, CliError> + Sync,
{
    let jobs = jobs.clamp(1, items.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<U, CliError>>>> =
        items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let out = f(i, &items[i]);
                *slots[i].lock().unwrap() = Some(out);
            });
        }
    });
    // surface errors deterministically, lowest sweep index first
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("worker filled slot"))
        .collect()
}

fn geometry(n_side: usize, spacing: f64) -> Result<ArrayGeometry, CliError> {
    ArrayGeometry::new(n_side, spacing).map_err(CliError::from)
}

fn coupling_tables(cfg: &ScenarioConfig, meta: &Metadata) -> Result<Vec<ResultTable>, CliError> {
    let p = cfg.coupling.as_ref().expect("validated");
    let geom = geometry(p.n_side, p.spacing)?;
    let arr = CoupledArray::new(geom)?;
    let eigenvalues = arr.sorted_eigenvalues();
    let rows = eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| vec![Cell::Int(i as i64), Cell::Float(l)])
        .collect();
    Ok(vec![ResultTable {
        name: String::new(),
        columns: vec!["index".into(), "eigenvalue".into()],
        rows,
        meta: meta.clone(),
    }])
}

fn build_load(
    spec: &LoadSpec,
    coupled: &CoupledArray,
) -> Result<LoadConfig, CliError> {
    Ok(match spec {
        LoadSpec::Phased(p) => LoadConfig::Phased {
            phases: p.phases.clone(),
        },
        LoadSpec::Steer(s) => LoadConfig::Phased {
            phases: steering_phases(
                coupled,
                (s.incident[0], s.incident[1]),
                (s.outgoing[0], s.outgoing[1]),
            )?,
        },
        LoadSpec::Switched(s) => LoadConfig::SwitchedDft {
            connections: s.connections.clone(),
            absorbed: s.absorbed.clone(),
        },
        LoadSpec::Zero => LoadConfig::Zero,
        LoadSpec::Active(a) => LoadConfig::ActiveScaled {
            gain: a.gain,
            inner: Box::new(build_load(&a.inner, coupled)?),
        },
    })
}

fn scatter_tables(cfg: &ScenarioConfig, meta: &Metadata) -> Result<Vec<ResultTable>, CliError> {
    let p = cfg.scatter.as_ref().expect("validated");
    let geom = geometry(p.n_side, p.spacing)?;
    let arr = CoupledArray::new(geom)?;
    let load = build_load(&p.load, &arr)?;
    let grid = AngularGrid::hemisphere(p.grid.n_theta, p.grid.n_phi)?;
    let incident = PlaneWaveSet(
        p.incident
            .iter()
            .map(|w: &IncidentWave| PlaneWave {
                theta: w.theta,
                phi: w.phi,
                amplitude: C64::new(w.amplitude_re, w.amplitude_im),
                weight: w.weight,
            })
            .collect(),
    );
    let model = match p.model {
        ModelSpec::Exact => ScatterModel::Exact,
        ModelSpec::Naive => ScatterModel::Naive,
    };
    let spectrum = scatter(&arr, &load, &incident, &grid, model)?;
    let rows = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(spectrum.values())
        .map(|((&(t, ph), &w), v)| {
            vec![
                Cell::Float(t),
                Cell::Float(ph),
                Cell::Float(w),
                Cell::Float(v.re),
                Cell::Float(v.im),
                Cell::Float(v.norm_sqr()),
            ]
        })
        .collect();
    let summary = ResultTable {
        name: "summary".into(),
        columns: vec!["scattered_power".into(), "impinging_power".into()],
        rows: vec![vec![
            Cell::Float(scattered_power(&spectrum)),
            Cell::Float(impinging_power(&incident)),
        ]],
        meta: meta.clone(),
    };
    Ok(vec![
        ResultTable {
            name: String::new(),
            columns: vec![
                "theta".into(),
                "phi".into(),
                "weight".into(),
                "re".into(),
                "im".into(),
                "power_density".into(),
            ],
            rows,
            meta: meta.clone(),
        },
        summary,
    ])
}

fn bandwidth_tables(
    cfg: &ScenarioConfig,
    ctx: &RunContext,
    meta: &Metadata,
) -> Result<Vec<ResultTable>, CliError> {
    let p = cfg.bandwidth.as_ref().expect("validated");
    let rows = par_map(&p.cases, ctx.jobs, |_, case| {
        let (required, l_max) = link::fresnel_size(case.d_tx, case.d_rx)?;
        let scn = link::GeometryScenario {
            d_tx: case.d_tx,
            d_rx: case.d_rx,
            theta_i: case.theta_i,
            theta_r: case.theta_r,
            side_len: case.side_len,
        };
        let bw_aperture = link::fractional_bandwidth_limit(&scn, false)?;
        let bw_distance = link::fractional_bandwidth_limit(&scn, true)?;
        Ok(vec![
            Cell::Float(case.d_tx),
            Cell::Float(case.d_rx),
            Cell::Float(case.theta_i),
            Cell::Float(case.theta_r),
            Cell::Float(case.side_len),
            Cell::Float(required),
            Cell::Float(l_max),
            Cell::Float(bw_aperture),
            Cell::Float(bw_distance),
        ])
    })?;
    Ok(vec![ResultTable {
        name: String::new(),
        columns: vec![
            "d_tx".into(),
            "d_rx".into(),
            "theta_i".into(),
            "theta_r".into(),
            "side_len".into(),
            "required_size".into(),
            "l_max".into(),
            "fractional_bw_aperture".into(),
            "fractional_bw_distance".into(),
        ],
        rows,
        meta: meta.clone(),
    }])
}

fn overhead_tables(
    cfg: &ScenarioConfig,
    ctx: &RunContext,
    meta: &Metadata,
) -> Result<Vec<ResultTable>, CliError> {
    let p = cfg.overhead.as_ref().expect("validated");
    let base = OverheadParams {
        k: p.k,
        g_c: p.g_c,
        p_t: p.p_t,
        b_w: p.b_w,
        n_0: p.n_0,
        m_b: p.m_b,
        m_a: 1.0,
        b_a: p.b_a,
        eta_b: p.eta_b,
        n_s: p.n_s,
    };
    let rows = par_map(&p.m_a_values, ctx.jobs, |_, &m_a| {
        let params = OverheadParams { m_a, ..base };
        let red = rate_redirective(&params);
        let refl = rate_reflective(&params);
        Ok(vec![
            Cell::Float(m_a),
            Cell::Float(red.rate),
            Cell::Int(red.saturated as i64),
            Cell::Float(refl.rate),
            Cell::Int(refl.saturated as i64),
        ])
    })?;
    let curves = ResultTable {
        name: String::new(),
        columns: vec![
            "m_a".into(),
            "rate_redirective".into(),
            "redirective_saturated".into(),
            "rate_reflective".into(),
            "reflective_saturated".into(),
        ],
        rows,
        meta: meta.clone(),
    };

    let grid_red = log_grid(1.0, link::saturation_gain_redirective(&base), 512);
    let grid_refl = log_grid(1.0, link::saturation_gain_reflective(&base), 512);
    let (brute_red_m, brute_red_rate) = brute_force_gain(rate_redirective, &base, &grid_red)?;
    let (brute_refl_m, brute_refl_rate) = brute_force_gain(rate_reflective, &base, &grid_refl)?;
    let closed_red_m = optimal_gain_redirective(&base);
    let closed_refl_m = optimal_gain_reflective(&base)?;
    let optima_rows = vec![
        vec![
            Cell::Text("redirective".into()),
            Cell::Float(closed_red_m),
            Cell::Float(rate_redirective(&OverheadParams { m_a: closed_red_m, ..base }).rate),
            Cell::Float(brute_red_m),
            Cell::Float(brute_red_rate),
        ],
        vec![
            Cell::Text("reflective".into()),
            Cell::Float(closed_refl_m),
            Cell::Float(rate_reflective(&OverheadParams { m_a: closed_refl_m, ..base }).rate),
            Cell::Float(brute_refl_m),
            Cell::Float(brute_refl_rate),
        ],
    ];
    let optima = ResultTable {
        name: "optima".into(),
        columns: vec![
            "architecture".into(),
            "closed_form_m_a".into(),
            "closed_form_rate".into(),
            "brute_force_m_a".into(),
            "brute_force_rate".into(),
        ],
        rows: optima_rows,
        meta: meta.clone(),
    };
    Ok(vec![curves, optima])
}

fn routing_tables(
    cfg: &ScenarioConfig,
    ctx: &RunContext,
    meta: &Metadata,
) -> Result<Vec<ResultTable>, CliError> {
    let p = cfg.routing.as_ref().expect("validated");
    if p.draws == 0 {
        return Err(CliError::Config("routing needs draws >= 1".into()));
    }
    let geom = geometry(p.n_side, p.spacing)?;
    let arr = CoupledArray::new(geom)?;
    let items: Vec<(usize, usize)> = p
        .k_values
        .iter()
        .flat_map(|&k| (0..p.draws).map(move |d| (k, d)))
        .collect();
    let seed = ctx.seed;
    let rows = par_map(&items, ctx.jobs, |idx, &(k, draw)| {
        if k == 0 {
            return Err(CliError::Config("routing needs k >= 1".into()));
        }
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
            seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
                .wrapping_add(idx as u64),
        );
        let mut random_dir = || {
            let u: f64 = rng.random_range(0.0..1.0);
            (
                (u.sqrt() * 0.95).asin(),
                rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
            )
        };
        let links: Vec<((f64, f64), (f64, f64))> =
            (0..k).map(|_| (random_dir(), random_dir())).collect();
        let per_route: Vec<Vec<f64>> = links
            .iter()
            .map(|&(din, dout)| steering_phases(&arr, din, dout))
            .collect::<Result<_, _>>()?;
        let shared = LoadConfig::Phased {
            phases: combine_reflective(&per_route)?,
        };
        let mut mean = 0.0;
        for (i, &(din, dout)) in links.iter().enumerate() {
            let dedicated = LoadConfig::Phased {
                phases: per_route[i].clone(),
            };
            mean += route_gain(&arr, &shared, &dedicated, din, dout, ScatterModel::Naive)?;
        }
        mean /= k as f64;
        Ok(vec![
            Cell::Int(k as i64),
            Cell::Int(draw as i64),
            Cell::Float(mean),
        ])
    })?;
    Ok(vec![ResultTable {
        name: String::new(),
        columns: vec!["k".into(), "draw".into(), "mean_route_gain".into()],
        rows,
        meta: meta.clone(),
    }])
}

fn estimate_tables(
    cfg: &ScenarioConfig,
    ctx: &RunContext,
    meta: &Metadata,
) -> Result<Vec<ResultTable>, CliError> {
    let p = cfg.estimate.as_ref().expect("validated");
    let seed = ctx.seed;
    let rows = par_map(&p.snr_values, ctx.jobs, |idx, &snr| {
        let report = estimation::compare_estimators(
            p.m,
            p.sparsity,
            &[snr],
            p.trials,
            seed.wrapping_add(idx as u64),
        )?;
        let (snr, mse_r, mse_c, ratio) = report.rows[0];
        Ok(vec![
            Cell::Float(snr),
            Cell::Float(mse_r),
            Cell::Float(mse_c),
            Cell::Float(ratio.unwrap_or(f64::NAN)),
        ])
    })?;
    Ok(vec![ResultTable {
        name: String::new(),
        columns: vec![
            "snr".into(),
            "mse_retro".into(),
            "mse_cascaded".into(),
            "ratio".into(),
        ],
        rows,
        meta: meta.clone(),
    }])
}

/// Run the library verification checks; returns `(all_passed, report_lines)`.
pub fn selftest(seed: u64) -> (bool, Vec<String>) {
    let outcomes = ris_core::verify::run_all(seed);
    let mut ok = true;
    let lines = outcomes
        .iter()
        .map(|o| {
            ok &= o.passed;
            format!(
                "[{}] {} — {}: {}",
                if o.passed { "PASS" } else { "FAIL" },
                o.id,
                o.name,
                o.detail
            )
        })
        .collect();
    (ok, lines)
}

/// Helper shared by tests: write all tables for a parsed config.
pub fn run_from_path(
    config_path: &Path,
    ctx: &RunContext,
    expected: WorkflowKind,
) -> Result<Vec<PathBuf>, CliError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config_path.display())))?;
    let cfg: ScenarioConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", config_path.display())))?;
    if cfg.workflow != expected {
        return Err(CliError::Config(format!(
            "config declares workflow '{}' but the '{}' subcommand was invoked",
            cfg.workflow.stem(),
            expected.stem()
        )));
    }
    let effective = ScenarioConfig { seed: ctx.seed, ..cfg };
    run_scenario(&effective, ctx)
}
