//! Scenario configuration: schema, validation, hashing.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Which analysis a scenario runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkflowKind {
    Coupling,
    Scatter,
    Bandwidth,
    Overhead,
    Routing,
    Estimate,
}

impl WorkflowKind {
    /// Default output stem.
    pub fn stem(&self) -> &'static str {
        match self {
            WorkflowKind::Coupling => "coupling",
            WorkflowKind::Scatter => "scatter",
            WorkflowKind::Bandwidth => "bandwidth",
            WorkflowKind::Overhead => "overhead",
            WorkflowKind::Routing => "routing",
            WorkflowKind::Estimate => "estimate",
        }
    }
}

/// Top-level scenario file. Exactly the section named by `workflow` must be
/// present; unknown keys are rejected everywhere.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Selected analysis.
    pub workflow: WorkflowKind,
    /// Base random seed; overridable from the command line.
    #[serde(default)]
    pub seed: u64,
    /// Output file stem, defaulting to the workflow name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scatter: Option<ScatterParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<BandwidthParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overhead: Option<OverheadConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub routing: Option<RoutingParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateParams>,
}

impl ScenarioConfig {
    /// Check section/workflow consistency.
    pub fn validate(&self) -> Result<(), String> {
        let sections = [
            ("coupling", self.coupling.is_some()),
            ("scatter", self.scatter.is_some()),
            ("bandwidth", self.bandwidth.is_some()),
            ("overhead", self.overhead.is_some()),
            ("routing", self.routing.is_some()),
            ("estimate", self.estimate.is_some()),
        ];
        let expected = self.workflow.stem();
        for (name, present) in sections {
            if name == expected && !present {
                return Err(format!("workflow '{expected}' needs a '{expected}' section"));
            }
            if name != expected && present {
                return Err(format!(
                    "section '{name}' does not belong to workflow '{expected}'"
                ));
            }
        }
        Ok(())
    }

    /// Output stem.
    pub fn stem(&self) -> String {
        self.output
            .clone()
            .unwrap_or_else(|| self.workflow.stem().to_string())
    }

    /// SHA-256 of the effective configuration (after any seed override).
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Coupling-spectrum analysis of one array geometry.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingParams {
    /// Elements per side.
    pub n_side: usize,
    /// Element spacing in wavelengths.
    pub spacing: f64,
}

/// Far-field scattering of one load and incident set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterParams {
    pub n_side: usize,
    pub spacing: f64,
    pub load: LoadSpec,
    /// Incident plane waves.
    pub incident: Vec<IncidentWave>,
    /// `exact` or `naive`.
    pub model: ModelSpec,
    #[serde(default)]
    pub grid: GridSpec,
}

/// A plane wave in a scenario file; angles in radians.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncidentWave {
    pub theta: f64,
    pub phi: f64,
    #[serde(default = "one")]
    pub amplitude_re: f64,
    #[serde(default)]
    pub amplitude_im: f64,
    /// Angular measure of the sample; defaults to one steradian.
    #[serde(default = "one")]
    pub weight: f64,
}

fn one() -> f64 {
    1.0
}

/// Scattering model selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpec {
    Exact,
    Naive,
}

/// Hemisphere grid sizes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n_theta: 32,
            n_phi: 64,
        }
    }
}

/// Terminal load in a scenario file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadSpec {
    /// Explicit per-element phases.
    Phased(PhasedSpec),
    /// Conjugate-steering phases for one link.
    Steer(SteerSpec),
    /// Beam-port connections behind the DFT front end.
    Switched(SwitchedSpec),
    /// All ports matched.
    Zero,
    /// Amplified inner load.
    Active(ActiveSpec),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhasedSpec {
    pub phases: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteerSpec {
    /// `[theta, phi]` of the incoming link direction.
    pub incident: [f64; 2],
    /// `[theta, phi]` of the outgoing link direction.
    pub outgoing: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchedSpec {
    pub connections: Vec<(usize, usize)>,
    #[serde(default)]
    pub absorbed: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActiveSpec {
    pub gain: f64,
    pub inner: Box<LoadSpec>,
}

/// Fresnel-size and bandwidth-limit sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandwidthParams {
    pub cases: Vec<BandwidthCase>,
}

/// One deployment geometry; angles in radians, lengths in wavelengths.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandwidthCase {
    pub d_tx: f64,
    pub d_rx: f64,
    pub theta_i: f64,
    pub theta_r: f64,
    pub side_len: f64,
}

/// Rate curves over an explicit list of access gains.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverheadConfig {
    pub k: f64,
    pub g_c: f64,
    pub p_t: f64,
    pub b_w: f64,
    pub n_0: f64,
    pub m_b: f64,
    pub b_a: f64,
    pub eta_b: f64,
    pub n_s: f64,
    /// Access gains to evaluate, explicit values only.
    pub m_a_values: Vec<f64>,
}

/// Multi-route gain-sharing Monte Carlo.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoutingParams {
    pub n_side: usize,
    pub spacing: f64,
    /// Route counts to simulate, explicit values only.
    pub k_values: Vec<usize>,
    pub draws: usize,
}

/// Retro-vs-cascaded estimation comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateParams {
    pub m: usize,
    pub sparsity: usize,
    /// Pilot SNR points, explicit values only.
    pub snr_values: Vec<f64>,
    pub trials: usize,
}
