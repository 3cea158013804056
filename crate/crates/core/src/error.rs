//! Error type shared by all modules.

/// Failure modes of model construction and evaluation.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A scalar argument fell outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Array geometry parameters are not physically meaningful.
    #[error("invalid geometry: {0}")]
    Geometry(String),

    /// The requested element pattern is incompatible with passivity.
    #[error("inadmissible pattern: coupling eigenvalue {0} outside [0, 1]")]
    InadmissiblePattern(f64),

    /// A load configuration violates its structural invariants.
    #[error("invalid load configuration: {0}")]
    LoadConfig(String),

    /// Two route specifications claim the same beam port.
    #[error("conflicting routes: ports {0:?} appear in more than one route")]
    RouteConflict(Vec<usize>),

    /// The termination drives the array outside its stable region.
    #[error("unstable configuration: ||S_L S_aa|| = {norm} >= 1 - 1e-9")]
    Unstable {
        /// Spectral norm of the loop matrix.
        norm: f64,
    },

    /// A linear system could not be recovered from the available samples.
    #[error("under-determined recovery: {0}")]
    UnderDetermined(String),

    /// Inputs were structurally valid but mutually inconsistent.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
