//! Scattering-parameter models for reconfigurable intelligent surfaces (RIS).
//!
//! The crate builds planar-array coupling and terminal scattering matrices from
//! first principles, evaluates exact and matched-array far-field responses for
//! phased (reflective) and switched-DFT (redirective) terminations, and carries
//! the surrounding link analysis: Fresnel sizing, fractional-bandwidth limits,
//! control-overhead rate models, multi-route combining, and retrodirective
//! channel-estimation simulation.
//!
//! All lengths are expressed in wavelengths (`λ = 1`); frequency enters only
//! through the element spacing `a/λ`. Angles are radians, powers are linear.

pub mod array;
pub mod bessel;
pub mod error;
pub mod estimation;
pub mod grid;
pub mod link;
pub mod routing;
pub mod scattering;
pub mod verify;

pub use array::{
    beam_direction, coupling_matrix, dft_matrix, dft_matrix_2d, effective_area, embedded_pattern,
    scattering_matrix, steering_vector, ArrayGeometry, CoupledArray,
};
pub use error::Error;
pub use grid::AngularGrid;
pub use scattering::{
    exact_transfer, impinging_power, interference_density, noise_density, realize_load, scatter,
    scattered_power, spectral_norm, stability_margin, FarFieldSpectrum, LoadConfig, PlaneWave,
    PlaneWaveSet, ScatterModel,
};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex<f64>;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
