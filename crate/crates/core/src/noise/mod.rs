//! Brownian paths on a two-sided time grid and their mollification.
//!
//! A [`BrownianPath`] is the single source of randomness for an experiment.
//! [`MollifiedNoise`] views it at a scale `eps` and exponent `gamma`, yielding
//! the smoothed path `W^eps`, the noise `xi^eps = d/dt W^eps` and its time
//! derivative, all by direct convolution against the kernel and its analytic
//! derivatives.

mod kernel;
mod mollified;
mod path;
mod stats;

pub use kernel::MollifierKernel;
pub use mollified::MollifiedNoise;
pub use path::{sample_brownian, BrownianPath};
pub use stats::{
    empirical_correlation, empirical_variance, pathwise_sup, sup_noise_scaling, sup_noise_scaling_on_paths,
    EnsembleSpec, ScalingFit,
};

/// Largest admissible mollification exponent (exclusive).
pub const GAMMA_MAX: f64 = 2.0 / 3.0;

/// Checks `0 < gamma < 2/3`.
pub fn validate_gamma(gamma: f64) -> crate::Result<()> {
    if !(gamma > 0.0 && gamma < GAMMA_MAX) {
        return Err(crate::error::invalid(
            "gamma",
            format!("requires 0 < gamma < 2/3, got {gamma}"),
        ));
    }
    Ok(())
}
