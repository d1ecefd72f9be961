//! Numerical probes of the analytic ingredients behind the blow-up estimate.
//!
//! Every probe returns a [`ProbeReport`] whose reference values carry a
//! [`Provenance`] tag.

mod convergence;
mod convolution;
mod dispersive;
mod khintchine;
pub mod oracle;
mod report;

pub use convergence::{convergence_probe, ConvergenceConfig, ConvergenceReference};
pub use convolution::{
    stochastic_convolution_moment_probe, ConvolutionConfig, MAX_RHO, MIN_CONVOLUTION_SAMPLES,
};
pub use dispersive::{dispersive_decay_probe, gaussian_decay_slope, wrap_around_time, DispersiveConfig};
pub use khintchine::{khintchine_constant, khintchine_empirical_check, MIN_SAMPLES};
pub use oracle::oracle_step;
pub use report::{linear_fit, ProbeCheck, ProbeReport, Provenance};
