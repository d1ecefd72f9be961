//! Split-step evolution of the truncated stochastic NLS, running X¹ norms
//! and stopping-time detection.
//!
//! One Strang step is `L(dt/2) → N → W → L(dt/2)`: a half free flow, the
//! exact nonlinear phase with `θ(x1/R)` frozen at the step start, the exact
//! Stratonovich noise phase `e^{−iΔW}` (both phases merged into a single
//! pointwise multiply), and another half free flow. Every substep preserves
//! the discrete L² norm, so mass is conserved for any noise strength.

mod config;
mod cutoff;
mod state;
mod step;

pub use config::{Criticality, Nonlinearity, SolverConfig, Splitting};
pub use cutoff::{theta_eval, CutoffSpec};
pub use state::{SnapshotNorms, TrajectoryState, STRICHARTZ_EXPONENT};
pub use step::{
    noise_phase_step, nonlinear_phase_step, steps_for, strang_step, Control, Integrator, Observer, StepInfo,
    StopReason, TrajectoryOutcome, RESOLUTION_THRESHOLD,
};

#[cfg(test)]
mod tests;
