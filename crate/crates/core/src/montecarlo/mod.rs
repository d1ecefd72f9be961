//! Ensembles over a ladder of horizons, exact binomial intervals, and the
//! scaling fit `ln p(T) = a − c·T^{−β}`.

mod ensemble;
mod fit;
mod interval;

pub use ensemble::{geometric_ladder, run_ensemble, EnsembleConfig, EnsembleResult, TrajectoryRow};
pub use fit::{
    fit_estimates, fit_scaling, BootstrapIntervals, CellUse, FitOptions, ScalingFit, ScalingPoint,
};
pub use interval::{clopper_pearson, wilson_or_exact_interval, ProbabilityEstimate};
