//! Experiment configuration files and the commands behind the `snls` binary.
//!
//! Every command writes a deterministic `summary.json` plus a separate
//! `metadata.json` (timestamp, elapsed time, worker count) into its output
//! directory, so summaries can be compared byte for byte across runs.

mod commands;
mod config;

pub use commands::{
    cmd_ensemble, cmd_fit, cmd_probe, cmd_run_one, cmd_scaling, exit_code, initial_invariants,
    CommandOutcome, Overrides, ProbeName, EXIT_BUDGET, EXIT_CONFIG, EXIT_INCOMPLETE,
};
pub use config::{
    EnsembleSection, ExperimentConfig, FitSection, KhintchineSection, LadderSpec, ProbeSection, RunSection,
};
