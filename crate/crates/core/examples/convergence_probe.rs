//! Strong error of the split-step scheme on frozen noise paths, against the
//! finest split-step run and against the RK4 oracle.

use snls::probes::{convergence_probe, ConvergenceConfig, ConvergenceReference};
use snls::spectral::GridSpec;

fn main() -> snls::Result<()> {
    let split = ConvergenceConfig::default();
    let oracle = ConvergenceConfig {
        grid: GridSpec::new(1, 32, 16.0)?,
        reference: ConvergenceReference::Oracle,
        ..ConvergenceConfig::default()
    };
    for (label, cfg) in [("finest split", split), ("RK4 oracle", oracle)] {
        let report = convergence_probe(&cfg, 11)?;
        println!("reference: {label}");
        for (k, v) in &report.values {
            println!("  {k:<18} {v:.10e}");
        }
    }
    Ok(())
}
