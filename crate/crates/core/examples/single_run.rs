//! One noisy trajectory of the cubic equation in 2D with a diagnostics log
//! written as CSV to stdout.

use snls::diagnostics::DiagnosticsLogger;
use snls::initial::InitialData;
use snls::integrator::{CutoffSpec, Integrator, SolverConfig};
use snls::noise::{NoiseSpec, RngStream};
use snls::spectral::{Grid, GridSpec};

fn main() -> snls::Result<()> {
    let grid = Grid::new(GridSpec::new(2, 64, 20.0)?)?;
    let cfg = SolverConfig::new(2e-3).with_power(3.0);
    println!("# {:?} in d = 2", cfg.criticality(2));
    let integ = Integrator::new(&grid, cfg.clone(), &NoiseSpec::gaussian(1.5, 0.4), CutoffSpec::default())?;
    let u0 = InitialData::gaussian(1.0, 1.5).build(&grid)?;
    let mut state = integ.initial_state(&u0)?;
    let mut log = DiagnosticsLogger::new(&cfg, 25);
    let outcome = integ.evolve(&mut state, &mut RngStream::new(2024, 0), 1.0, &mut log)?;
    log.write_csv(&mut std::io::stdout())?;
    println!("# {outcome:?}");
    Ok(())
}
