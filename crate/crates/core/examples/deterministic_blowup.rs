//! Negative-energy Gaussian data for the 1D septic (mass-supercritical)
//! focusing equation without noise: the running X¹ norm crosses ten times its
//! initial H¹ norm in finite time while the variance decreases.

use snls::diagnostics::{energy, DiagnosticsLogger};
use snls::initial::InitialData;
use snls::integrator::{Criticality, CutoffSpec, Integrator, SolverConfig};
use snls::noise::{NoiseSpec, RngStream};
use snls::spectral::{Grid, GridSpec};

fn main() -> snls::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2048);
    let dt: f64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(1e-5);
    let amp: f64 = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(1.6);
    let grid = Grid::new(GridSpec::new(1, n, 20.0)?)?;
    let u0 = InitialData::gaussian(amp, 1.0).build(&grid)?;
    let radius = 10.0 * u0.h1_norm();
    let cfg = SolverConfig::new(dt).with_power(7.0).with_radius(radius);
    assert_eq!(cfg.criticality(1), Criticality::MassSupercritical);
    println!("E(u0) = {:.4}, ||u0||_H1 = {:.4}, R = {radius:.3}", energy(&u0, &cfg), u0.h1_norm());

    let integ = Integrator::new(&grid, cfg.clone(), &NoiseSpec::none(), CutoffSpec::default())?;
    let mut state = integ.initial_state(&u0)?;
    let mut log = DiagnosticsLogger::new(&cfg, 500);
    let t0 = std::time::Instant::now();
    let out = integ.evolve(&mut state, &mut RngStream::new(0, 0), 2.0, &mut log)?;
    println!("outcome: {out:?} in {:?}", t0.elapsed());
    for row in log.rows.iter().step_by((log.rows.len() / 12).max(1)) {
        println!(
            "t={:.5} var={:.5} h1={:.3} x1={:.3} tail={:.2e} E={:.4}",
            row.t, row.variance, row.h1, row.x1, row.tail_fraction, row.energy
        );
    }
    Ok(())
}
