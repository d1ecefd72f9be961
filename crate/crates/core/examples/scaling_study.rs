//! Crossing probabilities `P(τ_R ≤ T)` over a geometric ladder of horizons
//! and the fit `ln p = a − c T^{−β}` with `β` fixed at 1/4 and free.
//!
//! Usage: `cargo run --release --example scaling_study [trajectories] [workers]`

use snls::initial::InitialData;
use snls::integrator::{CutoffSpec, SolverConfig};
use snls::montecarlo::{fit_estimates, geometric_ladder, run_ensemble, EnsembleConfig, FitOptions};
use snls::noise::NoiseSpec;
use snls::spectral::GridSpec;

fn main() -> snls::Result<()> {
    let mut args = std::env::args().skip(1);
    let trajectories = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let workers = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let cfg = EnsembleConfig {
        grid: GridSpec::new(1, 64, 10.0)?,
        solver: SolverConfig::new(1e-4).with_power(7.0).with_truncation(6.0),
        noise: NoiseSpec::gaussian(2.0, 0.5),
        cutoff: CutoffSpec::default(),
        initial: InitialData::gaussian(1.3, 1.0),
        trajectories,
        horizons: geometric_ladder(0.2, 0.88, 6)?,
        nested: true,
        seed: 5,
        workers,
        t0: None,
    };
    let result = run_ensemble(&cfg)?;
    println!("{:>8} {:>6} {:>8} {:>18}", "T", "hits", "p_hat", "95% interval");
    for e in &result.estimates {
        println!("{:>8.4} {:>6} {:>8.4} [{:.4}, {:.4}]", e.horizon, e.successes, e.p_hat, e.lo, e.hi);
    }
    for opts in [FitOptions::fixed(0.25), FitOptions { bootstrap: 200, ..FitOptions::free() }] {
        match fit_estimates(&result.estimates, &opts) {
            Ok(f) => println!(
                "beta {} : a = {:.4}, c = {:.4}, beta = {:.4}, bootstrap = {:?}",
                if f.beta_fixed { "fixed" } else { "free " },
                f.a,
                f.c,
                f.beta,
                f.bootstrap
            ),
            Err(e) => println!("fit failed: {e}"),
        }
    }
    Ok(())
}
