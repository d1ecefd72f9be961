//! Khintchine constants `K_{2,ρ}` and an empirical Rademacher check.

use snls::probes::{khintchine_constant, khintchine_empirical_check};

fn main() -> snls::Result<()> {
    for rho in [2.0, 3.0, 4.0, 6.0, 8.0, 16.0] {
        println!("K({rho:>4}) = {:.10}", khintchine_constant(rho)?);
    }
    let coefficients = vec![vec![1.0], vec![0.6, 0.8], (1..=20).map(|i| 1.0 / i as f64).collect()];
    let report = khintchine_empirical_check(&[2.0, 4.0, 8.0], &coefficients, 100_000, 1)?;
    for c in &report.checks {
        println!("{:<40} measured {:.6} passed {}", c.name, c.measured, c.passed);
    }
    Ok(())
}
