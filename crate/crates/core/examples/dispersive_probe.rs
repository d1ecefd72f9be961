//! Decay of `‖S(t)u₀‖_{L^{12/5}}` for a 3D Gaussian, below the wrap-around
//! time of the periodic box.

use snls::probes::DispersiveConfig;

fn main() -> snls::Result<()> {
    let report = DispersiveConfig::default().run()?;
    for (k, v) in &report.values {
        println!("{k:<28} {v:.6}");
    }
    for c in &report.checks {
        println!("{:<22} passed = {}", c.name, c.passed);
    }
    println!("{}", report.plot_columns.join(","));
    for [t, n] in &report.plot {
        println!("{t:.4},{n:.6e}");
    }
    Ok(())
}
