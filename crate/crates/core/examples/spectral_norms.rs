//! Norms of a Gaussian on a periodic grid, checked against closed forms, and
//! the free propagator `S(t)`.
//!
//! For `u = exp(−x²/2)` on the line: `‖u‖₂² = √π` and `‖u'‖₂² = √π/2`.

use snls::initial::InitialData;
use snls::spectral::{Grid, GridSpec};

fn main() -> snls::Result<()> {
    let grid = Grid::new(GridSpec::new(1, 256, 40.0)?)?;
    let u = InitialData::gaussian(1.0, 1.0).build(&grid)?;

    let pi_sqrt = std::f64::consts::PI.sqrt();
    println!("|u|_2^2      = {:.12}  (exact {:.12})", u.lebesgue_norm(2.0)?.powi(2), pi_sqrt);
    println!("|grad u|_2^2 = {:.12}  (exact {:.12})", u.gradient_l2_squared(), pi_sqrt / 2.0);
    println!("|u|_H1       = {:.12}", u.h1_norm());
    println!("|u|_W1,12/5  = {:.12}", u.sobolev_w1p_norm(12.0 / 5.0)?);
    println!("|u|_inf      = {:.12}", u.lebesgue_norm(f64::INFINITY)?);

    for t in [0.5, 1.0, 2.0] {
        let v = u.free_propagate(t);
        println!(
            "t = {t}: |S(t)u|_2 - |u|_2 = {:+.1e}, |S(t)u|_inf = {:.6} (exact {:.6})",
            v.lebesgue_norm(2.0)? - u.lebesgue_norm(2.0)?,
            v.lebesgue_norm(f64::INFINITY)?,
            (1.0 + 4.0 * t * t).powf(-0.25),
        );
    }
    let back = u.free_propagate(1.3).free_propagate(-1.3);
    println!("S(-t)S(t)u - u = {:.1e}", back.max_abs_diff(&u));
    Ok(())
}
