//! Reference integrator for convergence checks.
//!
//! Classical RK4 on the full right-hand side
//! `∂_t u = −i(Δu + θμ|u|^{p−1}u + (ΔW/dt)·u)`, with the noise frozen as a
//! potential over the step, taken in 100 substeps per step.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integrator::SolverConfig;
use crate::noise::check_real;
use crate::spectral::{Field, Representation};

pub const ORACLE_SUBSTEPS: usize = 100;
pub const ORACLE_MAX_POINTS: usize = 32;
pub const ORACLE_MAX_DIM: usize = 2;

/// Advances `u` by `dt` with RK4 (`dt/100` substeps); `dw` is the frozen
/// increment over the step (pass a zero field for the deterministic flow).
pub fn oracle_step(u: &Field, dt: f64, dw: &Field, theta: f64, cfg: &SolverConfig) -> Result<Field> {
    let grid = u.grid().clone();
    if grid.points() > ORACLE_MAX_POINTS || grid.dim() > ORACLE_MAX_DIM {
        return Err(Error::Budget(format!(
            "oracle integrator limited to N <= {ORACLE_MAX_POINTS}, d <= {ORACLE_MAX_DIM}; got {}",
            grid.spec()
        )));
    }
    check_real(dw)?;
    let potential: Vec<f64> = dw.values().iter().map(|w| w.re / dt).collect();
    let strength = cfg.mu() * theta;
    let half_power = 0.5 * (cfg.power - 1.0);
    let k2 = grid.k_squared().to_vec();

    let rhs = |v: &[Complex64]| -> Vec<Complex64> {
        let mut lap =
            Field::from_values(&grid, v.to_vec(), Representation::Physical).expect("grid-sized buffer");
        lap.set_repr(Representation::Spectral);
        lap.values_mut().iter_mut().zip(&k2).for_each(|(z, k)| *z *= -k);
        lap.set_repr(Representation::Physical);
        lap.values()
            .iter()
            .zip(v)
            .zip(&potential)
            .map(|((l, z), w)| {
                let nl = strength * z.norm_sqr().powf(half_power);
                let total = l + z * (nl + w);
                Complex64::new(total.im, -total.re)
            })
            .collect()
    };

    let h = dt / ORACLE_SUBSTEPS as f64;
    let mut y = u.physical().into_values();
    let axpy = |y: &[Complex64], a: f64, k: &[Complex64]| -> Vec<Complex64> {
        y.iter().zip(k).map(|(y, k)| y + k * a).collect()
    };
    for _ in 0..ORACLE_SUBSTEPS {
        let k1 = rhs(&y);
        let k2v = rhs(&axpy(&y, 0.5 * h, &k1));
        let k3 = rhs(&axpy(&y, 0.5 * h, &k2v));
        let k4 = rhs(&axpy(&y, h, &k3));
        for i in 0..y.len() {
            y[i] += (k1[i] + 2.0 * k2v[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
        }
    }
    Field::from_values(&grid, y, Representation::Physical)
}
