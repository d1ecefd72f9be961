//! Conserved and monitored quantities of a trajectory.

use std::io::Write;

use serde::Serialize;

use crate::integrator::{Control, Observer, SolverConfig, StepInfo, TrajectoryState, RESOLUTION_THRESHOLD};
use crate::spectral::{lebesgue_of_values, Field};

/// `M(u) = ‖u‖₂²`.
pub fn mass(u: &Field) -> f64 {
    u.stored_l2_norm().powi(2)
}

/// `E(u) = ½‖∇u‖₂² − μ/(p+1)·‖u‖_{p+1}^{p+1}`, conserved by the deterministic flow.
pub fn energy(u: &Field, cfg: &SolverConfig) -> f64 {
    let kinetic = 0.5 * u.gradient_l2_squared();
    let mu = cfg.mu();
    if mu == 0.0 {
        return kinetic;
    }
    let p1 = cfg.power + 1.0;
    let f = u.physical();
    let potential = lebesgue_of_values(f.values(), p1, u.grid().cell_volume()).powf(p1);
    kinetic - mu / p1 * potential
}

/// `∫|x − x_c|²|u|²` in the box-centred chart (`x_c = L/2` on every axis).
pub fn variance(u: &Field) -> f64 {
    let grid = u.grid();
    let c = grid.center();
    let dim = grid.dim();
    let f = u.physical();
    let sum: f64 = f
        .values()
        .iter()
        .enumerate()
        .map(|(idx, z)| {
            let x = grid.coords(idx);
            let r2: f64 = (0..dim).map(|a| (x[a] - c[a]).powi(2)).sum();
            r2 * z.norm_sqr()
        })
        .sum();
    grid.cell_volume() * sum
}

/// Mass-weighted centre of the field in the box chart.
pub fn centroid(u: &Field) -> [f64; 3] {
    let grid = u.grid();
    let f = u.physical();
    let mut c = [0.0; 3];
    let mut total = 0.0;
    for (idx, z) in f.values().iter().enumerate() {
        let w = z.norm_sqr();
        let x = grid.coords(idx);
        for a in 0..grid.dim() {
            c[a] += w * x[a];
        }
        total += w;
    }
    if total > 0.0 {
        c.iter_mut().for_each(|v| *v /= total);
    }
    c
}

/// Distance from the centroid to the nearest box face; the variance is only
/// meaningful while this stays well above the bump width.
pub fn distance_to_boundary(u: &Field) -> f64 {
    let grid = u.grid();
    let c = centroid(u);
    (0..grid.dim()).map(|a| c[a].min(grid.length() - c[a])).fold(f64::INFINITY, f64::min)
}

/// Fraction of spectral mass in modes with `|m|_∞ > N/3`.
pub fn spectral_tail_fraction(u: &Field) -> f64 {
    crate::integrator::SnapshotNorms::measure(u).tail_fraction
}

/// Whether the field is too rough to trust (tail fraction above 1%).
pub fn is_unresolved(u: &Field) -> bool {
    spectral_tail_fraction(u) > RESOLUTION_THRESHOLD
}

/// One line of a trajectory log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub variance: f64,
    pub h1: f64,
    pub w1_12_5: f64,
    pub x1: f64,
    pub tail_fraction: f64,
    pub theta_value: f64,
}

impl DiagnosticsRow {
    pub const HEADER: &'static str = "t,mass,energy,variance,h1,w1_12_5,x1,tail_fraction,theta_value";

    pub fn measure(state: &TrajectoryState, cfg: &SolverConfig, theta_value: f64) -> Self {
        let u = state.field();
        let norms = state.norms();
        Self {
            t: state.t(),
            mass: mass(u),
            energy: energy(u, cfg),
            variance: variance(u),
            h1: norms.h1,
            w1_12_5: norms.w1p,
            x1: state.x1(),
            tail_fraction: norms.tail_fraction,
            theta_value,
        }
    }

    pub fn is_finite(&self) -> bool {
        [
            self.t,
            self.mass,
            self.energy,
            self.variance,
            self.h1,
            self.w1_12_5,
            self.x1,
            self.tail_fraction,
            self.theta_value,
        ]
        .iter()
        .all(|v| v.is_finite())
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            self.t,
            self.mass,
            self.energy,
            self.variance,
            self.h1,
            self.w1_12_5,
            self.x1,
            self.tail_fraction,
            self.theta_value
        )
    }
}

/// Observer that measures a [`DiagnosticsRow`] every `stride` steps.
pub struct DiagnosticsLogger {
    cfg: SolverConfig,
    stride: u64,
    continue_after_crossing: bool,
    pub rows: Vec<DiagnosticsRow>,
}

impl DiagnosticsLogger {
    pub fn new(cfg: &SolverConfig, stride: u64) -> Self {
        Self { cfg: cfg.clone(), stride: stride.max(1), continue_after_crossing: false, rows: vec![] }
    }

    pub fn continuing_after_crossing(mut self) -> Self {
        self.continue_after_crossing = true;
        self
    }

    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{}", DiagnosticsRow::HEADER)?;
        for row in &self.rows {
            writeln!(out, "{}", row.to_csv())?;
        }
        Ok(())
    }
}

impl Observer for DiagnosticsLogger {
    fn on_start(&mut self, state: &TrajectoryState, theta: f64) {
        self.rows.push(DiagnosticsRow::measure(state, &self.cfg, theta));
    }

    fn on_step(&mut self, state: &TrajectoryState, info: &StepInfo) -> Control {
        if state.steps().is_multiple_of(self.stride) || info.resolution_breach {
            self.rows.push(DiagnosticsRow::measure(state, &self.cfg, info.theta));
        }
        Control::Continue
    }

    fn continue_after_crossing(&self) -> bool {
        self.continue_after_crossing
    }
}
