//! Two truncated runs on the same noise stream with radii `R` and `2R`: the
//! fields coincide up to `τ_R`, and `τ_2R ≥ τ_R`.

use snls::initial::InitialData;
use snls::integrator::{Control, CutoffSpec, Integrator, Observer, SolverConfig, StepInfo, TrajectoryState};
use snls::noise::{NoiseSpec, RngStream};
use snls::spectral::{Field, Grid, GridSpec};

#[derive(Default)]
struct Snapshots(Vec<(f64, Field)>);

impl Observer for Snapshots {
    fn on_step(&mut self, state: &TrajectoryState, _info: &StepInfo) -> Control {
        self.0.push((state.t(), state.field().clone()));
        Control::Continue
    }
}

fn main() -> snls::Result<()> {
    let grid = Grid::new(GridSpec::new(1, 64, 10.0)?)?;
    let noise = NoiseSpec::gaussian(2.0, 0.5);
    let u0 = InitialData::gaussian(1.3, 1.0).build(&grid)?;
    let radius = 6.0;

    let mut runs = Vec::new();
    for r in [radius, 2.0 * radius] {
        let cfg = SolverConfig::new(1e-4).with_power(7.0).with_truncation(r);
        let integ = Integrator::new(&grid, cfg, &noise, CutoffSpec::default())?;
        let mut state = integ.initial_state(&u0)?;
        let mut snaps = Snapshots::default();
        let out = integ.evolve(&mut state, &mut RngStream::for_trajectory(1, 0, 0), 0.4, &mut snaps)?;
        println!("R = {r:>4}: tau = {:?}, stop = {:?}, x1 = {:.3}", out.tau, out.stop, out.x1);
        runs.push((snaps, out));
    }
    let tau = runs[0].1.tau.unwrap_or(f64::INFINITY);
    let gap = runs[0]
        .0
         .0
        .iter()
        .zip(&runs[1].0 .0)
        .take_while(|((t, _), _)| *t <= tau)
        .map(|((_, a), (_, b))| a.max_abs_diff(b))
        .fold(0.0, f64::max);
    println!("sup |u_R - u_2R| before tau_R: {gap:e}");
    Ok(())
}
