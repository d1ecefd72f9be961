//! Strong convergence of the split-step scheme on frozen noise paths.

use serde::{Deserialize, Serialize};

use super::oracle::oracle_step;
use super::report::{linear_fit, ProbeReport};
use crate::error::{domain, Error, Result};
use crate::initial::InitialData;
use crate::integrator::CutoffSpec;
use crate::integrator::{Integrator, Nonlinearity, SolverConfig, Splitting};
use crate::noise::{NoiseIncrement, NoiseSampler, NoiseSpec, RngStream};
use crate::spectral::{Field, Grid, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceReference {
    /// Split-step run on the finest path.
    FinestSplit,
    /// RK4 oracle on the finest path (small grids only).
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub grid: GridSpec,
    pub initial: InitialData,
    pub noise: NoiseSpec,
    pub power: f64,
    pub nonlinearity: Nonlinearity,
    pub splitting: Splitting,
    pub horizon: f64,
    /// Coarsest step.
    pub dt: f64,
    /// Number of step sizes `dt, dt/2, …`.
    pub levels: u32,
    /// The reference runs at `dt / refinement`.
    pub refinement: u32,
    pub paths: usize,
    pub reference: ConvergenceReference,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec { dim: 1, points: 64, length: 16.0 },
            initial: InitialData::gaussian(1.0, 1.0),
            noise: NoiseSpec::gaussian(2.0, 0.5).with_modes(vec![vec![1]]),
            power: 3.0,
            nonlinearity: Nonlinearity::Focusing,
            splitting: Splitting::Strang,
            horizon: 0.5,
            dt: 0.05,
            levels: 4,
            refinement: 64,
            paths: 4,
            reference: ConvergenceReference::FinestSplit,
        }
    }
}

fn coarsen(path: &[NoiseIncrement], factor: usize) -> Vec<NoiseIncrement> {
    path.chunks(factor).map(|c| c[1..].iter().fold(c[0].clone(), |acc, inc| acc.concat(inc))).collect()
}

fn run_split(grid: &Grid, cfg: &SolverConfig, u0: &Field, path: &[NoiseIncrement]) -> Result<Field> {
    let integ = Integrator::new(grid, cfg.clone(), &NoiseSpec::none(), CutoffSpec::default())?;
    let mut state = integ.initial_state(u0)?;
    let out = integ.evolve_on_path(&mut state, path, &mut ())?;
    if out.steps as usize != path.len() {
        return Err(domain(format!(
            "run stopped after {} of {} steps ({:?})",
            out.steps,
            path.len(),
            out.stop
        )));
    }
    Ok(state.field().clone())
}

/// Runs the sweep and reports RMS (over paths) final-time L² errors and the
/// fitted slope of `log error` against `log dt`.
pub fn convergence_probe(cfg: &ConvergenceConfig, seed: u64) -> Result<ProbeReport> {
    if cfg.levels < 2 || !cfg.refinement.is_power_of_two() || cfg.refinement < 2u32.pow(cfg.levels) {
        return Err(domain(format!(
            "refinement {} must be a power of two of at least 2^levels = {}",
            cfg.refinement,
            2u32.pow(cfg.levels)
        )));
    }
    if cfg.paths == 0 {
        return Err(domain("need at least one path"));
    }
    let steps = crate::integrator::steps_for(cfg.horizon, cfg.dt);
    if ((steps as f64) * cfg.dt - cfg.horizon).abs() > 1e-9 * cfg.horizon {
        return Err(domain("horizon must be a multiple of dt"));
    }
    let grid = Grid::new(cfg.grid)?;
    let u0 = cfg.initial.build(&grid)?;
    let fine_dt = cfg.dt / cfg.refinement as f64;
    let fine_steps = steps as usize * cfg.refinement as usize;
    let sampler = NoiseSampler::new(&cfg.noise, &grid)?;
    let solver = |dt: f64| {
        SolverConfig::new(dt)
            .with_power(cfg.power)
            .with_nonlinearity(cfg.nonlinearity)
            .with_splitting(cfg.splitting)
    };

    let dts: Vec<f64> = (0..cfg.levels).map(|j| cfg.dt / 2f64.powi(j as i32)).collect();
    let mut sq_err = vec![0.0; dts.len()];
    for path_index in 0..cfg.paths {
        let mut rng = RngStream::new(seed, path_index as u64);
        let fine: Vec<NoiseIncrement> =
            (0..fine_steps).map(|_| sampler.sample(fine_dt, &mut rng)).collect::<Result<_>>()?;
        let reference = match cfg.reference {
            ConvergenceReference::FinestSplit => run_split(&grid, &solver(fine_dt), &u0, &fine)?,
            ConvergenceReference::Oracle => {
                let scfg = solver(fine_dt);
                let mut u = u0.clone();
                for inc in &fine {
                    u = oracle_step(&u, fine_dt, inc.field(), 1.0, &scfg)?;
                }
                u
            }
        };
        for (j, &dt) in dts.iter().enumerate() {
            let factor = cfg.refinement as usize >> j;
            let path = coarsen(&fine, factor);
            let u = run_split(&grid, &solver(dt), &u0, &path)?;
            let mut diff = u.physical();
            let r = reference.physical();
            diff.values_mut().iter_mut().zip(r.values()).for_each(|(a, b)| *a -= b);
            sq_err[j] += diff.stored_l2_norm().powi(2);
        }
    }
    let errors: Vec<f64> = sq_err.iter().map(|s| (s / cfg.paths as f64).sqrt()).collect();
    if errors.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::Domain(format!("degenerate error sequence {errors:?}")));
    }
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let (slope, _) = linear_fit(&xs, &ys);

    let mut report = ProbeReport::new("convergence");
    report.input("config", cfg).input("seed", seed);
    for (dt, e) in dts.iter().zip(&errors) {
        report.value(&format!("error(dt={dt})"), *e);
    }
    report.value("slope", slope);
    report.check_holds("error slope >= 0.5", slope, slope >= 0.5);
    report.plot_columns = ["log_dt".into(), "log_error".into()];
    report.plot = xs.into_iter().zip(ys).map(|(x, y)| [x, y]).collect();
    Ok(report)
}
