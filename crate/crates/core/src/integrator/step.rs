use num_complex::Complex64;
use serde::Serialize;

use super::config::{SolverConfig, Splitting};
use super::cutoff::CutoffSpec;
use super::state::{max_abs_mode, TrajectoryState};
use crate::error::{contract, Error, Result};
use crate::noise::{check_real, NoiseIncrement, NoiseSampler, NoiseSpec, RngStream};
use crate::spectral::{Field, Grid, Propagator, Representation};

/// Spectral-tail fraction above which a field counts as unresolved.
pub const RESOLUTION_THRESHOLD: f64 = 0.01;

/// `u ← u·exp(−i μ θ |u|^{p−1} dt)`, the exact flow of `i∂_t u = θ μ |u|^{p−1} u`.
pub fn nonlinear_phase_step(u: &Field, dt: f64, theta: f64, cfg: &SolverConfig) -> Field {
    let mut out = u.physical();
    let strength = cfg.mu() * theta * dt;
    if strength != 0.0 {
        let half_power = 0.5 * (cfg.power - 1.0);
        out.values_mut().iter_mut().for_each(|z| {
            let phase = -strength * modulus_power(z.norm_sqr(), half_power);
            *z *= Complex64::from_polar(1.0, phase);
        });
    }
    out
}

/// `u ← u·exp(−iΔW)`, the exact Stratonovich flow of `i∂_t u = u∘Ẇ` for real `W`.
pub fn noise_phase_step(u: &Field, increment: &Field) -> Result<Field> {
    check_real(increment)?;
    if u.grid() != increment.grid() {
        return Err(contract("noise increment lives on a different grid"));
    }
    let mut out = u.physical();
    out.values_mut()
        .iter_mut()
        .zip(increment.values())
        .for_each(|(z, w)| *z *= Complex64::from_polar(1.0, -w.re));
    Ok(out)
}

// (|u|²)^{(p−1)/2} with an integer fast path
#[inline]
fn modulus_power(norm_sqr: f64, half_power: f64) -> f64 {
    if half_power.fract() == 0.0 && half_power <= 16.0 {
        norm_sqr.powi(half_power as i32)
    } else {
        norm_sqr.powf(half_power)
    }
}

/// What happened during one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    /// Cutoff value used for the nonlinearity during the step.
    pub theta: f64,
    pub tail_fraction: f64,
    pub resolution_breach: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Per-step hook for [`Integrator::evolve`].
pub trait Observer {
    fn on_start(&mut self, _state: &TrajectoryState, _theta: f64) {}

    fn on_step(&mut self, _state: &TrajectoryState, _info: &StepInfo) -> Control {
        Control::Continue
    }

    /// Keep integrating after the first crossing `x1 ≥ R`.
    fn continue_after_crossing(&self) -> bool {
        false
    }
}

impl Observer for () {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Horizon,
    Crossing,
    Resolution,
    Observer,
}

/// Summary of one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryOutcome {
    /// `x1 ≥ R` was reached.
    pub hit: bool,
    /// First step time with `x1 ≥ R` (left-endpoint convention, bias ≤ dt).
    pub tau: Option<f64>,
    pub final_t: f64,
    pub sup_h1: f64,
    pub int_w8: f64,
    pub x1: f64,
    /// The spectral tail crossed [`RESOLUTION_THRESHOLD`] or a norm went non-finite.
    pub resolution_flag: bool,
    pub steps: u64,
    pub stop: StopReason,
}

impl TrajectoryOutcome {
    /// `τ_R ≤ t`.
    pub fn hit_by(&self, t: f64) -> bool {
        self.tau.is_some_and(|tau| tau <= t + 1e-12 * t.abs().max(1.0))
    }
}

/// Number of steps of length `dt` needed to reach `horizon`.
pub fn steps_for(horizon: f64, dt: f64) -> u64 {
    let ratio = horizon / dt;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as u64
    } else {
        ratio.ceil() as u64
    }
}

/// Split-step integrator for the (optionally truncated) stochastic NLS.
#[derive(Debug, Clone)]
pub struct Integrator {
    grid: Grid,
    cfg: SolverConfig,
    cutoff: CutoffSpec,
    sampler: NoiseSampler,
    linear: Propagator,
    dealias_mask: Option<Vec<bool>>,
}

impl Integrator {
    pub fn new(grid: &Grid, cfg: SolverConfig, noise: &NoiseSpec, cutoff: CutoffSpec) -> Result<Self> {
        cfg.validate()?;
        cutoff.validate()?;
        let sampler = NoiseSampler::new(noise, grid)?;
        let linear_dt = match cfg.splitting {
            Splitting::Strang => 0.5 * cfg.dt,
            Splitting::Lie => cfg.dt,
        };
        let dealias_mask = cfg.dealias.then(|| {
            let band = grid.points() as f64 / 3.0;
            (0..grid.len()).map(|idx| max_abs_mode(grid, idx) as f64 <= band).collect()
        });
        Ok(Self {
            grid: grid.clone(),
            linear: Propagator::new(grid, linear_dt),
            cfg,
            cutoff,
            sampler,
            dealias_mask,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn cutoff(&self) -> &CutoffSpec {
        &self.cutoff
    }

    pub fn sampler(&self) -> &NoiseSampler {
        &self.sampler
    }

    pub fn initial_state(&self, u0: &Field) -> Result<TrajectoryState> {
        if u0.grid() != &self.grid {
            return Err(contract("initial field lives on a different grid"));
        }
        Ok(TrajectoryState::new(u0.clone()))
    }

    /// `θ(x1/R)` at the current state, or 1 without truncation.
    pub fn theta(&self, state: &TrajectoryState) -> f64 {
        if self.cfg.truncation {
            self.cutoff.eval_unchecked(state.x1() / self.cfg.radius)
        } else {
            1.0
        }
    }

    /// One step with a fresh increment drawn from `rng`.
    pub fn step(&self, state: &mut TrajectoryState, rng: &mut RngStream) -> Result<StepInfo> {
        let increment = self.sampler.sample(self.cfg.dt, rng)?;
        self.step_with_increment(state, &increment)
    }

    /// One step driven by a given increment (must match `dt`).
    pub fn step_with_increment(
        &self,
        state: &mut TrajectoryState,
        increment: &NoiseIncrement,
    ) -> Result<StepInfo> {
        let dt = self.cfg.dt;
        if (increment.dt() - dt).abs() > 1e-12 * dt {
            return Err(contract(format!("increment covers {} but the step is {dt}", increment.dt())));
        }
        let dw = increment.field();
        check_real(dw)?;
        let theta = self.theta(state);

        let mut u = state.u.clone();
        if self.cfg.splitting == Splitting::Strang {
            self.linear_substep(&mut u, false);
        }
        self.phase_substep(&mut u, dw, theta);
        self.linear_substep(&mut u, true);

        state.advance(u, dt);
        let tail_fraction = state.last.tail_fraction;
        let finite = state.x1.is_finite() && state.last.h1.is_finite();
        Ok(StepInfo {
            theta,
            tail_fraction,
            resolution_breach: !finite || tail_fraction > RESOLUTION_THRESHOLD,
        })
    }

    fn linear_substep(&self, u: &mut Field, last: bool) {
        u.set_repr(Representation::Spectral);
        self.linear.apply_spectral(u.values_mut());
        if last {
            if let Some(mask) = &self.dealias_mask {
                u.values_mut()
                    .iter_mut()
                    .zip(mask)
                    .filter(|(_, keep)| !**keep)
                    .for_each(|(z, _)| *z = Complex64::default());
            }
        }
        u.set_repr(Representation::Physical);
    }

    // nonlinear and noise phases merged into one pointwise multiply
    fn phase_substep(&self, u: &mut Field, dw: &Field, theta: f64) {
        let strength = self.cfg.mu() * theta * self.cfg.dt;
        let half_power = 0.5 * (self.cfg.power - 1.0);
        u.values_mut().iter_mut().zip(dw.values()).for_each(|(z, w)| {
            let mut phase = -w.re;
            if strength != 0.0 {
                phase -= strength * modulus_power(z.norm_sqr(), half_power);
            }
            *z *= Complex64::from_polar(1.0, phase);
        });
    }

    /// Integrates until `t ≥ horizon`, the first crossing `x1 ≥ R` (unless the
    /// observer asks to continue), a resolution breach, or an observer stop.
    pub fn evolve(
        &self,
        state: &mut TrajectoryState,
        rng: &mut RngStream,
        horizon: f64,
        observer: &mut dyn Observer,
    ) -> Result<TrajectoryOutcome> {
        self.evolve_with(state, horizon, observer, |integ, s| integ.step(s, rng))
    }

    /// Like [`Integrator::evolve`] with increments taken from a recorded path.
    pub fn evolve_on_path(
        &self,
        state: &mut TrajectoryState,
        path: &[NoiseIncrement],
        observer: &mut dyn Observer,
    ) -> Result<TrajectoryOutcome> {
        let horizon = path.len() as f64 * self.cfg.dt;
        let mut next = path.iter();
        self.evolve_with(state, horizon, observer, |integ, s| {
            let inc = next.next().ok_or_else(|| Error::Budget("noise path exhausted".into()))?;
            integ.step_with_increment(s, inc)
        })
    }

    fn evolve_with(
        &self,
        state: &mut TrajectoryState,
        horizon: f64,
        observer: &mut dyn Observer,
        mut step: impl FnMut(&Self, &mut TrajectoryState) -> Result<StepInfo>,
    ) -> Result<TrajectoryOutcome> {
        if !(horizon > 0.0) {
            return Err(crate::error::domain(format!("horizon must be positive, got {horizon}")));
        }
        let total = steps_for(horizon, self.cfg.dt);
        if total > self.cfg.max_steps {
            return Err(Error::Budget(format!(
                "{total} steps needed for horizon {horizon} at dt {}, budget {}",
                self.cfg.dt, self.cfg.max_steps
            )));
        }
        let radius = self.cfg.radius;
        observer.on_start(state, self.theta(state));

        let mut tau = (state.x1() >= radius).then_some(state.t());
        let mut resolution_flag = false;
        let mut stop = StopReason::Horizon;
        if tau.is_some() && !observer.continue_after_crossing() {
            stop = StopReason::Crossing;
        } else {
            for _ in 0..total {
                let info = step(self, state)?;
                let control = observer.on_step(state, &info);
                if tau.is_none() && state.x1() >= radius {
                    tau = Some(state.t());
                    if !observer.continue_after_crossing() {
                        stop = StopReason::Crossing;
                        break;
                    }
                }
                if info.resolution_breach {
                    resolution_flag = true;
                    stop = StopReason::Resolution;
                    break;
                }
                if control == Control::Stop {
                    stop = StopReason::Observer;
                    break;
                }
            }
        }

        Ok(TrajectoryOutcome {
            hit: tau.is_some(),
            tau,
            final_t: state.t(),
            sup_h1: state.sup_h1(),
            int_w8: state.int_w8(),
            x1: state.x1(),
            resolution_flag,
            steps: state.steps(),
            stop,
        })
    }
}

/// Free-function form of one split step: builds an [`Integrator`] and steps.
pub fn strang_step(
    state: &mut TrajectoryState,
    cfg: &SolverConfig,
    noise: &NoiseSpec,
    cutoff: &CutoffSpec,
    rng: &mut RngStream,
) -> Result<StepInfo> {
    let integ = Integrator::new(state.field().grid(), cfg.clone(), noise, *cutoff)?;
    integ.step(state, rng)
}
