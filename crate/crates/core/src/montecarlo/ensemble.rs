use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::interval::ProbabilityEstimate;
use crate::error::{domain, Error, Result};
use crate::initial::InitialData;
use crate::integrator::{CutoffSpec, Integrator, SolverConfig, TrajectoryOutcome};
use crate::noise::{NoiseSpec, RngStream};
use crate::spectral::{Grid, GridSpec};

/// `count` horizons `t_max, t_max·ratio, …` with `0 < ratio < 1`.
pub fn geometric_ladder(t_max: f64, ratio: f64, count: usize) -> Result<Vec<f64>> {
    if !(t_max > 0.0 && ratio > 0.0 && ratio < 1.0) || count == 0 {
        return Err(domain(format!(
            "geometric ladder needs t_max > 0, 0 < ratio < 1, count >= 1 (got {t_max}, {ratio}, {count})"
        )));
    }
    Ok((0..count).map(|j| t_max * ratio.powi(j as i32)).collect())
}

fn default_nested() -> bool {
    true
}

fn default_workers() -> usize {
    1
}

/// Everything needed to run `trajectories` independent copies per horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub grid: GridSpec,
    pub solver: SolverConfig,
    pub noise: NoiseSpec,
    #[serde(default)]
    pub cutoff: CutoffSpec,
    pub initial: InitialData,
    /// Trajectories per cell `M`.
    pub trajectories: u32,
    /// Strictly decreasing horizons `T_1 > … > T_m`.
    pub horizons: Vec<f64>,
    /// Reuse one run to `T_1` for every horizon.
    #[serde(default = "default_nested")]
    pub nested: bool,
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Smallness budget `T_0`; only checked against `T_1` with a warning.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.solver.validate()?;
        self.noise.validate()?;
        self.cutoff.validate()?;
        if self.trajectories == 0 {
            return Err(domain("need at least one trajectory per cell"));
        }
        if self.horizons.is_empty() || self.horizons.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(domain(format!("horizons must be positive, got {:?}", self.horizons)));
        }
        if self.horizons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(domain(format!("horizons must be strictly decreasing, got {:?}", self.horizons)));
        }
        if self.workers == 0 {
            return Err(domain("worker count must be at least 1"));
        }
        if !self.solver.radius.is_finite() {
            return Err(domain("an ensemble needs a finite radius R"));
        }
        Ok(())
    }

    /// Regime conditions that the analysis assumes but the runner does not enforce.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(t0) = self.t0 {
            if self.horizons[0] > t0 {
                out.push(format!("largest horizon {} exceeds the budget T_0 = {t0}", self.horizons[0]));
            }
        }
        out
    }
}

/// One line of the per-trajectory table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub cell: u32,
    pub index: u32,
    /// Stream index `(cell << 32) | index` under the root seed.
    pub stream: u64,
    pub hit: bool,
    pub tau: Option<f64>,
    pub final_t: f64,
    pub sup_h1: f64,
    pub int_w8: f64,
    pub x1: f64,
    pub resolution_flag: bool,
    pub steps: u64,
    /// Error message when the trajectory could not be completed.
    pub failure: Option<String>,
}

impl TrajectoryRow {
    pub const HEADER: &'static str =
        "cell,index,stream,hit,tau_R,final_t,sup_h1,int_w8,x1,resolution_flag,steps,failure";

    fn from_result(cell: u32, index: u32, result: Result<TrajectoryOutcome>) -> Self {
        let stream = RngStream::for_trajectory(0, cell, index).index();
        match result {
            Ok(o) => Self {
                cell,
                index,
                stream,
                hit: o.hit,
                tau: o.tau,
                final_t: o.final_t,
                sup_h1: o.sup_h1,
                int_w8: o.int_w8,
                x1: o.x1,
                resolution_flag: o.resolution_flag,
                steps: o.steps,
                failure: None,
            },
            Err(e) => Self {
                cell,
                index,
                stream,
                hit: false,
                tau: None,
                final_t: f64::NAN,
                sup_h1: f64::NAN,
                int_w8: f64::NAN,
                x1: f64::NAN,
                resolution_flag: false,
                steps: 0,
                failure: Some(e.to_string()),
            },
        }
    }

    pub fn hit_by(&self, t: f64) -> bool {
        self.tau.is_some_and(|tau| tau <= t + 1e-12 * t.abs().max(1.0))
    }

    pub fn to_csv(&self) -> String {
        let tau = self.tau.map_or_else(|| "inf".to_string(), |t| format!("{t:e}"));
        format!(
            "{},{},{},{},{},{:e},{:e},{:e},{:e},{},{},{}",
            self.cell,
            self.index,
            self.stream,
            self.hit,
            tau,
            self.final_t,
            self.sup_h1,
            self.int_w8,
            self.x1,
            self.resolution_flag,
            self.steps,
            self.failure.as_deref().unwrap_or("").replace(',', ";")
        )
    }
}

/// Output of [`run_ensemble`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleResult {
    pub estimates: Vec<ProbabilityEstimate>,
    pub trajectories: Vec<TrajectoryRow>,
    pub warnings: Vec<String>,
}

impl EnsembleResult {
    pub fn complete(&self) -> bool {
        self.estimates.iter().all(|e| !e.incomplete)
    }

    pub fn write_trajectories(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{}", TrajectoryRow::HEADER)?;
        for row in &self.trajectories {
            writeln!(out, "{}", row.to_csv())?;
        }
        Ok(())
    }
}

fn run_cell(
    integ: &Integrator,
    u0: &crate::spectral::Field,
    seed: u64,
    cell: u32,
    trajectories: u32,
    horizon: f64,
) -> Vec<TrajectoryRow> {
    (0..trajectories)
        .into_par_iter()
        .map(|index| {
            let mut rng = RngStream::for_trajectory(seed, cell, index);
            let result = integ
                .initial_state(u0)
                .and_then(|mut state| integ.evolve(&mut state, &mut rng, horizon, &mut ()));
            TrajectoryRow::from_result(cell, index, result)
        })
        .collect()
}

fn estimate(horizon: f64, rows: &[&TrajectoryRow], trajectories: u32) -> Result<ProbabilityEstimate> {
    let done: Vec<&&TrajectoryRow> = rows.iter().filter(|r| r.failure.is_none()).collect();
    let successes = done.iter().filter(|r| r.hit_by(horizon)).count() as u64;
    let unresolved =
        done.iter().filter(|r| r.resolution_flag && !r.hit_by(horizon) && r.final_t <= horizon).count()
            as u64;
    if done.is_empty() {
        return Err(Error::Budget(format!("every trajectory of the horizon {horizon} cell failed")));
    }
    let mut e = ProbabilityEstimate::new(horizon, successes, done.len() as u64)?;
    e.incomplete = done.len() < trajectories as usize;
    e.unresolved = unresolved;
    Ok(e)
}

/// Estimates `P(τ_R ≤ T)` for every horizon of the ladder.
///
/// Trajectory `i` of cell `c` uses the stream `(seed, c, i)`; with a nested
/// ladder only cell 0 is simulated (to `T_1`) and every horizon counts
/// crossings of the same trajectories, so the counts are exactly monotone.
/// Trajectories that fail with an error mark their cells incomplete.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleResult> {
    cfg.validate()?;
    let grid = Grid::new(cfg.grid)?;
    let integ = Integrator::new(&grid, cfg.solver.clone(), &cfg.noise, cfg.cutoff)?;
    let u0 = cfg.initial.build(&grid)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| domain(format!("cannot start {} workers: {e}", cfg.workers)))?;

    let m = cfg.trajectories;
    let (rows, estimates) = pool.install(|| -> Result<_> {
        if cfg.nested {
            let rows = run_cell(&integ, &u0, cfg.seed, 0, m, cfg.horizons[0]);
            let refs: Vec<&TrajectoryRow> = rows.iter().collect();
            let estimates =
                cfg.horizons.iter().map(|&t| estimate(t, &refs, m)).collect::<Result<Vec<_>>>()?;
            Ok((rows, estimates))
        } else {
            let mut rows = Vec::new();
            let mut estimates = Vec::new();
            for (cell, &t) in cfg.horizons.iter().enumerate() {
                let cell_rows = run_cell(&integ, &u0, cfg.seed, cell as u32, m, t);
                let refs: Vec<&TrajectoryRow> = cell_rows.iter().collect();
                estimates.push(estimate(t, &refs, m)?);
                rows.extend(cell_rows);
            }
            Ok((rows, estimates))
        }
    })?;
    Ok(EnsembleResult { estimates, trajectories: rows, warnings: cfg.warnings() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::Nonlinearity;

    fn base(radius: f64) -> EnsembleConfig {
        EnsembleConfig {
            grid: GridSpec { dim: 1, points: 32, length: 16.0 },
            solver: SolverConfig::new(1e-3).with_truncation(radius),
            noise: NoiseSpec::gaussian(2.0, 0.5),
            cutoff: CutoffSpec::default(),
            initial: InitialData::gaussian(1.0, 1.0),
            trajectories: 8,
            horizons: vec![0.02, 0.01],
            nested: true,
            seed: 5,
            workers: 1,
            t0: None,
        }
    }

    #[test]
    fn radius_below_initial_norm_always_hits() {
        let r = run_ensemble(&base(0.5)).unwrap();
        for e in &r.estimates {
            assert_eq!(e.successes, e.trials);
            assert_eq!(e.p_hat, 1.0);
        }
        assert!(r.trajectories.iter().all(|t| t.tau == Some(0.0)));
    }

    #[test]
    fn deterministic_defocusing_never_hits() {
        let mut cfg = base(1e6);
        cfg.noise = NoiseSpec::none();
        cfg.solver.nonlinearity = Nonlinearity::Defocusing;
        cfg.initial = InitialData::gaussian(0.1, 1.0);
        let r = run_ensemble(&cfg).unwrap();
        for e in &r.estimates {
            assert_eq!(e.successes, 0);
            assert!((e.hi - (1.0 - 0.025f64.powf(1.0 / 8.0))).abs() < 1e-15);
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut cfg = base(4.0);
        cfg.initial = InitialData::gaussian(1.2, 1.0);
        cfg.trajectories = 6;
        let one = run_ensemble(&cfg).unwrap();
        cfg.workers = 4;
        let four = run_ensemble(&cfg).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn unnested_cells_use_distinct_streams() {
        let mut cfg = base(4.0);
        cfg.nested = false;
        let r = run_ensemble(&cfg).unwrap();
        assert_eq!(r.trajectories.len(), 16);
        assert_eq!(r.trajectories[8].stream, 1u64 << 32);
    }

    #[test]
    fn budget_failures_mark_cells_incomplete() {
        let mut cfg = base(4.0);
        cfg.solver.max_steps = 5;
        let err = run_ensemble(&cfg).unwrap_err();
        assert!(matches!(err, Error::Budget(_)));
    }

    #[test]
    fn ladder_validation() {
        let mut cfg = base(4.0);
        cfg.horizons = vec![0.01, 0.02];
        assert!(run_ensemble(&cfg).is_err());
        assert_eq!(geometric_ladder(1.0, 0.5, 3).unwrap(), vec![1.0, 0.5, 0.25]);
        assert!(geometric_ladder(1.0, 1.5, 3).is_err());
    }

    #[test]
    fn budget_warning() {
        let mut cfg = base(4.0);
        cfg.t0 = Some(0.001);
        assert_eq!(cfg.warnings().len(), 1);
    }
}
