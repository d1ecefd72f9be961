use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::Rng;
use serde::Serialize;

use super::config::{ExperimentConfig, KhintchineSection};
use crate::diagnostics::{energy, mass, DiagnosticsLogger, DiagnosticsRow};
use crate::error::{Error, Result};
use crate::integrator::{Criticality, Integrator, TrajectoryOutcome};
use crate::montecarlo::{fit_estimates, run_ensemble, FitOptions, ProbabilityEstimate, ScalingFit};
use crate::noise::RngStream;
use crate::probes::{convergence_probe, khintchine_empirical_check, ConvergenceConfig, ProbeReport};
use crate::spectral::Grid;

/// Exit status for configuration errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for budget errors.
pub const EXIT_BUDGET: i32 = 3;
/// Exit status when some ensemble cell is incomplete.
pub const EXIT_INCOMPLETE: i32 = 4;

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_CONFIG,
        Error::Budget(_) => EXIT_BUDGET,
        _ => 1,
    }
}

/// Command-line overrides shared by all commands.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, cfg: &ExperimentConfig) -> (ExperimentConfig, usize, PathBuf) {
        let mut cfg = cfg.clone();
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        let workers = self.workers.or(cfg.workers).unwrap_or(1).max(1);
        let out = self.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
        (cfg, workers, out)
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutcome {
    pub out_dir: PathBuf,
    pub summary: PathBuf,
    /// 0, or [`EXIT_INCOMPLETE`] for partial ensembles.
    pub status: i32,
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    version: &'a str,
    unix_time: u64,
    elapsed_seconds: f64,
    workers: usize,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn finish(
    out: &Path,
    command: &str,
    summary: &impl Serialize,
    started: Instant,
    workers: usize,
    status: i32,
) -> Result<CommandOutcome> {
    let path = out.join("summary.json");
    write_json(&path, summary)?;
    let meta = Metadata {
        command,
        version: env!("CARGO_PKG_VERSION"),
        unix_time: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        elapsed_seconds: started.elapsed().as_secs_f64(),
        workers,
    };
    write_json(&out.join("metadata.json"), &meta)?;
    Ok(CommandOutcome { out_dir: out.to_path_buf(), summary: path, status })
}

fn write_plot(path: &Path, columns: [&str; 2], rows: &[[f64; 2]]) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{},{}", columns[0], columns[1])?;
    for [x, y] in rows {
        writeln!(f, "{x:e},{y:e}")?;
    }
    f.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RunOneSummary {
    command: &'static str,
    config: ExperimentConfig,
    criticality: Criticality,
    initial: DiagnosticsRow,
    last: DiagnosticsRow,
    outcome: TrajectoryOutcome,
}

/// One trajectory with a diagnostics log (`diagnostics.csv`).
pub fn cmd_run_one(cfg: &ExperimentConfig, overrides: &Overrides) -> Result<CommandOutcome> {
    let started = Instant::now();
    let (cfg, workers, out) = overrides.apply(cfg);
    let run = cfg.run_section()?.clone();
    let grid = Grid::new(*cfg.grid()?)?;
    let solver = cfg.solver()?.clone();
    let integ = Integrator::new(&grid, solver.clone(), &cfg.noise(), cfg.cutoff)?;
    let u0 = cfg.initial()?.build(&grid)?;
    let mut state = integ.initial_state(&u0)?;
    let mut log = DiagnosticsLogger::new(&solver, run.log_stride);
    if run.continue_after_crossing {
        log = log.continuing_after_crossing();
    }
    let outcome = integ.evolve(&mut state, &mut RngStream::new(cfg.seed, 0), run.horizon, &mut log)?;
    let last = DiagnosticsRow::measure(&state, &solver, integ.theta(&state));
    if log.rows.last().map(|r| r.t) != Some(last.t) {
        log.rows.push(last);
    }

    std::fs::create_dir_all(&out)?;
    let mut f = std::io::BufWriter::new(std::fs::File::create(out.join("diagnostics.csv"))?);
    log.write_csv(&mut f)?;
    f.flush()?;
    let summary = RunOneSummary {
        command: "run-one",
        criticality: solver.criticality(grid.dim()),
        initial: log.rows[0],
        last,
        outcome,
        config: cfg.echo(),
    };
    finish(&out, "run-one", &summary, started, workers, 0)
}

#[derive(Serialize)]
struct FitBlock {
    reference_beta: f64,
    fixed: Option<ScalingFit>,
    fixed_error: Option<String>,
    free: Option<ScalingFit>,
    free_error: Option<String>,
}

#[derive(Serialize)]
struct EnsembleSummary {
    command: &'static str,
    config: ExperimentConfig,
    complete: bool,
    estimates: Vec<ProbabilityEstimate>,
    warnings: Vec<String>,
    regime: [&'static str; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<FitBlock>,
}

const REGIME: [&str; 2] = ["assumed, not enforced: 0 < T <= T_0", "assumed, not enforced: 0 < T <= c_1 R^-4"];

fn fit_block(cfg: &ExperimentConfig, estimates: &[ProbabilityEstimate]) -> FitBlock {
    let options = |beta| FitOptions { fixed_beta: beta, bootstrap: cfg.fit.bootstrap, seed: cfg.seed };
    let (fixed, fixed_error) = match fit_estimates(estimates, &options(Some(cfg.fit.fixed_beta))) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let (free, free_error) = if cfg.fit.free_beta {
        match fit_estimates(estimates, &options(None)) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    FitBlock { reference_beta: 0.25, fixed, fixed_error, free, free_error }
}

fn ensemble_like(
    cfg: &ExperimentConfig,
    overrides: &Overrides,
    command: &'static str,
    with_fit: bool,
) -> Result<CommandOutcome> {
    let started = Instant::now();
    let (cfg, workers, out) = overrides.apply(cfg);
    let ens = cfg.ensemble_config(workers)?;
    let result = run_ensemble(&ens)?;
    std::fs::create_dir_all(&out)?;
    let mut f = std::io::BufWriter::new(std::fs::File::create(out.join("trajectories.csv"))?);
    result.write_trajectories(&mut f)?;
    f.flush()?;
    let plot: Vec<[f64; 2]> = result
        .estimates
        .iter()
        .filter(|e| e.successes > 0)
        .map(|e| [e.horizon.powf(-0.25), e.p_hat.ln()])
        .collect();
    write_plot(&out.join("plot.csv"), ["T^-1/4", "ln_p_hat"], &plot)?;

    let complete = result.complete();
    let summary = EnsembleSummary {
        command,
        config: cfg.echo(),
        complete,
        fit: with_fit.then(|| fit_block(&cfg, &result.estimates)),
        estimates: result.estimates,
        warnings: result.warnings,
        regime: REGIME,
    };
    finish(&out, command, &summary, started, workers, if complete { 0 } else { EXIT_INCOMPLETE })
}

/// Ensemble estimates only (`summary.json`, `trajectories.csv`, `plot.csv`).
pub fn cmd_ensemble(cfg: &ExperimentConfig, overrides: &Overrides) -> Result<CommandOutcome> {
    ensemble_like(cfg, overrides, "ensemble", false)
}

/// Ensemble plus the scaling fits.
pub fn cmd_scaling(cfg: &ExperimentConfig, overrides: &Overrides) -> Result<CommandOutcome> {
    ensemble_like(cfg, overrides, "scaling", true)
}

/// Probes runnable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeName {
    Khintchine,
    Dispersive,
    Bdg,
    Convergence,
}

impl std::str::FromStr for ProbeName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "khintchine" => Ok(Self::Khintchine),
            "dispersive" => Ok(Self::Dispersive),
            "bdg" => Ok(Self::Bdg),
            "convergence" => Ok(Self::Convergence),
            other => Err(Error::Config(format!(
                "unknown probe '{other}' (expected khintchine, dispersive, bdg or convergence)"
            ))),
        }
    }
}

fn khintchine_coefficients(section: &KhintchineSection, seed: u64) -> Vec<Vec<f64>> {
    section.coefficients.clone().unwrap_or_else(|| {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut rng = RngStream::new(seed, u64::MAX);
        let random = (0..section.random_dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        vec![vec![1.0], vec![h, h], random]
    })
}

/// Runs one probe and writes `summary.json` (the report) and `plot.csv`.
pub fn cmd_probe(name: ProbeName, cfg: &ExperimentConfig, overrides: &Overrides) -> Result<CommandOutcome> {
    let started = Instant::now();
    let (cfg, workers, out) = overrides.apply(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    let report: ProbeReport = pool.install(|| match name {
        ProbeName::Khintchine => {
            let section = cfg.probe.khintchine.clone().unwrap_or_default();
            let coefficients = khintchine_coefficients(&section, cfg.seed);
            khintchine_empirical_check(&section.rho, &coefficients, section.samples, cfg.seed)
        }
        ProbeName::Dispersive => cfg.probe.dispersive.clone().unwrap_or_default().run(),
        ProbeName::Bdg => cfg.probe.bdg.clone().unwrap_or_default().run(cfg.seed),
        ProbeName::Convergence => {
            let c: ConvergenceConfig = cfg.probe.convergence.clone().unwrap_or_default();
            convergence_probe(&c, cfg.seed)
        }
    })?;
    std::fs::create_dir_all(&out)?;
    report.write_plot(&out.join("plot.csv"))?;
    let probe = match name {
        ProbeName::Khintchine => "probe khintchine",
        ProbeName::Dispersive => "probe dispersive",
        ProbeName::Bdg => "probe bdg",
        ProbeName::Convergence => "probe convergence",
    };
    finish(&out, probe, &report, started, workers, 0)
}

#[derive(Serialize)]
struct FitSummary {
    command: &'static str,
    source: String,
    fixed_beta: Option<f64>,
    fit: ScalingFit,
}

/// Re-fits the estimates stored in an ensemble/scaling `summary.json`;
/// writes `fit.json`.
pub fn cmd_fit(
    summary: &Path,
    beta: Option<f64>,
    bootstrap: usize,
    seed: u64,
    out: &Path,
) -> Result<CommandOutcome> {
    let text =
        std::fs::read_to_string(summary).map_err(|e| Error::Config(format!("{}: {e}", summary.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let estimates: Vec<ProbabilityEstimate> = value
        .get("estimates")
        .cloned()
        .ok_or_else(|| Error::Config(format!("{}: no `estimates` array", summary.display())))
        .and_then(|v| serde_json::from_value(v).map_err(Error::from))?;
    let fit = fit_estimates(&estimates, &FitOptions { fixed_beta: beta, bootstrap, seed })?;
    std::fs::create_dir_all(out)?;
    let path = out.join("fit.json");
    let doc = FitSummary { command: "fit", source: summary.display().to_string(), fixed_beta: beta, fit };
    write_json(&path, &doc)?;
    Ok(CommandOutcome { out_dir: out.to_path_buf(), summary: path, status: 0 })
}

/// Convenience for tests and examples: mass and energy of the initial data.
pub fn initial_invariants(cfg: &ExperimentConfig) -> Result<(f64, f64)> {
    let grid = Grid::new(*cfg.grid()?)?;
    let u0 = cfg.initial()?.build(&grid)?;
    Ok((mass(&u0), energy(&u0, cfg.solver()?)))
}
