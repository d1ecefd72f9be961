use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use snls::experiment::{
    cmd_ensemble, cmd_fit, cmd_probe, cmd_run_one, cmd_scaling, exit_code, ExperimentConfig, Overrides,
    ProbeName,
};

#[derive(Parser)]
#[command(name = "snls", version, about = "Stochastic NLS simulator and Monte Carlo laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Root seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "SNLS_WORKERS")]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Probe {
    Khintchine,
    Dispersive,
    Bdg,
    Convergence,
}

#[derive(Subcommand)]
enum Command {
    /// One trajectory with a diagnostics log.
    RunOne(Common),
    /// Crossing probabilities over the horizon ladder.
    Ensemble(Common),
    /// Ensemble plus the ln p = a - c T^-beta fit.
    Scaling(Common),
    /// Numerical probe.
    Probe {
        #[arg(value_enum)]
        name: Probe,
        #[command(flatten)]
        common: Common,
    },
    /// Re-fit the estimates of an existing summary.json.
    Fit {
        summary: PathBuf,
        /// Fix beta and fit only (a, c).
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 0)]
        bootstrap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn load(common: &Common, required: bool) -> snls::Result<(ExperimentConfig, Overrides)> {
    let cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None if required => return Err(snls::Error::Config("--config is required".into())),
        None => ExperimentConfig::default(),
    };
    let overrides = Overrides { seed: common.seed, workers: common.workers, out: common.out.clone() };
    Ok((cfg, overrides))
}

fn run(cli: Cli) -> snls::Result<i32> {
    let outcome = match cli.command {
        Command::RunOne(c) => load(&c, true).and_then(|(cfg, o)| cmd_run_one(&cfg, &o))?,
        Command::Ensemble(c) => load(&c, true).and_then(|(cfg, o)| cmd_ensemble(&cfg, &o))?,
        Command::Scaling(c) => load(&c, true).and_then(|(cfg, o)| cmd_scaling(&cfg, &o))?,
        Command::Probe { name, common } => {
            let name = match name {
                Probe::Khintchine => ProbeName::Khintchine,
                Probe::Dispersive => ProbeName::Dispersive,
                Probe::Bdg => ProbeName::Bdg,
                Probe::Convergence => ProbeName::Convergence,
            };
            let (cfg, o) = load(&common, false)?;
            cmd_probe(name, &cfg, &o)?
        }
        Command::Fit { summary, beta, bootstrap, seed, out } => {
            cmd_fit(&summary, beta, bootstrap, seed, &out)?
        }
    };
    println!("{}", outcome.summary.display());
    Ok(outcome.status)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("snls: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
