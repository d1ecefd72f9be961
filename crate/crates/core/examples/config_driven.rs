//! The library side of `snls ensemble --config ...`: parse a TOML experiment
//! and write its artifacts into a directory.
//!
//! Usage: `cargo run --release --example config_driven [config.toml] [out_dir]`

use std::path::PathBuf;

use snls::experiment::{cmd_scaling, ExperimentConfig, Overrides};

const FALLBACK: &str = include_str!("../configs/scaling.toml");

fn main() -> snls::Result<()> {
    let mut args = std::env::args().skip(1);
    let cfg = match args.next() {
        Some(path) => ExperimentConfig::load(path.as_ref())?,
        None => ExperimentConfig::from_toml(FALLBACK)?,
    };
    let out = args.next().map_or_else(|| std::env::temp_dir().join("snls-config-driven"), PathBuf::from);
    let outcome = cmd_scaling(&cfg, &Overrides { out: Some(out), ..Overrides::default() })?;
    println!("wrote {}", outcome.summary.display());
    for entry in std::fs::read_dir(&outcome.out_dir)? {
        println!("  {}", entry?.file_name().to_string_lossy());
    }
    Ok(())
}
