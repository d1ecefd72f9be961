//! Initial data descriptors.

use std::f64::consts::TAU;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::spectral::{Field, Grid, Representation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `A·exp(−|x − c|²/(2w²))` with periodic (minimal image) distance.
    /// The centre defaults to the box centre.
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    /// `A·exp(i k_m·x)` for an integer mode vector `m`.
    PlaneWave { amplitude: f64, mode: Vec<i64> },
    /// Delimited text with a `re,im` header and one row per grid point in
    /// row-major order.
    File { path: PathBuf },
}

impl InitialData {
    pub fn gaussian(amplitude: f64, width: f64) -> Self {
        InitialData::Gaussian { amplitude, width, center: None }
    }

    pub fn build(&self, grid: &Grid) -> Result<Field> {
        match self {
            InitialData::Gaussian { amplitude, width, center } => {
                if !(*width > 0.0) {
                    return Err(domain(format!("gaussian width must be positive, got {width}")));
                }
                let c = match center {
                    Some(c) if c.len() == grid.dim() => c.clone(),
                    Some(c) => {
                        return Err(domain(format!(
                            "gaussian centre {c:?} does not have {} components",
                            grid.dim()
                        )))
                    }
                    None => grid.center()[..grid.dim()].to_vec(),
                };
                let l = grid.length();
                let a = *amplitude;
                let w = *width;
                Ok(Field::from_fn(grid, |x| {
                    let r2: f64 = x
                        .iter()
                        .zip(&c)
                        .map(|(xi, ci)| {
                            let d = (xi - ci + 0.5 * l).rem_euclid(l) - 0.5 * l;
                            d * d
                        })
                        .sum();
                    Complex64::new(a * (-r2 / (2.0 * w * w)).exp(), 0.0)
                }))
            }
            InitialData::PlaneWave { amplitude, mode } => {
                if mode.len() != grid.dim() {
                    return Err(domain(format!(
                        "plane-wave mode {mode:?} does not have {} components",
                        grid.dim()
                    )));
                }
                let k: Vec<f64> = mode.iter().map(|&m| TAU * m as f64 / grid.length()).collect();
                let a = *amplitude;
                Ok(Field::from_fn(grid, |x| {
                    let phase: f64 = k.iter().zip(x).map(|(ki, xi)| ki * xi).sum();
                    Complex64::from_polar(a, phase)
                }))
            }
            InitialData::File { path } => read_field(grid, path),
        }
    }
}

fn read_field(grid: &Grid, path: &std::path::Path) -> Result<Field> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().unwrap_or_default();
    if header.trim() != "re,im" {
        return Err(Error::Config(format!("{}: expected header 're,im', found '{header}'", path.display())));
    }
    let mut values = Vec::with_capacity(grid.len());
    for (row, line) in lines.enumerate() {
        let mut cols = line.split(',').map(str::trim);
        let parse = |s: Option<&str>| -> Result<f64> {
            s.and_then(|v| v.parse().ok()).ok_or_else(|| {
                Error::Config(format!("{}: line {}: expected two numbers", path.display(), row + 2))
            })
        };
        let re = parse(cols.next())?;
        let im = parse(cols.next())?;
        values.push(Complex64::new(re, im));
    }
    Field::from_values(grid, values, Representation::Physical)
}

/// Writes a field in the format read by [`InitialData::File`].
pub fn write_field(field: &Field, path: &std::path::Path) -> Result<()> {
    use std::fmt::Write as _;
    let f = field.physical();
    let mut out = String::from("re,im\n");
    for z in f.values() {
        writeln!(out, "{:e},{:e}", z.re, z.im).expect("string write");
    }
    std::fs::write(path, out)?;
    Ok(())
}
