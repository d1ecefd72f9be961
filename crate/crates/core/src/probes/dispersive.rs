//! Decay of `‖S(t)f‖_{L^p}` for localized data.

use serde::{Deserialize, Serialize};

use super::report::{linear_fit, ProbeReport, Provenance};
use crate::error::{domain, Error, Result};
use crate::initial::InitialData;
use crate::spectral::{Field, Grid, GridSpec, Propagator, Representation};

/// Share of spectral mass used to define the bandwidth of the data.
const BANDWIDTH_QUANTILE: f64 = 0.99;
/// Mass allowed outside the ball of radius `L/8` around the centroid.
const LOCALIZATION_TOLERANCE: f64 = 1e-6;

/// `L²/(4π m)` where `m = L k/(2π)` is the mode radius holding 99% of the
/// spectral mass; equivalently `L/(2k)`, the time for the fastest relevant
/// wave packet (group speed `2k`) to travel half the box.
pub fn wrap_around_time(f: &Field) -> f64 {
    let grid = f.grid();
    let spec = f.spectral();
    let mut shells: Vec<(f64, f64)> =
        spec.values().iter().zip(grid.k_squared()).map(|(z, k2)| (k2.sqrt(), z.norm_sqr())).collect();
    shells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = shells.iter().map(|s| s.1).sum();
    let mut acc = 0.0;
    let mut k = 0.0;
    for (kk, e) in shells {
        acc += e;
        k = kk;
        if acc >= BANDWIDTH_QUANTILE * total {
            break;
        }
    }
    let l = grid.length();
    if k == 0.0 {
        return f64::INFINITY;
    }
    let modes = l * k / std::f64::consts::TAU;
    l * l / (4.0 * std::f64::consts::PI * modes)
}

fn outside_mass_fraction(f: &Field, radius: f64) -> f64 {
    let grid = f.grid();
    let phys = f.physical();
    let l = grid.length();
    let c = crate::diagnostics::centroid(f);
    let (mut out, mut total) = (0.0, 0.0);
    for (idx, z) in phys.values().iter().enumerate() {
        let x = grid.coords(idx);
        let r2: f64 = (0..grid.dim())
            .map(|a| {
                let d = (x[a] - c[a] + 0.5 * l).rem_euclid(l) - 0.5 * l;
                d * d
            })
            .sum();
        let e = z.norm_sqr();
        total += e;
        if r2.sqrt() > radius {
            out += e;
        }
    }
    if total > 0.0 {
        out / total
    } else {
        0.0
    }
}

fn log_times(window: [f64; 2], samples: usize) -> Vec<f64> {
    let (a, b) = (window[0].ln(), window[1].ln());
    (0..samples).map(|i| (a + (b - a) * i as f64 / (samples - 1) as f64).exp()).collect()
}

fn decay_slope(spectral: &Field, p: f64, times: &[f64]) -> Result<(f64, Vec<[f64; 2]>)> {
    let mut points = Vec::with_capacity(times.len());
    for &t in times {
        let mut v = spectral.clone();
        Propagator::new(spectral.grid(), t).apply_spectral(v.values_mut());
        v.set_repr(Representation::Physical);
        points.push([t.ln(), v.lebesgue_norm(p)?.ln()]);
    }
    let xs: Vec<f64> = points.iter().map(|q| q[0]).collect();
    let ys: Vec<f64> = points.iter().map(|q| q[1]).collect();
    Ok((linear_fit(&xs, &ys).0, points))
}

/// Fits the slope of `log ‖S(t)f‖_p` against `log t` on `samples` log-spaced
/// times in `window` and compares it with `−d(1/2 − 1/p)`.
///
/// The conjugate exponent `p' = p/(p−1)` is fitted as well; its slope is
/// reported under `fitted_exponent_conjugate`.
pub fn dispersive_decay_probe(f: &Field, p: f64, window: [f64; 2], samples: usize) -> Result<ProbeReport> {
    if !(p >= 1.0) {
        return Err(domain(format!("Lebesgue exponent must be >= 1, got {p}")));
    }
    if !(window[0] > 0.0 && window[1] > window[0]) || samples < 2 {
        return Err(domain(format!(
            "need 0 < t0 < t1 and at least two samples, got {window:?} with {samples}"
        )));
    }
    let grid = f.grid();
    let l = grid.length();
    let outside = outside_mass_fraction(f, l / 8.0);
    if outside > LOCALIZATION_TOLERANCE {
        return Err(domain(format!("data not localized: {outside:e} of the mass lies outside radius L/8")));
    }
    let t_wrap = wrap_around_time(f);
    if window[1] >= t_wrap {
        return Err(Error::WrapAround(format!(
            "window ends at {} but wrap-around starts near {t_wrap:.3}",
            window[1]
        )));
    }

    let d = grid.dim() as f64;
    let spectral = f.spectral();
    let times = log_times(window, samples);
    let (slope, points) = decay_slope(&spectral, p, &times)?;
    let reference = -d * (0.5 - 1.0 / p);

    let mut report = ProbeReport::new("dispersive");
    report.input("grid", grid.spec()).input("p", p).input("window", window).input("samples", samples);
    report
        .value("fitted_exponent", slope)
        .value("reference_exponent", reference)
        .value("wrap_around_time", t_wrap)
        .value("mass_outside_l_over_8", outside);
    if p > 1.0 {
        let conj = p / (p - 1.0);
        let (cs, _) = decay_slope(&spectral, conj, &times)?;
        report.value("conjugate_exponent", conj).value("fitted_exponent_conjugate", cs);
    }
    report.check_close("decay exponent", slope, reference, 0.05, Provenance::PublishedEstimate);
    report.plot_columns = ["log_t".into(), "log_norm".into()];
    report.plot = points;
    Ok(report)
}

/// Least-squares slope of the exact `log ‖S(t)g‖_p` for the Gaussian
/// `g = A exp(−|x|²/(2w²))` on ℝ^d, sampled like the probe.
///
/// Pointwise `d/d log t = −d(1/2 − 1/p)·4t²/(w⁴ + 4t²)`.
pub fn gaussian_decay_slope(dim: usize, p: f64, width: f64, window: [f64; 2], samples: usize) -> f64 {
    let d = dim as f64;
    let w4 = width.powi(4);
    let times = log_times(window, samples);
    let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    // log ‖·‖_p up to a t-independent constant: −d(1/2−1/p)·log ρ(t)
    let ys: Vec<f64> = times
        .iter()
        .map(|t| -d * (0.5 - 1.0 / p) * 0.5 * ((w4 + 4.0 * t * t) / (width * width)).ln())
        .collect();
    linear_fit(&xs, &ys).0
}

/// Gaussian-data dispersive probe on a given grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersiveConfig {
    pub grid: GridSpec,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default = "one")]
    pub width: f64,
    #[serde(default = "strichartz")]
    pub p: f64,
    pub window: [f64; 2],
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn one() -> f64 {
    1.0
}

fn strichartz() -> f64 {
    crate::integrator::STRICHARTZ_EXPONENT
}

fn default_samples() -> usize {
    16
}

impl Default for DispersiveConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec { dim: 3, points: 64, length: 48.0 },
            amplitude: 1.0,
            width: 1.0,
            p: strichartz(),
            window: [1.5, 4.0],
            samples: default_samples(),
        }
    }
}

impl DispersiveConfig {
    /// Runs the probe and adds the closed-form Gaussian comparison.
    pub fn run(&self) -> Result<ProbeReport> {
        let grid = Grid::new(self.grid)?;
        let f = InitialData::gaussian(self.amplitude, self.width).build(&grid)?;
        let mut report = dispersive_decay_probe(&f, self.p, self.window, self.samples)?;
        report.input("width", self.width).input("amplitude", self.amplitude);
        let exact = gaussian_decay_slope(grid.dim(), self.p, self.width, self.window, self.samples);
        report.value("gaussian_exponent", exact);
        let fitted = report.values["fitted_exponent"];
        report.check_close("gaussian closed form", fitted, exact, 0.05, Provenance::ClosedForm);
        Ok(report)
    }
}
