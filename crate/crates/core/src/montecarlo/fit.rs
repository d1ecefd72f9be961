//! Least-squares fit of `ln p(T) = a − c·T^{−β}`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::interval::{clopper_pearson, ProbabilityEstimate};
use crate::error::{Error, Result};

/// Normal quantile used to turn interval widths into weights.
const Z95: f64 = 1.959_963_984_540_054;
const BETA_RANGE: (f64, f64) = (1e-3, 4.0);
const BETA_SCAN: usize = 400;

/// One horizon as seen by the fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub horizon: f64,
    /// `ln p̂`, or `None` for a zero-success cell (censored from above).
    pub ln_p: Option<f64>,
    /// `ln hi`, the one-sided constraint used when `ln_p` is `None`.
    pub ln_upper: f64,
    pub weight: f64,
    /// Binomial data for the bootstrap, when known.
    pub successes: Option<u64>,
    pub trials: Option<u64>,
}

impl ScalingPoint {
    /// Exact observation with unit weight.
    pub fn exact(horizon: f64, ln_p: f64) -> Self {
        Self { horizon, ln_p: Some(ln_p), ln_upper: ln_p, weight: 1.0, successes: None, trials: None }
    }

    /// Weight `1/σ` with `σ = (ln hi − ln lo)/(2·1.96)`; zero-success cells
    /// are censored at `ln hi` with the weight of a one-success cell.
    pub fn from_estimate(e: &ProbabilityEstimate) -> Result<Self> {
        let (lo, hi, ln_p) = if e.successes == 0 {
            let (lo, hi) = clopper_pearson(1, e.trials.max(1), ProbabilityEstimate::LEVEL)?;
            (lo, hi, None)
        } else {
            (e.lo, e.hi, Some(e.p_hat.ln()))
        };
        let sigma = ((hi.ln() - lo.ln()) / (2.0 * Z95)).max(1e-12);
        Ok(Self {
            horizon: e.horizon,
            ln_p,
            ln_upper: e.hi.ln(),
            weight: 1.0 / sigma,
            successes: Some(e.successes),
            trials: Some(e.trials),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellUse {
    TwoSided,
    /// Zero-success cell entering only through `ln p ≤ ln hi`.
    Censored,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapIntervals {
    pub replicates: usize,
    pub failed: usize,
    pub a: [f64; 2],
    pub c: [f64; 2],
    pub beta: Option<[f64; 2]>,
}

/// Result of [`fit_scaling`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub a: f64,
    pub c: f64,
    pub beta: f64,
    pub beta_fixed: bool,
    /// `c` would have been negative and was clamped to zero.
    pub constraint_active: bool,
    pub cells: Vec<CellUse>,
    /// Weighted residuals `w (ln p − model)`; censored cells report the
    /// clipped `max(0, model − ln hi)` excess.
    pub residuals: Vec<f64>,
    pub weighted_sse: f64,
    pub bootstrap: Option<BootstrapIntervals>,
}

impl ScalingFit {
    pub fn predict(&self, horizon: f64) -> f64 {
        self.a - self.c * horizon.powf(-self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitOptions {
    /// Fix `β` (e.g. `0.25`) and fit only `(a, c)`.
    #[serde(default)]
    pub fixed_beta: Option<f64>,
    #[serde(default)]
    pub bootstrap: usize,
    #[serde(default)]
    pub seed: u64,
}

impl FitOptions {
    pub fn fixed(beta: f64) -> Self {
        Self { fixed_beta: Some(beta), bootstrap: 0, seed: 0 }
    }

    pub fn free() -> Self {
        Self { fixed_beta: None, bootstrap: 0, seed: 0 }
    }
}

struct Solution {
    a: f64,
    c: f64,
    clamped: bool,
    sse: f64,
}

/// Model value, one-sided residual for censored cells.
fn residual(p: &ScalingPoint, a: f64, c: f64, beta: f64) -> f64 {
    let model = a - c * p.horizon.powf(-beta);
    match p.ln_p {
        Some(y) => p.weight * (y - model),
        None => p.weight * (model - p.ln_upper).max(0.0),
    }
}

fn weighted_sse(points: &[ScalingPoint], a: f64, c: f64, beta: f64) -> f64 {
    points.iter().map(|p| residual(p, a, c, beta).powi(2)).sum()
}

/// Weighted linear least squares for `(a, c)` at fixed `β`, with `c ≥ 0` and
/// the censored cells handled by an active set (a censored cell joins the
/// equations at `ln hi` while the model exceeds it).
fn solve_linear(points: &[ScalingPoint], beta: f64) -> Option<Solution> {
    let mut active: Vec<bool> = points.iter().map(|p| p.ln_p.is_some()).collect();
    for _ in 0..=points.len() {
        let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (p, _) in points.iter().zip(&active).filter(|(_, a)| **a) {
            let w = p.weight * p.weight;
            let x = -p.horizon.powf(-beta);
            let y = p.ln_p.unwrap_or(p.ln_upper);
            sw += w;
            sx += w * x;
            sy += w * y;
            sxx += w * x * x;
            sxy += w * x * y;
        }
        if sw == 0.0 {
            return None;
        }
        let det = sw * sxx - sx * sx;
        let (mut a, mut c) = if det.abs() > 1e-300 {
            ((sxx * sy - sx * sxy) / det, (sw * sxy - sx * sy) / det)
        } else {
            (sy / sw, 0.0)
        };
        let mut clamped = false;
        if c < 0.0 {
            clamped = true;
            c = 0.0;
            a = sy / sw;
        }
        // grow the active set with violated censored cells
        let mut changed = false;
        for (p, act) in points.iter().zip(active.iter_mut()) {
            if p.ln_p.is_none() && !*act && a - c * p.horizon.powf(-beta) > p.ln_upper {
                *act = true;
                changed = true;
            }
        }
        if !changed {
            let sse = weighted_sse(points, a, c, beta);
            return Some(Solution { a, c, clamped, sse });
        }
    }
    None
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if (hi - lo).abs() <= 1e-15 * (lo.abs() + hi.abs()) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Gauss–Newton polish of `(a, c, β)` on the two-sided and active censored
/// residuals; steps that do not reduce the objective are rejected.
fn gauss_newton(points: &[ScalingPoint], mut a: f64, mut c: f64, mut beta: f64) -> (f64, f64, f64) {
    let mut sse = weighted_sse(points, a, c, beta);
    for _ in 0..100 {
        let rows: Vec<&ScalingPoint> =
            points.iter().filter(|p| p.ln_p.is_some() || residual(p, a, c, beta) > 0.0).collect();
        let n = rows.len();
        let mut jac = DMatrix::<f64>::zeros(n, 3);
        let mut r = DVector::<f64>::zeros(n);
        for (i, p) in rows.iter().enumerate() {
            let xb = p.horizon.powf(-beta);
            let w = p.weight;
            let sign = if p.ln_p.is_some() { 1.0 } else { -1.0 };
            r[i] = residual(p, a, c, beta);
            // two-sided: w (y − a + c T^{−β}); censored: w (a − c T^{−β} − ln hi)
            jac[(i, 0)] = -w * sign;
            jac[(i, 1)] = w * xb * sign;
            jac[(i, 2)] = -w * c * xb * p.horizon.ln() * sign;
        }
        let svd = jac.clone().svd(true, true);
        let Ok(step) = svd.solve(&(-&r), 1e-14) else { break };
        let (na, nc, nb) = (a + step[0], (c + step[1]).max(0.0), beta + step[2]);
        if !(nb > 0.0) {
            break;
        }
        let nsse = weighted_sse(points, na, nc, nb);
        if !(nsse < sse) {
            break;
        }
        let tiny = step.norm() <= 1e-15 * (1.0 + a.abs() + c.abs() + beta.abs());
        a = na;
        c = nc;
        beta = nb;
        sse = nsse;
        if tiny {
            break;
        }
    }
    (a, c, beta)
}

fn fit_once(points: &[ScalingPoint], fixed_beta: Option<f64>) -> Result<ScalingFit> {
    let two_sided = points.iter().filter(|p| p.ln_p.is_some()).count();
    let needed = if fixed_beta.is_some() { 2 } else { 3 };
    if two_sided < needed {
        return Err(Error::Fit(format!(
            "{} fit needs at least {needed} cells with at least one success, got {two_sided}",
            if fixed_beta.is_some() { "fixed-beta" } else { "free-beta" }
        )));
    }
    if points.iter().any(|p| !(p.horizon > 0.0) || !(p.weight > 0.0)) {
        return Err(Error::Fit("horizons and weights must be positive".into()));
    }

    let (a, c, beta, clamped) = match fixed_beta {
        Some(beta) => {
            if !(beta > 0.0) {
                return Err(Error::Fit(format!("fixed beta must be positive, got {beta}")));
            }
            let s = solve_linear(points, beta).ok_or_else(|| Error::Fit("degenerate design".into()))?;
            (s.a, s.c, beta, s.clamped)
        }
        None => {
            let profile = |b: f64| solve_linear(points, b).map_or(f64::INFINITY, |s| s.sse);
            let (lo, hi) = (BETA_RANGE.0.ln(), BETA_RANGE.1.ln());
            let grid: Vec<f64> =
                (0..BETA_SCAN).map(|i| (lo + (hi - lo) * i as f64 / (BETA_SCAN - 1) as f64).exp()).collect();
            let best = (0..grid.len())
                .min_by(|&i, &j| profile(grid[i]).total_cmp(&profile(grid[j])))
                .expect("non-empty scan");
            let left = grid[best.saturating_sub(1)];
            let right = grid[(best + 1).min(grid.len() - 1)];
            let b0 = golden_section(profile, left, right);
            let s = solve_linear(points, b0).ok_or_else(|| Error::Fit("degenerate design".into()))?;
            if s.clamped {
                (s.a, s.c, b0, true)
            } else {
                let (a, c, b) = gauss_newton(points, s.a, s.c, b0);
                (a, c, b, false)
            }
        }
    };

    let cells =
        points.iter().map(|p| if p.ln_p.is_some() { CellUse::TwoSided } else { CellUse::Censored }).collect();
    let residuals = points.iter().map(|p| residual(p, a, c, beta)).collect();
    Ok(ScalingFit {
        a,
        c,
        beta,
        beta_fixed: fixed_beta.is_some(),
        constraint_active: clamped,
        cells,
        residuals,
        weighted_sse: weighted_sse(points, a, c, beta),
        bootstrap: None,
    })
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (pos - i as f64) * (sorted[j] - sorted[i])
}

/// Fits `ln p = a − c·T^{−β}` with `c ≥ 0`.
///
/// With `fixed_beta` only `(a, c)` are fitted (closed-form weighted least
/// squares); otherwise `β` is found by a profile search over
/// `[10⁻³, 4]` followed by a joint Gauss–Newton polish. Zero-success cells are
/// interval-censored. With `bootstrap > 0` every cell is resampled as
/// `Binomial(M, p̂)` and refitted; failed refits are counted and skipped.
pub fn fit_scaling(points: &[ScalingPoint], options: &FitOptions) -> Result<ScalingFit> {
    let mut fit = fit_once(points, options.fixed_beta)?;
    if options.bootstrap == 0 {
        return Ok(fit);
    }
    if points.iter().any(|p| p.trials.is_none() || p.successes.is_none()) {
        return Err(Error::Fit("bootstrap needs binomial counts for every cell".into()));
    }
    let mut draws: [Vec<f64>; 3] = Default::default();
    let mut failed = 0;
    for b in 0..options.bootstrap {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        rng.set_stream(b as u64);
        let resampled: Result<Vec<ScalingPoint>> = points
            .iter()
            .map(|p| {
                let (s, m) = (p.successes.unwrap(), p.trials.unwrap());
                let q = s as f64 / m as f64;
                let s_star = Binomial::new(m, q).map_err(|e| Error::Fit(e.to_string()))?.sample(&mut rng);
                let e = ProbabilityEstimate::new(p.horizon, s_star, m)?;
                ScalingPoint::from_estimate(&e)
            })
            .collect();
        match resampled.and_then(|pts| fit_once(&pts, options.fixed_beta)) {
            Ok(f) => {
                draws[0].push(f.a);
                draws[1].push(f.c);
                draws[2].push(f.beta);
            }
            Err(_) => failed += 1,
        }
    }
    if draws[0].is_empty() {
        return Err(Error::Fit("every bootstrap replicate failed".into()));
    }
    for d in draws.iter_mut() {
        d.sort_by(f64::total_cmp);
    }
    let ci = |d: &[f64]| [percentile(d, 0.025), percentile(d, 0.975)];
    fit.bootstrap = Some(BootstrapIntervals {
        replicates: options.bootstrap,
        failed,
        a: ci(&draws[0]),
        c: ci(&draws[1]),
        beta: options.fixed_beta.is_none().then(|| ci(&draws[2])),
    });
    Ok(fit)
}

/// Fits a list of ensemble estimates.
pub fn fit_estimates(estimates: &[ProbabilityEstimate], options: &FitOptions) -> Result<ScalingFit> {
    let points = estimates.iter().map(ScalingPoint::from_estimate).collect::<Result<Vec<_>>>()?;
    fit_scaling(&points, options)
}
