//! Moments of the discrete stochastic convolution
//! `Ju(t_n) = Σ_{j<n} S(t_n − t_j)(u(t_j) ΔW_j)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{ProbeReport, Provenance};
use crate::error::{domain, Error, Result};
use crate::initial::InitialData;
use crate::integrator::STRICHARTZ_EXPONENT;
use crate::noise::{NoiseSampler, NoiseSpec, RngStream};
use crate::spectral::{Field, Grid, GridSpec, Propagator, Representation};

pub const MIN_CONVOLUTION_SAMPLES: usize = 1_000;
/// Largest moment order accepted; higher orders need sample sizes growing
/// like `e^{cρ}`.
pub const MAX_RHO: f64 = 8.0;
/// Work budget in grid-point updates (`samples × steps × N^d`).
pub const MAX_WORK: f64 = 2e10;

#[derive(Debug, Clone, Copy)]
struct SampleNorms {
    sup_w: f64,
    end_w: f64,
    end_l2_sq: f64,
}

fn simulate(
    profile: &[Field],
    sampler: &NoiseSampler,
    propagator: &Propagator,
    dt: f64,
    steps: usize,
    rng: &mut RngStream,
) -> Result<SampleNorms> {
    let grid = sampler.grid();
    let mut j = Field::zeros(grid);
    let mut sup_w: f64 = 0.0;
    for n in 0..steps {
        let u = &profile[if profile.len() == 1 { 0 } else { n }];
        let dw = sampler.sample(dt, rng)?;
        j.set_repr(Representation::Physical);
        j.values_mut()
            .iter_mut()
            .zip(u.values())
            .zip(dw.field().values())
            .for_each(|((a, u), w)| *a += u * w.re);
        j.set_repr(Representation::Spectral);
        propagator.apply_spectral(j.values_mut());
        sup_w = sup_w.max(j.sobolev_w1p_norm(STRICHARTZ_EXPONENT)?);
    }
    Ok(SampleNorms {
        sup_w,
        end_w: j.sobolev_w1p_norm(STRICHARTZ_EXPONENT)?,
        end_l2_sq: j.stored_l2_norm().powi(2),
    })
}

fn moment_root(values: &[f64], rho: f64) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let powers: Vec<f64> = values.iter().map(|v| v.powf(rho)).collect();
    let mean = powers.iter().sum::<f64>() / n;
    let var = powers.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean.powf(rho.recip()), mean, (var / n).sqrt())
}

/// Simulates `samples` independent copies of `Ju` on `steps` steps of
/// `[0, T]` with the profile `u` frozen along the given path (one field means
/// constant in time) and reports `m(ρ) = (E sup_{t≤T} ‖Ju‖^ρ_{W^{1,12/5}})^{1/ρ}`,
/// the endpoint moments, and the ratios `m(ρ)/(ρ^{3/2} T^{3/8})`.
///
/// Each sample draws from its own stream `(seed, sample index)`, so the
/// report does not depend on the thread count.
#[allow(clippy::too_many_arguments)]
pub fn stochastic_convolution_moment_probe(
    profile: &[Field],
    noise: &NoiseSpec,
    horizon: f64,
    steps: usize,
    rhos: &[f64],
    samples: usize,
    seed: u64,
) -> Result<ProbeReport> {
    if profile.is_empty() || (profile.len() != 1 && profile.len() != steps) {
        return Err(domain(format!(
            "profile must hold one field or one per step ({steps}), got {}",
            profile.len()
        )));
    }
    if samples < MIN_CONVOLUTION_SAMPLES {
        return Err(domain(format!("need at least {MIN_CONVOLUTION_SAMPLES} samples, got {samples}")));
    }
    if rhos.is_empty() || rhos.iter().any(|&r| !(2.0..=MAX_RHO).contains(&r)) {
        return Err(domain(format!("moment orders must lie in [2, {MAX_RHO}], got {rhos:?}")));
    }
    if !(horizon > 0.0) || steps == 0 {
        return Err(domain("horizon and step count must be positive"));
    }
    let grid = profile[0].grid().clone();
    let work = samples as f64 * steps as f64 * grid.len() as f64;
    if work > MAX_WORK {
        return Err(Error::Budget(format!("{work:e} grid updates exceed {MAX_WORK:e}")));
    }
    let profile: Vec<Field> = profile.iter().map(Field::physical).collect();
    let sampler = NoiseSampler::new(noise, &grid)?;
    let dt = horizon / steps as f64;
    let propagator = Propagator::new(&grid, dt);

    let norms: Vec<SampleNorms> = (0..samples as u64)
        .into_par_iter()
        .map(|i| simulate(&profile, &sampler, &propagator, dt, steps, &mut RngStream::new(seed, i)))
        .collect::<Result<_>>()?;
    let sup: Vec<f64> = norms.iter().map(|s| s.sup_w).collect();
    let end: Vec<f64> = norms.iter().map(|s| s.end_w).collect();

    let mut report = ProbeReport::new("bdg");
    report
        .input("grid", grid.spec())
        .input("noise", noise)
        .input("horizon", horizon)
        .input("steps", steps)
        .input("rho", rhos)
        .input("samples", samples)
        .input("seed", seed)
        .input("profile_len", profile.len());
    report.value("weighted_symbol_sum", sampler.weighted_symbol_sum());

    let t_scale = horizon.powf(0.375);
    let mut ratios = Vec::new();
    let mut previous: Option<f64> = None;
    let mut monotone = true;
    for &rho in rhos {
        let (m_sup, _, _) = moment_root(&sup, rho);
        let (m_end, _, _) = moment_root(&end, rho);
        let ratio = m_sup / (rho.powf(1.5) * t_scale);
        report
            .value(&format!("m_sup({rho})"), m_sup)
            .value(&format!("m_end({rho})"), m_end)
            .value(&format!("ratio({rho})"), ratio);
        if let Some(prev) = previous {
            monotone &= m_sup >= prev * (1.0 - 1e-12);
        }
        previous = Some(m_sup);
        ratios.push(ratio);
        report.plot.push([rho, ratio]);
    }
    report.plot_columns = ["rho".into(), "ratio".into()];

    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let spread = if min > 0.0 {
        max / min
    } else if max == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    report.value("ratio_spread", spread);
    report.check_at_most("ratio max/min", spread, 10.0, Provenance::Bound);
    report.check_holds("m(rho) nondecreasing", previous.unwrap_or(0.0), monotone);

    // Itô isometry in L²: E‖J(T)‖² = Σ_n dt ∫|u_n|² F_φ
    let correction = sampler.correction_field();
    let cell = grid.cell_volume();
    let isometry: f64 = (0..steps)
        .map(|n| {
            let u = &profile[if profile.len() == 1 { 0 } else { n }];
            dt * cell
                * u.values().iter().zip(correction.values()).map(|(u, f)| u.norm_sqr() * f.re).sum::<f64>()
        })
        .sum();
    let l2: Vec<f64> = norms.iter().map(|s| s.end_l2_sq.sqrt()).collect();
    let (_, mean_l2, se_l2) = moment_root(&l2, 2.0);
    report.value("l2_second_moment", mean_l2).value("l2_isometry", isometry);
    report.check_close(
        "Ito isometry (L2)",
        mean_l2,
        isometry,
        3.0 * se_l2.max(1e-300),
        Provenance::ClosedForm,
    );

    // constant profile under constant-mode noise: J(T) = c·σ·W_T is constant
    // in space, so E‖J(T)‖²_{W^{1,12/5}} = |c|²σ²T L^{2d/p}
    if let Some(c) = constant_value(&profile) {
        if sampler.basis_size() == 1 && noise.modes.is_some() {
            let l = grid.length();
            let d = grid.dim() as f64;
            let sigma_sq = correction.values()[0].re;
            let exact = c * c * sigma_sq * horizon * l.powf(2.0 * d / STRICHARTZ_EXPONENT);
            let (_, mean, se) = moment_root(&end, 2.0);
            report.value("m_end(2)^2 isometry", exact);
            report.check_close(
                "Ito isometry (W^{1,12/5}, constant mode)",
                mean,
                exact,
                3.0 * se.max(1e-300),
                Provenance::ClosedForm,
            );
        }
    }
    Ok(report)
}

fn constant_value(profile: &[Field]) -> Option<f64> {
    let first = profile[0].values()[0];
    let same = profile
        .iter()
        .all(|f| f.values().iter().all(|z| (z - first).norm() <= 1e-14 * first.norm().max(1.0)));
    same.then(|| first.norm())
}

/// Constant-in-time profile built from an initial-data descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvolutionConfig {
    pub grid: GridSpec,
    pub noise: NoiseSpec,
    pub profile: InitialData,
    pub horizon: f64,
    pub steps: usize,
    pub rho: Vec<f64>,
    pub samples: usize,
}

impl Default for ConvolutionConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec { dim: 1, points: 64, length: 16.0 },
            noise: NoiseSpec::gaussian(2.0, 1.0),
            profile: InitialData::PlaneWave { amplitude: 1.0, mode: vec![0] },
            horizon: 0.5,
            steps: 50,
            rho: vec![2.0, 4.0, 8.0],
            samples: MIN_CONVOLUTION_SAMPLES,
        }
    }
}

impl ConvolutionConfig {
    pub fn run(&self, seed: u64) -> Result<ProbeReport> {
        let grid = Grid::new(self.grid)?;
        let u = self.profile.build(&grid)?;
        stochastic_convolution_moment_probe(
            std::slice::from_ref(&u),
            &self.noise,
            self.horizon,
            self.steps,
            &self.rho,
            self.samples,
            seed,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn silent_noise_gives_zero_moments() {
        let cfg = ConvolutionConfig { noise: NoiseSpec::none(), steps: 5, ..Default::default() };
        let r = cfg.run(0).unwrap();
        for rho in [2.0, 4.0, 8.0] {
            assert_eq!(r.values[&format!("m_sup({rho})")], 0.0);
            assert_eq!(r.values[&format!("m_end({rho})")], 0.0);
        }
        assert!(r.passed(), "{r:#?}");
    }

    #[test]
    fn constant_mode_matches_isometry_and_is_monotone() {
        let cfg = ConvolutionConfig {
            noise: NoiseSpec::gaussian(2.0, 0.8).with_modes(vec![vec![0]]),
            steps: 20,
            ..Default::default()
        };
        let r = cfg.run(3).unwrap();
        assert!(r.check("Ito isometry (W^{1,12/5}, constant mode)").is_some());
        assert!(r.passed(), "{r:#?}");
    }

    #[test]
    fn report_is_deterministic() {
        let cfg = ConvolutionConfig { steps: 4, ..Default::default() };
        assert_eq!(cfg.run(9).unwrap(), cfg.run(9).unwrap());
    }

    #[test]
    fn preconditions() {
        let base = ConvolutionConfig { steps: 2, ..Default::default() };
        assert!(ConvolutionConfig { samples: 10, ..base.clone() }.run(0).is_err());
        assert!(ConvolutionConfig { rho: vec![16.0], ..base.clone() }.run(0).is_err());
        let huge = ConvolutionConfig { samples: 1 << 30, ..base };
        assert!(matches!(huge.run(0), Err(Error::Budget(_))));
    }
}
