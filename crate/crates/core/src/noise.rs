//! Real-valued, spatially smooth noise `W = Σ_k β_k φ e_k`.
//!
//! The orthonormal family `e_k` is the real trigonometric basis of the box
//! (constant `L^{−d/2}`, then `ν cos(k·x)` and `ν sin(k·x)` with
//! `ν = (2/L^d)^{1/2}` for every mode pair `±m`), and `φ` acts diagonally on
//! it through a radial symbol `φ̂(k)`. One time step of the noise is
//!
//! ```text
//!     ΔW(x) = ε √dt Σ_k ξ_k φ̂(k) ê_k(x),   ξ_k i.i.d. N(0, 1)
//! ```
//!
//! synthesised with a single inverse FFT of Hermitian-symmetric coefficients.

use num_complex::Complex64;
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{contract, domain, Result};
use crate::spectral::{Field, Grid, Representation};

/// Radial smoothing symbol `φ̂(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Symbol {
    /// `exp(−|k|²/(2σ²))`
    Gaussian { sigma: f64 },
    /// `(1 + |k|²)^{−s/2}`
    Sobolev { s: f64 },
}

impl Symbol {
    pub fn eval(&self, k_squared: f64) -> f64 {
        match *self {
            Symbol::Gaussian { sigma } => (-k_squared / (2.0 * sigma * sigma)).exp(),
            Symbol::Sobolev { s } => (1.0 + k_squared).powf(-0.5 * s),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Symbol::Gaussian { sigma } if !(sigma.is_finite() && sigma > 0.0) => {
                Err(domain(format!("gaussian symbol needs sigma > 0, got {sigma}")))
            }
            Symbol::Sobolev { s } if !s.is_finite() => {
                Err(domain(format!("sobolev symbol needs finite s, got {s}")))
            }
            _ => Ok(()),
        }
    }
}

/// Noise configuration: which modes, which smoothing, how strong.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub symbol: Symbol,
    /// Noise strength `ε ≥ 0`.
    pub amplitude: f64,
    /// Cube mode set `|m|_∞ ≤ k_max`; defaults to `N/4`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    /// Explicit list of mode representatives (each brings its cos/sin pair,
    /// or the constant function for the zero mode). Overrides `k_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<Vec<i64>>>,
}

impl NoiseSpec {
    pub fn gaussian(sigma: f64, amplitude: f64) -> Self {
        Self { symbol: Symbol::Gaussian { sigma }, amplitude, k_max: None, modes: None }
    }

    pub fn with_k_max(mut self, k_max: usize) -> Self {
        self.k_max = Some(k_max);
        self
    }

    pub fn with_modes(mut self, modes: Vec<Vec<i64>>) -> Self {
        self.modes = Some(modes);
        self
    }

    /// The noiseless spec (`ε = 0`).
    pub fn none() -> Self {
        Self::gaussian(1.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        self.symbol.validate()?;
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(domain(format!("noise amplitude must be >= 0, got {}", self.amplitude)));
        }
        Ok(())
    }
}

/// One real-valued basis function `ε φ̂(k) ê(x)` of the noise frame.
#[derive(Debug, Clone, Copy)]
enum BasisFunction {
    Constant { weight: f64 },
    Pair { index: usize, mirror: usize, weight: f64 },
}

/// A sampled increment `ΔW` over one step of length `dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseIncrement {
    field: Field,
    dt: f64,
}

impl NoiseIncrement {
    /// Wraps a physical, real-valued field.
    pub fn new(field: Field, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(domain(format!("increment step must be positive, got {dt}")));
        }
        check_real(&field)?;
        Ok(Self { field, dt })
    }

    pub fn zeros(grid: &Grid, dt: f64) -> Result<Self> {
        Self::new(Field::zeros(grid), dt)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// The increment over the concatenated step `[t, t + dt₁ + dt₂]`.
    pub fn concat(&self, next: &NoiseIncrement) -> NoiseIncrement {
        let mut field = self.field.clone();
        field.values_mut().iter_mut().zip(next.field.values()).for_each(|(a, b)| *a += b);
        NoiseIncrement { field, dt: self.dt + next.dt }
    }
}

/// ΔW must be physical with imaginary parts below `1e−13`.
pub(crate) fn check_real(field: &Field) -> Result<()> {
    if field.repr() != Representation::Physical {
        return Err(contract("noise increment must be in physical representation"));
    }
    let worst = field.values().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if worst > 1e-13 {
        return Err(contract(format!("noise increment is not real (|Im| up to {worst:e})")));
    }
    Ok(())
}

/// Counter-based random stream keyed by a root seed and a stream index.
///
/// The draws of stream `(seed, index)` do not depend on which thread uses it
/// or on how many other streams exist.
#[derive(Debug, Clone)]
pub struct RngStream {
    root_seed: u64,
    index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(root_seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
        rng.set_stream(index);
        Self { root_seed, index, rng }
    }

    /// Stream for trajectory `trajectory` of ensemble cell `cell`.
    pub fn for_trajectory(root_seed: u64, cell: u32, trajectory: u32) -> Self {
        Self::new(root_seed, (u64::from(cell) << 32) | u64::from(trajectory))
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Number of 32-bit words consumed so far.
    pub fn counter(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Precomputed noise frame for one grid.
#[derive(Debug, Clone)]
pub struct NoiseSampler {
    grid: Grid,
    amplitude: f64,
    basis: Vec<BasisFunction>,
    symbol_sum: f64,
    weighted_symbol_sum: f64,
}

impl NoiseSampler {
    pub fn new(spec: &NoiseSpec, grid: &Grid) -> Result<Self> {
        spec.validate()?;
        let dim = grid.dim();
        let n = grid.points();
        let reps = match &spec.modes {
            Some(modes) => explicit_modes(modes, dim, n)?,
            None => {
                let k_max = spec.k_max.unwrap_or(n / 4);
                if 2 * k_max >= n {
                    return Err(domain(format!(
                        "k_max = {k_max} must be below N/2 = {} to stay resolved",
                        n / 2
                    )));
                }
                cube_modes(k_max as i64, dim)
            }
        };

        let volume = grid.spec().volume();
        let unitary = (grid.len() as f64).sqrt();
        let nu = (2.0 / volume).sqrt();
        let mut basis = Vec::with_capacity(reps.len());
        let mut symbol_sum = 0.0;
        let mut weighted_symbol_sum = 0.0;
        for m in &reps {
            let index = grid.mode_to_index(m);
            let k2 = grid.k_squared()[index];
            let phi = spec.symbol.eval(k2);
            let multiplicity = if is_zero(m) { 1.0 } else { 2.0 };
            symbol_sum += multiplicity * phi * phi;
            weighted_symbol_sum += multiplicity * phi * phi * (1.0 + k2);
            let weight = spec.amplitude * phi;
            if is_zero(m) {
                basis.push(BasisFunction::Constant { weight: weight / volume.sqrt() * unitary });
            } else {
                let mirror: Vec<i64> = m.iter().map(|x| -x).collect();
                basis.push(BasisFunction::Pair {
                    index,
                    mirror: grid.mode_to_index(&mirror),
                    weight: 0.5 * nu * weight * unitary,
                });
            }
        }

        Ok(Self { grid: grid.clone(), amplitude: spec.amplitude, basis, symbol_sum, weighted_symbol_sum })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Number of real basis functions (constant counts one, pairs two).
    pub fn basis_size(&self) -> usize {
        self.basis
            .iter()
            .map(|b| match b {
                BasisFunction::Constant { .. } => 1,
                BasisFunction::Pair { .. } => 2,
            })
            .sum()
    }

    /// `Σ_{m ∈ K} φ̂(k)²` over the full (symmetric) lattice set.
    pub fn symbol_sum(&self) -> f64 {
        self.symbol_sum
    }

    /// `Σ_{m ∈ K} φ̂(k)² (1 + |k|²)`, a raw smoothness indicator for `φ`.
    pub fn weighted_symbol_sum(&self) -> f64 {
        self.weighted_symbol_sum
    }

    pub fn is_silent(&self) -> bool {
        self.amplitude == 0.0 || self.basis.is_empty()
    }

    /// Draws `ΔW` for a step of length `dt`.
    pub fn sample(&self, dt: f64, rng: &mut RngStream) -> Result<NoiseIncrement> {
        if !(dt > 0.0) {
            return Err(domain(format!("noise step must be positive, got {dt}")));
        }
        let mut values = vec![Complex64::default(); self.grid.len()];
        if !self.is_silent() {
            let root_dt = dt.sqrt();
            for b in &self.basis {
                match *b {
                    BasisFunction::Constant { weight } => {
                        values[0] = Complex64::new(root_dt * weight * rng.standard_normal(), 0.0);
                    }
                    BasisFunction::Pair { index, mirror, weight } => {
                        let a = rng.standard_normal();
                        let s = rng.standard_normal();
                        let c = Complex64::new(a, -s) * (root_dt * weight);
                        values[index] = c;
                        values[mirror] = c.conj();
                    }
                }
            }
            let mut field = Field::from_values(&self.grid, values, Representation::Spectral)?;
            field.set_repr(Representation::Physical);
            values = field.into_values();
            let scale = values.iter().map(|z| z.re.abs()).fold(1.0, f64::max);
            debug_assert!(values.iter().all(|z| z.im.abs() <= 1e-13 * scale));
            values.iter_mut().for_each(|z| z.im = 0.0);
        }
        let field = Field::from_values(&self.grid, values, Representation::Physical)?;
        Ok(NoiseIncrement { field, dt })
    }

    /// Itô–Stratonovich correction `F_φ(x) = ε² Σ_k (φ̂(k) ê_k(x))²` by
    /// direct summation over the basis.
    pub fn correction_field(&self) -> Field {
        let grid = &self.grid;
        let unitary = (grid.len() as f64).sqrt();
        let dim = grid.dim();
        let mut out = vec![0.0; grid.len()];
        for b in &self.basis {
            match *b {
                BasisFunction::Constant { weight } => {
                    let w = weight / unitary;
                    out.iter_mut().for_each(|v| *v += w * w);
                }
                BasisFunction::Pair { index, weight, .. } => {
                    // weight = ν ε φ̂ √(N^d) / 2
                    let w = 2.0 * weight / unitary;
                    let m = grid.mode(index);
                    let k: Vec<f64> = m[..dim]
                        .iter()
                        .map(|&mj| std::f64::consts::TAU * mj as f64 / grid.length())
                        .collect();
                    for (idx, v) in out.iter_mut().enumerate() {
                        let x = grid.coords(idx);
                        let phase: f64 = k.iter().zip(&x[..dim]).map(|(ki, xi)| ki * xi).sum();
                        let (s, c) = phase.sin_cos();
                        *v += w * w * (c * c + s * s);
                    }
                }
            }
        }
        Field::from_real(grid, &out).expect("grid-sized buffer")
    }
}

/// Convenience wrapper: build the frame and draw one increment.
pub fn sample_increment(
    spec: &NoiseSpec,
    grid: &Grid,
    dt: f64,
    rng: &mut RngStream,
) -> Result<NoiseIncrement> {
    NoiseSampler::new(spec, grid)?.sample(dt, rng)
}

/// Convenience wrapper for [`NoiseSampler::correction_field`].
pub fn correction_field(spec: &NoiseSpec, grid: &Grid) -> Result<Field> {
    Ok(NoiseSampler::new(spec, grid)?.correction_field())
}

fn is_zero(m: &[i64]) -> bool {
    m.iter().all(|&x| x == 0)
}

/// Representative of `±m`: the one whose first nonzero entry is positive.
fn canonical(m: &[i64]) -> Vec<i64> {
    match m.iter().find(|&&x| x != 0) {
        Some(&first) if first < 0 => m.iter().map(|x| -x).collect(),
        _ => m.to_vec(),
    }
}

fn cube_modes(k_max: i64, dim: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut m = vec![-k_max; dim];
    loop {
        if canonical(&m) == m {
            out.push(m.clone());
        }
        // odometer over [−k_max, k_max]^dim
        let mut axis = dim;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            if m[axis] < k_max {
                m[axis] += 1;
                break;
            }
            m[axis] = -k_max;
        }
    }
}

fn explicit_modes(modes: &[Vec<i64>], dim: usize, n: usize) -> Result<Vec<Vec<i64>>> {
    let mut out: Vec<Vec<i64>> = Vec::with_capacity(modes.len());
    for m in modes {
        if m.len() != dim {
            return Err(domain(format!("mode {m:?} does not have {dim} components")));
        }
        if m.iter().any(|&x| 2 * x.unsigned_abs() as usize >= n) {
            return Err(domain(format!("mode {m:?} is not resolved below N/2 = {}", n / 2)));
        }
        let c = canonical(m);
        if out.contains(&c) {
            return Err(domain(format!("mode {m:?} listed twice (up to sign)")));
        }
        out.push(c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    fn grid(dim: usize, n: usize, l: f64) -> Grid {
        Grid::new(GridSpec::new(dim, n, l).unwrap()).unwrap()
    }

    fn real_parts(inc: &NoiseIncrement) -> Vec<f64> {
        inc.field().values().iter().map(|z| z.re).collect()
    }

    #[test]
    fn cube_enumerates_half_lattice() {
        let m1 = cube_modes(2, 1);
        assert_eq!(m1, vec![vec![0], vec![1], vec![2]]);
        // (2k+1)^d lattice points → ((2k+1)^d + 1)/2 representatives
        assert_eq!(cube_modes(2, 2).len(), 13);
        assert_eq!(cube_modes(1, 3).len(), 14);
    }

    #[test]
    fn zero_amplitude_gives_zero_increment() {
        let g = grid(2, 16, 6.0);
        let spec = NoiseSpec::gaussian(1.0, 0.0);
        let mut rng = RngStream::new(1, 0);
        let inc = sample_increment(&spec, &g, 0.01, &mut rng).unwrap();
        assert!(inc.field().values().iter().all(|z| z.norm() == 0.0));
        let f = correction_field(&spec, &g).unwrap();
        assert!(f.values().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn nonpositive_step_is_rejected() {
        let g = grid(1, 16, 1.0);
        let spec = NoiseSpec::gaussian(1.0, 1.0);
        let mut rng = RngStream::new(1, 0);
        assert!(sample_increment(&spec, &g, 0.0, &mut rng).is_err());
        assert!(sample_increment(&spec, &g, -1.0, &mut rng).is_err());
    }

    #[test]
    fn unresolved_modes_are_rejected() {
        let g = grid(1, 16, 1.0);
        assert!(NoiseSampler::new(&NoiseSpec::gaussian(1.0, 1.0).with_k_max(8), &g).is_err());
        assert!(NoiseSampler::new(&NoiseSpec::gaussian(1.0, 1.0).with_modes(vec![vec![8]]), &g).is_err());
        assert!(NoiseSampler::new(&NoiseSpec::gaussian(1.0, 1.0).with_modes(vec![vec![2], vec![-2]]), &g)
            .is_err());
    }

    #[test]
    fn increments_are_real() {
        let g = grid(3, 16, 5.0);
        let spec = NoiseSpec::gaussian(2.0, 1.3);
        let sampler = NoiseSampler::new(&spec, &g).unwrap();
        let mut rng = RngStream::new(7, 3);
        let inc = sampler.sample(0.1, &mut rng).unwrap();
        check_real(inc.field()).unwrap();
        assert!(inc.field().lebesgue_norm(f64::INFINITY).unwrap() > 0.0);
    }

    #[test]
    fn constant_mode_variance() {
        let l = 3.0;
        let g = grid(1, 16, l);
        let (eps, dt) = (0.8, 0.02);
        let spec = NoiseSpec::gaussian(1.0, eps).with_k_max(0);
        let sampler = NoiseSampler::new(&spec, &g).unwrap();
        let mut rng = RngStream::new(11, 0);
        let n = 100_000;
        let mut sum2 = 0.0;
        for _ in 0..n {
            let w = real_parts(&sampler.sample(dt, &mut rng).unwrap());
            assert!(w.iter().all(|&x| (x - w[0]).abs() < 1e-14));
            sum2 += w[0] * w[0];
        }
        let var = sum2 / n as f64;
        // φ̂(0) = 1 for the gaussian symbol
        let expected = dt * eps * eps / l;
        let se = expected * (2.0 / n as f64).sqrt();
        assert!((var - expected).abs() < 3.0 * se, "{var} vs {expected}");
    }

    #[test]
    fn pointwise_variance_matches_direct_sum() {
        let g = grid(2, 16, 4.0);
        let (eps, dt) = (1.0, 0.05);
        let spec = NoiseSpec::gaussian(2.5, eps).with_k_max(3);
        let sampler = NoiseSampler::new(&spec, &g).unwrap();
        let expected: Vec<f64> = sampler.correction_field().values().iter().map(|z| z.re * dt).collect();
        let n = 10_000;
        let mut acc = vec![0.0; g.len()];
        let mut rng = RngStream::new(5, 1);
        for _ in 0..n {
            let w = real_parts(&sampler.sample(dt, &mut rng).unwrap());
            acc.iter_mut().zip(&w).for_each(|(a, x)| *a += x * x);
        }
        let rel_se = (2.0 / n as f64).sqrt();
        for idx in [0, 17, 100, 255] {
            let var = acc[idx] / n as f64;
            assert!(
                ((var - expected[idx]) / expected[idx]).abs() < 5.0 * rel_se,
                "idx {idx}: {var} vs {}",
                expected[idx]
            );
        }
    }

    #[test]
    fn correction_field_is_constant_for_full_pairs() {
        let l = 5.0;
        let g = grid(2, 16, l);
        let eps = 0.7;
        let spec =
            NoiseSpec { symbol: Symbol::Sobolev { s: 2.0 }, amplitude: eps, k_max: Some(4), modes: None };
        let sampler = NoiseSampler::new(&spec, &g).unwrap();
        let f = sampler.correction_field();
        let values: Vec<f64> = f.values().iter().map(|z| z.re).collect();
        let max = values.iter().cloned().fold(f64::MIN, f64::max);
        let min = values.iter().cloned().fold(f64::MAX, f64::min);
        assert!((max - min) / max < 1e-10);

        // ε²/L^d Σ_{|m|∞ ≤ 4} φ̂(k)², summed independently here
        let mut direct = 0.0;
        for m0 in -4i64..=4 {
            for m1 in -4i64..=4 {
                let k2 = (std::f64::consts::TAU / l).powi(2) * (m0 * m0 + m1 * m1) as f64;
                direct += (1.0 + k2).powf(-2.0);
            }
        }
        let expected = eps * eps * direct / (l * l);
        assert!((max - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn correction_field_single_constant_mode() {
        let l = 2.0;
        let g = grid(3, 8, l);
        let spec =
            NoiseSpec { symbol: Symbol::Sobolev { s: 1.0 }, amplitude: 0.5, k_max: Some(0), modes: None };
        let f = correction_field(&spec, &g).unwrap();
        let expected = 0.25 / l.powi(3);
        assert!(f.values().iter().all(|z| (z.re - expected).abs() < 1e-15));
    }

    #[test]
    fn stationary_covariance() {
        let l = 4.0;
        let g = grid(1, 32, l);
        let (eps, dt) = (1.0, 1.0);
        let spec = NoiseSpec::gaussian(3.0, eps).with_k_max(6);
        let sampler = NoiseSampler::new(&spec, &g).unwrap();
        let mut rng = RngStream::new(3, 9);
        let n = 20_000;
        let lag = 5;
        let (mut c_a, mut c_b) = (0.0, 0.0);
        for _ in 0..n {
            let w = real_parts(&sampler.sample(dt, &mut rng).unwrap());
            c_a += w[2] * w[2 + lag];
            c_b += w[19] * w[19 + lag];
        }
        c_a /= n as f64;
        c_b /= n as f64;
        // ε²/L Σ_m φ̂(k)² cos(k·lag·h)
        let h = l / 32.0;
        let theory: f64 = (-6i64..=6)
            .map(|m| {
                let k = std::f64::consts::TAU * m as f64 / l;
                (-k * k / 9.0).exp() * (k * lag as f64 * h).cos()
            })
            .sum::<f64>()
            / l;
        let var = sampler.symbol_sum() / l;
        let se = var * (2.0 / n as f64).sqrt();
        assert!((c_a - theory).abs() < 4.0 * se, "{c_a} vs {theory}");
        assert!((c_b - theory).abs() < 4.0 * se, "{c_b} vs {theory}");
    }

    #[test]
    fn successive_increments_uncorrelated() {
        let g = grid(1, 16, 2.0);
        let spec = NoiseSpec::gaussian(2.0, 1.0).with_k_max(3);
        let sampler = NoiseSampler::new(&spec, &g).unwrap();
        let mut rng = RngStream::new(21, 0);
        let n = 10_000;
        let mut prev = real_parts(&sampler.sample(0.1, &mut rng).unwrap())[4];
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let cur = real_parts(&sampler.sample(0.1, &mut rng).unwrap())[4];
            sxy += prev * cur;
            sxx += prev * prev;
            syy += cur * cur;
            prev = cur;
        }
        let corr = sxy / (sxx * syy).sqrt();
        assert!(corr.abs() <= 3.0 / (n as f64).sqrt(), "corr {corr}");
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let g = grid(1, 16, 2.0);
        let sampler = NoiseSampler::new(&NoiseSpec::gaussian(2.0, 1.0), &g).unwrap();
        let draw = |seed, idx| {
            let mut rng = RngStream::new(seed, idx);
            real_parts(&sampler.sample(0.1, &mut rng).unwrap())
        };
        assert_eq!(draw(1, 2), draw(1, 2));
        assert_ne!(draw(1, 2), draw(1, 3));
        assert_ne!(draw(1, 2), draw(2, 2));
        let mut rng = RngStream::for_trajectory(4, 1, 2);
        assert_eq!(rng.index(), (1 << 32) | 2);
        assert_eq!(rng.counter(), 0);
        rng.standard_normal();
        assert!(rng.counter() > 0);
    }

    #[test]
    fn concatenation_adds_fields_and_steps() {
        let g = grid(1, 16, 2.0);
        let sampler = NoiseSampler::new(&NoiseSpec::gaussian(2.0, 1.0), &g).unwrap();
        let mut rng = RngStream::new(0, 0);
        let a = sampler.sample(0.1, &mut rng).unwrap();
        let b = sampler.sample(0.2, &mut rng).unwrap();
        let c = a.concat(&b);
        assert!((c.dt() - 0.3).abs() < 1e-15);
        for i in 0..16 {
            let expect = a.field().values()[i] + b.field().values()[i];
            assert_eq!(c.field().values()[i], expect);
        }
    }
}
