use num_complex::Complex64;

use super::grid::{Direction, Grid};
use crate::error::{contract, domain, Result};

/// Which basis the values of a [`Field`] are expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Spectral,
}

/// A complex function on a periodic grid.
///
/// Physical values are samples at `x_j = j·h`; spectral values are the
/// unitary DFT coefficients, so the discrete L² norm is
/// `h^{d/2}·‖values‖_{ℓ²}` in both representations.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
    repr: Representation,
}

impl Field {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Complex64::default(); grid.len()],
            repr: Representation::Physical,
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<Complex64>, repr: Representation) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(contract(format!(
                "expected {} values for grid {}, got {}",
                grid.len(),
                grid.spec(),
                values.len()
            )));
        }
        Ok(Self { grid: grid.clone(), values, repr })
    }

    pub fn from_real(grid: &Grid, values: &[f64]) -> Result<Self> {
        Self::from_values(
            grid,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            Representation::Physical,
        )
    }

    /// Samples `f` at every grid point (physical representation).
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let dim = grid.dim();
        let values = (0..grid.len())
            .map(|idx| {
                let x = grid.coords(idx);
                f(&x[..dim])
            })
            .collect();
        Self { grid: grid.clone(), values, repr: Representation::Physical }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn repr(&self) -> Representation {
        self.repr
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Physical → spectral. Fails if the field is already spectral.
    pub fn to_spectral(&self) -> Result<Field> {
        self.clone().into_spectral()
    }

    /// Spectral → physical. Fails if the field is already physical.
    pub fn to_physical(&self) -> Result<Field> {
        self.clone().into_physical()
    }

    pub fn into_spectral(mut self) -> Result<Field> {
        if self.repr != Representation::Physical {
            return Err(contract("to_spectral expects a physical field"));
        }
        self.grid.transform(&mut self.values, Direction::Forward);
        self.repr = Representation::Spectral;
        Ok(self)
    }

    pub fn into_physical(mut self) -> Result<Field> {
        if self.repr != Representation::Spectral {
            return Err(contract("to_physical expects a spectral field"));
        }
        self.grid.transform(&mut self.values, Direction::Inverse);
        self.repr = Representation::Physical;
        Ok(self)
    }

    /// Converts in place to `repr`, doing nothing if already there.
    pub fn set_repr(&mut self, repr: Representation) {
        if self.repr != repr {
            let direction = match repr {
                Representation::Spectral => Direction::Forward,
                Representation::Physical => Direction::Inverse,
            };
            self.grid.transform(&mut self.values, direction);
            self.repr = repr;
        }
    }

    /// A copy in the physical representation.
    pub fn physical(&self) -> Field {
        let mut f = self.clone();
        f.set_repr(Representation::Physical);
        f
    }

    /// A copy in the spectral representation.
    pub fn spectral(&self) -> Field {
        let mut f = self.clone();
        f.set_repr(Representation::Spectral);
        f
    }

    /// Partial derivatives `∂_j f`, each in the physical representation.
    ///
    /// Spectral multiplier `i·k_j`, with the Nyquist coefficient set to zero.
    pub fn gradient(&self) -> Vec<Field> {
        let spectral = self.spectral();
        let symbol = self.grid.derivative_symbol();
        (0..self.grid.dim())
            .map(|axis| {
                let mut values = spectral.values.clone();
                for (idx, z) in values.iter_mut().enumerate() {
                    let k = symbol[self.grid.axis_index(idx, axis)];
                    *z = Complex64::new(-k * z.im, k * z.re);
                }
                let mut g = Field { grid: self.grid.clone(), values, repr: Representation::Spectral };
                g.set_repr(Representation::Physical);
                g
            })
            .collect()
    }

    /// `(h^d Σ|f|^p)^{1/p}`, or the grid maximum for `p = ∞`.
    pub fn lebesgue_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let f = self.physical();
        Ok(lebesgue_of_values(&f.values, p, self.grid.cell_volume()))
    }

    /// `‖f‖_p + Σ_j ‖∂_j f‖_p`.
    pub fn sobolev_w1p_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let w = self.grid.cell_volume();
        let f = self.physical();
        let mut total = lebesgue_of_values(&f.values, p, w);
        for g in self.gradient() {
            total += lebesgue_of_values(&g.values, p, w);
        }
        Ok(total)
    }

    /// `(‖f‖₂² + ‖∇f‖₂²)^{1/2}`, evaluated on the spectral side.
    pub fn h1_norm(&self) -> f64 {
        let f = self.spectral();
        let g2 = self.grid.gradient_squared();
        let sum: f64 = f.values.iter().zip(g2).map(|(z, k2)| (1.0 + k2) * z.norm_sqr()).sum();
        (self.grid.cell_volume() * sum).sqrt()
    }

    /// `‖∇f‖₂²`.
    pub fn gradient_l2_squared(&self) -> f64 {
        let f = self.spectral();
        let g2 = self.grid.gradient_squared();
        let sum: f64 = f.values.iter().zip(g2).map(|(z, k2)| k2 * z.norm_sqr()).sum();
        self.grid.cell_volume() * sum
    }

    /// Discrete L² norm computed from the coefficients as they are stored.
    ///
    /// Equal to `lebesgue_norm(2)` in either representation (Parseval).
    pub fn stored_l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|z| z.norm_sqr()).sum();
        (self.grid.cell_volume() * s).sqrt()
    }

    /// `S(t) f = e^{−itΔ} f`, i.e. the spectral multiplier `exp(i|k|²t)`.
    ///
    /// The result has the same representation as `self`.
    pub fn free_propagate(&self, t: f64) -> Field {
        Propagator::new(&self.grid, t).apply(self)
    }

    /// `max_x |self − other|` over the stored values.
    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.values.iter_mut().for_each(|z| *z *= factor);
    }
}

/// Precomputed free-propagator multipliers `exp(i|k|²t)` for a fixed `t`.
#[derive(Debug, Clone)]
pub struct Propagator {
    multipliers: Vec<Complex64>,
}

impl Propagator {
    pub fn new(grid: &Grid, t: f64) -> Self {
        let multipliers = grid.k_squared().iter().map(|k2| Complex64::from_polar(1.0, k2 * t)).collect();
        Self { multipliers }
    }

    /// Multiplies spectral coefficients in place.
    pub fn apply_spectral(&self, values: &mut [Complex64]) {
        values.iter_mut().zip(&self.multipliers).for_each(|(z, m)| *z *= m);
    }

    pub fn apply(&self, f: &Field) -> Field {
        let repr = f.repr();
        let mut out = f.spectral();
        self.apply_spectral(&mut out.values);
        out.set_repr(repr);
        out
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(domain(format!("Lebesgue exponent must be >= 1, got {p}")));
    }
    Ok(())
}

pub(crate) fn lebesgue_of_values(values: &[Complex64], p: f64, cell_volume: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    if p == 2.0 {
        let s: f64 = values.iter().map(|z| z.norm_sqr()).sum();
        return (cell_volume * s).sqrt();
    }
    let s: f64 = values.iter().map(|z| z.norm().powf(p)).sum();
    (cell_volume * s).powf(p.recip())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{PI, TAU};

    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::spectral::GridSpec;

    fn grid(dim: usize, n: usize, l: f64) -> Grid {
        Grid::new(GridSpec::new(dim, n, l).unwrap()).unwrap()
    }

    fn random_field(grid: &Grid, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Field::from_values(grid, values, Representation::Physical).unwrap()
    }

    fn gaussian(grid: &Grid, width: f64) -> Field {
        let c = 0.5 * grid.length();
        Field::from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|xi| (xi - c) * (xi - c)).sum();
            Complex64::new((-r2 / (2.0 * width * width)).exp(), 0.0)
        })
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn constant_field_has_single_zero_mode() {
        for dim in 1..=3 {
            let g = grid(dim, 8, 3.0);
            let c = Complex64::new(0.7, -1.1);
            let f = Field::from_fn(&g, |_| c).to_spectral().unwrap();
            let expected = c.norm() * (g.len() as f64).sqrt();
            assert!((f.values()[0].norm() - expected).abs() < 1e-12 * expected);
            assert!(f.values()[1..].iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn plane_wave_has_single_mode() {
        let g = grid(2, 16, 2.0);
        let m = [3i64, -2];
        let k: Vec<f64> = m.iter().map(|&mj| TAU * mj as f64 / g.length()).collect();
        let f = Field::from_fn(&g, |x| Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1]));
        let s = f.to_spectral().unwrap();
        let target = g.mode_to_index(&m);
        for (idx, z) in s.values().iter().enumerate() {
            if idx == target {
                assert!((z.norm() - 16.0).abs() < 1e-12);
            } else {
                assert!(z.norm() < 1e-11);
            }
        }
    }

    #[test]
    fn wrong_representation_is_rejected() {
        let g = grid(1, 8, 1.0);
        let f = Field::zeros(&g);
        assert!(f.to_physical().is_err());
        assert!(f.to_spectral().unwrap().to_spectral().is_err());
    }

    #[test]
    fn round_trip_is_identity_all_dims() {
        for dim in 1..=3 {
            let g = grid(dim, 16, 5.0);
            let f = random_field(&g, dim as u64);
            let back = f.to_spectral().unwrap().to_physical().unwrap();
            let scale = f.lebesgue_norm(f64::INFINITY).unwrap();
            assert!(f.max_abs_diff(&back) <= 1e-12 * scale);
        }
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = grid(3, 8, 1.0);
        let f = Field::from_fn(&g, |_| Complex64::new(2.0, 1.0));
        for d in f.gradient() {
            assert!(d.lebesgue_norm(f64::INFINITY).unwrap() < 1e-12);
        }
    }

    #[test]
    fn gradient_of_sine() {
        let l = 3.0;
        let g = grid(1, 32, l);
        let f = Field::from_fn(&g, |x| Complex64::new((TAU * x[0] / l).sin(), 0.0));
        let d = &f.gradient()[0];
        let expected = Field::from_fn(&g, |x| Complex64::new(TAU / l * (TAU * x[0] / l).cos(), 0.0));
        assert!(d.max_abs_diff(&expected) < 1e-10);
    }

    #[test]
    fn gradient_of_plane_wave_is_eigen() {
        let g = grid(3, 8, 2.0);
        let m = [1i64, -3, 2];
        let k: Vec<f64> = m.iter().map(|&mj| TAU * mj as f64 / g.length()).collect();
        let f =
            Field::from_fn(&g, |x| Complex64::from_polar(1.0, k.iter().zip(x).map(|(ki, xi)| ki * xi).sum()));
        for (axis, d) in f.gradient().iter().enumerate() {
            let mut expected = f.clone();
            expected.scale(Complex64::new(0.0, k[axis]));
            assert!(d.max_abs_diff(&expected) < 1e-11);
        }
    }

    #[test]
    fn lebesgue_norm_of_constant() {
        let l = 2.5;
        for dim in 1..=3 {
            let g = grid(dim, 8, l);
            let c = Complex64::new(-0.3, 0.4);
            let f = Field::from_fn(&g, |_| c);
            for p in [1.0, 2.0, 2.4, 7.0] {
                let expected = c.norm() * l.powf(dim as f64 / p);
                assert!(rel(f.lebesgue_norm(p).unwrap(), expected) < 1e-12);
                assert!(rel(f.sobolev_w1p_norm(p).unwrap(), expected) < 1e-12);
            }
            assert!(rel(f.lebesgue_norm(f64::INFINITY).unwrap(), 0.5) < 1e-12);
        }
    }

    #[test]
    fn zero_field_norms_vanish() {
        let f = Field::zeros(&grid(2, 8, 1.0));
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert_eq!(f.lebesgue_norm(p).unwrap(), 0.0);
        }
        assert_eq!(f.h1_norm(), 0.0);
    }

    #[test]
    fn sub_unit_exponent_is_domain_error() {
        let f = Field::zeros(&grid(1, 8, 1.0));
        assert!(f.lebesgue_norm(0.5).is_err());
        assert!(f.sobolev_w1p_norm(0.99).is_err());
        assert!(f.lebesgue_norm(f64::NAN).is_err());
    }

    #[test]
    fn normalized_gaussian_l2_matches_closed_form() {
        // ∫ |π^{-d/4} w^{-d/2} e^{-r²/2w²}|² dx = 1 on ℝ^d
        for dim in 1..=3 {
            let w = 1.0;
            let g = grid(dim, 32, 16.0);
            let mut f = gaussian(&g, w);
            f.scale(Complex64::new(PI.powf(-(dim as f64) / 4.0) * w.powf(-(dim as f64) / 2.0), 0.0));
            let n2 = f.lebesgue_norm(2.0).unwrap().powi(2);
            assert!((n2 - 1.0).abs() < 1e-6, "dim {dim}: {n2}");
        }
    }

    #[test]
    fn plane_wave_h1_norm() {
        let l = 2.0;
        let g = grid(2, 16, l);
        let m = [2i64, 1];
        let k: Vec<f64> = m.iter().map(|&mj| TAU * mj as f64 / l).collect();
        let f = Field::from_fn(&g, |x| Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1]));
        let k2 = k[0] * k[0] + k[1] * k[1];
        let expected = (1.0 + k2).sqrt() * l;
        assert!(rel(f.h1_norm(), expected) < 1e-12);
    }

    #[test]
    fn sobolev_norms_converge_under_refinement() {
        // grid-refinement oracle: the same bump at 4N
        let l = 20.0;
        let bump = |n: usize| {
            let g = grid(1, n, l);
            Field::from_fn(&g, |x| {
                let y = x[0] - 0.5 * l;
                Complex64::new((-y * y / 2.0).exp(), 0.3 * (-y * y).exp() * y)
            })
        };
        let coarse = bump(256);
        let fine = bump(1024);
        let p = 12.0 / 5.0;
        let a = coarse.sobolev_w1p_norm(p).unwrap();
        let b = fine.sobolev_w1p_norm(p).unwrap();
        assert!(rel(a, b) < 1e-5, "{a} vs {b}");
        assert!(rel(coarse.h1_norm(), fine.h1_norm()) < 1e-5);
    }

    #[test]
    fn free_propagate_zero_time_is_identity() {
        let g = grid(2, 16, 4.0);
        let f = random_field(&g, 9);
        assert!(f.free_propagate(0.0).max_abs_diff(&f) < 1e-14);
    }

    #[test]
    fn free_gaussian_matches_closed_form() {
        // exp(i k² t) on exp(-x²/2w²) gives sqrt(w²/s)·exp(-x²/2s), s = w² − 2it
        let l = 40.0;
        let w = 1.0;
        let g = grid(1, 256, l);
        let f = gaussian(&g, w);
        for t in [0.1, 0.5, 1.5] {
            let s = Complex64::new(w * w, -2.0 * t);
            let expected = Field::from_fn(&g, |x| {
                let y = x[0] - 0.5 * l;
                (Complex64::new(w * w, 0.0) / s).sqrt() * (-(y * y) / (2.0 * s)).exp()
            });
            assert!(f.free_propagate(t).max_abs_diff(&expected) < 1e-6);
        }
    }

    fn l2_diff(a: &Field, b: &Field) -> f64 {
        let diff: Vec<Complex64> = a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect();
        lebesgue_of_values(&diff, 2.0, a.grid().cell_volume())
    }

    fn arbitrary_field(dim: usize) -> impl Strategy<Value = Field> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8usize.pow(dim as u32)).prop_map(move |v| {
            let g = grid(dim, 8, 3.0);
            let values = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            Field::from_values(&g, values, Representation::Physical).unwrap()
        })
    }

    proptest! {
        #[test]
        fn parseval_and_unitarity(f in (1usize..=3).prop_flat_map(arbitrary_field), t in -2.0f64..2.0) {
            let n = f.lebesgue_norm(2.0).unwrap();
            let s = f.to_spectral().unwrap();
            prop_assert!((s.stored_l2_norm() - n).abs() <= 1e-12 * n.max(1e-300));
            prop_assert!((s.lebesgue_norm(2.0).unwrap() - n).abs() <= 1e-12 * n.max(1e-300));
            let moved = f.free_propagate(t);
            prop_assert!((moved.lebesgue_norm(2.0).unwrap() - n).abs() <= 1e-12 * n.max(1e-300));
            let h1 = f.h1_norm();
            prop_assert!((moved.h1_norm() - h1).abs() <= 1e-12 * h1.max(1e-300));
        }

        #[test]
        fn propagator_group_and_commutation(f in (1usize..=3).prop_flat_map(arbitrary_field), s in -1.0f64..1.0, t in -1.0f64..1.0) {
            let n = f.lebesgue_norm(2.0).unwrap().max(1e-300);
            let once = f.free_propagate(s + t);
            let twice = f.free_propagate(s).free_propagate(t);
            prop_assert!(l2_diff(&once, &twice) <= 1e-12 * n);
            let g1 = f.free_propagate(t).gradient();
            let g2: Vec<Field> = f.gradient().iter().map(|g| g.free_propagate(t)).collect();
            for (a, b) in g1.iter().zip(&g2) {
                let gn = b.lebesgue_norm(2.0).unwrap().max(1e-300);
                prop_assert!(l2_diff(a, b) <= 1e-12 * gn);
            }
        }
    }
}
