use num_complex::Complex64;

use crate::spectral::{lebesgue_of_values, Field, Representation};

/// Exponent of the Sobolev component of the running X¹ norm.
pub const STRICHARTZ_EXPONENT: f64 = 12.0 / 5.0;

/// Norms of one snapshot that feed the running X¹ accumulators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotNorms {
    pub h1: f64,
    /// `‖u‖_{W^{1,12/5}}`
    pub w1p: f64,
    /// Fraction of spectral mass with `|m|_∞ > N/3`.
    pub tail_fraction: f64,
}

impl SnapshotNorms {
    /// Measures a field with a single forward transform.
    pub fn measure(u: &Field) -> Self {
        let grid = u.grid();
        let spectral = u.spectral();
        let cell = grid.cell_volume();
        let g2 = grid.gradient_squared();
        let n = grid.points();
        let band = n as f64 / 3.0;

        let mut h1_sum = 0.0;
        let mut total = 0.0;
        let mut tail = 0.0;
        for (idx, z) in spectral.values().iter().enumerate() {
            let e = z.norm_sqr();
            h1_sum += (1.0 + g2[idx]) * e;
            total += e;
            if max_abs_mode(grid, idx) as f64 > band {
                tail += e;
            }
        }

        let physical = match u.repr() {
            Representation::Physical => u.clone(),
            Representation::Spectral => u.physical(),
        };
        let mut w1p = lebesgue_of_values(physical.values(), STRICHARTZ_EXPONENT, cell);
        let symbol = grid.derivative_symbol();
        let mut buf = vec![Complex64::default(); grid.len()];
        for axis in 0..grid.dim() {
            for (idx, (slot, z)) in buf.iter_mut().zip(spectral.values()).enumerate() {
                let k = symbol[grid.axis_index(idx, axis)];
                *slot = Complex64::new(-k * z.im, k * z.re);
            }
            let mut d = Field::from_values(grid, std::mem::take(&mut buf), Representation::Spectral)
                .expect("grid-sized buffer");
            d.set_repr(Representation::Physical);
            w1p += lebesgue_of_values(d.values(), STRICHARTZ_EXPONENT, cell);
            buf = d.into_values();
        }

        Self { h1: (cell * h1_sum).sqrt(), w1p, tail_fraction: if total > 0.0 { tail / total } else { 0.0 } }
    }
}

pub(crate) fn max_abs_mode(grid: &crate::spectral::Grid, idx: usize) -> u64 {
    let m = grid.mode(idx);
    m.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
}

/// Time, field and running X¹ accumulators of one trajectory.
///
/// `x1 = sup_{s≤t} ‖u(s)‖_{H¹} + (∫₀ᵗ ‖u(s)‖⁸_{W^{1,12/5}} ds)^{1/8}`, with the
/// time integral accumulated by the composite trapezoid rule on step times.
#[derive(Debug, Clone)]
pub struct TrajectoryState {
    pub(crate) t: f64,
    pub(crate) steps: u64,
    pub(crate) u: Field,
    pub(crate) sup_h1: f64,
    pub(crate) int_w8: f64,
    pub(crate) last_w8: f64,
    pub(crate) x1: f64,
    pub(crate) last: SnapshotNorms,
}

impl TrajectoryState {
    pub fn new(u0: Field) -> Self {
        let u = u0.physical();
        let norms = SnapshotNorms::measure(&u);
        Self {
            t: 0.0,
            steps: 0,
            u,
            sup_h1: norms.h1,
            int_w8: 0.0,
            last_w8: norms.w1p.powi(8),
            x1: norms.h1,
            last: norms,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// The current field (physical representation).
    pub fn field(&self) -> &Field {
        &self.u
    }

    pub fn sup_h1(&self) -> f64 {
        self.sup_h1
    }

    pub fn int_w8(&self) -> f64 {
        self.int_w8
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    /// Norms of the current field.
    pub fn norms(&self) -> &SnapshotNorms {
        &self.last
    }

    /// Replaces the field after a step of length `dt` and folds the new
    /// snapshot into the accumulators.
    pub fn advance(&mut self, u: Field, dt: f64) {
        self.u = u;
        self.t = (self.steps + 1) as f64 * dt;
        self.steps += 1;
        self.update_running_x1(dt);
    }

    /// Folds the current field into `sup_h1` and `int_w8` (trapezoid over the
    /// last interval of length `dt`) and recomputes `x1`.
    pub fn update_running_x1(&mut self, dt: f64) {
        let norms = SnapshotNorms::measure(&self.u);
        let w8 = norms.w1p.powi(8);
        self.sup_h1 = self.sup_h1.max(norms.h1);
        self.int_w8 += 0.5 * dt * (self.last_w8 + w8);
        self.last_w8 = w8;
        self.x1 = self.sup_h1 + self.int_w8.powf(0.125);
        self.last = norms;
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::initial::InitialData;
    use crate::spectral::{Grid, GridSpec};

    fn grid() -> Grid {
        Grid::new(GridSpec::new(1, 32, 10.0).unwrap()).unwrap()
    }

    #[test]
    fn constant_in_time_integral_is_exact() {
        let u = InitialData::gaussian(1.0, 1.0).build(&grid()).unwrap();
        let w = u.sobolev_w1p_norm(STRICHARTZ_EXPONENT).unwrap();
        let mut s = TrajectoryState::new(u.clone());
        let dt = 0.01;
        for _ in 0..100 {
            s.advance(u.clone(), dt);
        }
        let expected = s.t() * w.powi(8);
        assert!((s.int_w8() - expected).abs() <= 1e-12 * expected);
        assert!((s.sup_h1() - u.h1_norm()).abs() <= 1e-14 * u.h1_norm());
    }

    #[test]
    fn snapshot_norms_agree_with_field_norms() {
        let u = InitialData::gaussian(1.3, 0.7).build(&grid()).unwrap();
        let n = SnapshotNorms::measure(&u);
        assert!((n.h1 - u.h1_norm()).abs() < 1e-13);
        assert!((n.w1p - u.sobolev_w1p_norm(STRICHARTZ_EXPONENT).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn accumulators_are_monotone_over_random_snapshots() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut s = TrajectoryState::new(Field::zeros(&g));
        let (mut sup, mut int, mut x1) = (s.sup_h1(), s.int_w8(), s.x1());
        for _ in 0..1000 {
            let amp: f64 = rng.random_range(0.0..2.0);
            let u = InitialData::gaussian(amp, rng.random_range(0.5..2.0)).build(&g).unwrap();
            s.advance(u, 1e-3);
            assert!(s.sup_h1() >= sup && s.int_w8() >= int && s.x1() >= x1);
            sup = s.sup_h1();
            int = s.int_w8();
            x1 = s.x1();
        }
    }
}
