use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Shape of a periodic box `[0, L)^d` sampled by `N` points per side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Spatial dimension, 1 to 3.
    pub dim: usize,
    /// Points per side; a power of two, at least 8.
    pub points: usize,
    /// Box side length.
    pub length: f64,
}

impl GridSpec {
    pub fn new(dim: usize, points: usize, length: f64) -> Result<Self> {
        let spec = Self { dim, points, length };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(domain(format!("dimension must be 1, 2 or 3, got {}", self.dim)));
        }
        if self.points < 8 || !self.points.is_power_of_two() {
            return Err(domain(format!("points per side must be a power of two >= 8, got {}", self.points)));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(domain(format!("box length must be positive, got {}", self.length)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn total_points(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    /// Quadrature weight `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{} on [0, {})^{}", self.points, self.dim, self.length, self.dim)
    }
}

/// Signed mode number of FFT index `j` on an `n`-point axis, in `[−n/2, n/2)`.
pub fn mode_number(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// FFT index of signed mode `m` on an `n`-point axis.
pub fn mode_index(m: i64, n: usize) -> usize {
    m.rem_euclid(n as i64) as usize
}

struct GridInner {
    spec: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Angular wavenumbers along one axis, in FFT order.
    wavenumbers: Vec<f64>,
    /// Derivative symbols along one axis (Nyquist entry zeroed).
    derivative: Vec<f64>,
    /// `|k|²` per flat index (Nyquist included), the propagator symbol.
    k_squared: Vec<f64>,
    /// `Σ_j (derivative_j)²` per flat index, the H¹ symbol.
    gradient_squared: Vec<f64>,
}

/// A [`GridSpec`] together with its FFT plans and wavenumber tables.
///
/// Cloning is cheap; all clones share the same plans.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("spec", &self.inner.spec).finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.spec == other.inner.spec
    }
}

#[derive(Clone, Copy)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

impl Grid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.points;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);

        let wavenumbers: Vec<f64> = (0..n).map(|j| TAU * mode_number(j, n) as f64 / spec.length).collect();
        let derivative: Vec<f64> =
            wavenumbers.iter().enumerate().map(|(j, &k)| if j == n / 2 { 0.0 } else { k }).collect();

        let total = spec.total_points();
        let mut k_squared = vec![0.0; total];
        let mut gradient_squared = vec![0.0; total];
        for idx in 0..total {
            let mut k2 = 0.0;
            let mut g2 = 0.0;
            for axis in 0..spec.dim {
                let j = axis_index(idx, axis, spec.dim, n);
                k2 += wavenumbers[j] * wavenumbers[j];
                g2 += derivative[j] * derivative[j];
            }
            k_squared[idx] = k2;
            gradient_squared[idx] = g2;
        }

        Ok(Self {
            inner: Arc::new(GridInner {
                spec,
                forward,
                inverse,
                wavenumbers,
                derivative,
                k_squared,
                gradient_squared,
            }),
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.inner.spec
    }

    pub fn dim(&self) -> usize {
        self.inner.spec.dim
    }

    pub fn points(&self) -> usize {
        self.inner.spec.points
    }

    pub fn length(&self) -> f64 {
        self.inner.spec.length
    }

    pub fn len(&self) -> usize {
        self.inner.k_squared.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.inner.spec.spacing()
    }

    pub fn cell_volume(&self) -> f64 {
        self.inner.spec.cell_volume()
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.inner.wavenumbers
    }

    pub(crate) fn derivative_symbol(&self) -> &[f64] {
        &self.inner.derivative
    }

    pub fn k_squared(&self) -> &[f64] {
        &self.inner.k_squared
    }

    pub(crate) fn gradient_squared(&self) -> &[f64] {
        &self.inner.gradient_squared
    }

    /// Index along `axis` of flat index `idx` (row-major, last axis fastest).
    pub fn axis_index(&self, idx: usize, axis: usize) -> usize {
        axis_index(idx, axis, self.dim(), self.points())
    }

    /// Signed mode vector of a flat spectral index (unused axes are zero).
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let mut m = [0i64; 3];
        for (axis, slot) in m.iter_mut().enumerate().take(self.dim()) {
            *slot = mode_number(self.axis_index(idx, axis), self.points());
        }
        m
    }

    /// Flat index of a signed mode vector.
    pub fn mode_to_index(&self, m: &[i64]) -> usize {
        let n = self.points();
        m.iter().take(self.dim()).fold(0, |acc, &mj| acc * n + mode_index(mj, n))
    }

    /// Physical coordinates of a flat grid index; unused axes are zero.
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let mut x = [0.0; 3];
        for (axis, slot) in x.iter_mut().enumerate().take(self.dim()) {
            *slot = self.axis_index(idx, axis) as f64 * h;
        }
        x
    }

    /// Box centre `L/2` (in every used axis). It is always a grid point.
    pub fn center(&self) -> [f64; 3] {
        let mut c = [0.0; 3];
        for slot in c.iter_mut().take(self.dim()) {
            *slot = 0.5 * self.length();
        }
        c
    }

    /// Unitary d-dimensional DFT in place (normalisation `N^{−d/2}`).
    pub(crate) fn transform(&self, data: &mut [Complex64], direction: Direction) {
        debug_assert_eq!(data.len(), self.len());
        let n = self.points();
        let d = self.dim();
        let fft = match direction {
            Direction::Forward => &self.inner.forward,
            Direction::Inverse => &self.inner.inverse,
        };
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];

        // last axis is contiguous: every chunk of n is one line
        fft.process_with_scratch(data, &mut scratch);

        if d > 1 {
            let mut lines = vec![Complex64::default(); data.len()];
            for axis in 0..d - 1 {
                let stride = n.pow((d - 1 - axis) as u32);
                let outer = data.len() / (n * stride);
                let mut line = 0;
                for o in 0..outer {
                    for i in 0..stride {
                        let base = o * n * stride + i;
                        let dst = &mut lines[line * n..(line + 1) * n];
                        for (j, slot) in dst.iter_mut().enumerate() {
                            *slot = data[base + j * stride];
                        }
                        line += 1;
                    }
                }
                fft.process_with_scratch(&mut lines, &mut scratch);
                let mut line = 0;
                for o in 0..outer {
                    for i in 0..stride {
                        let base = o * n * stride + i;
                        let src = &lines[line * n..(line + 1) * n];
                        for (j, value) in src.iter().enumerate() {
                            data[base + j * stride] = *value;
                        }
                        line += 1;
                    }
                }
            }
        }

        let scale = (self.len() as f64).sqrt().recip();
        data.iter_mut().for_each(|z| *z *= scale);
    }
}

fn axis_index(idx: usize, axis: usize, dim: usize, n: usize) -> usize {
    let stride = n.pow((dim - 1 - axis) as u32);
    (idx / stride) % n
}
