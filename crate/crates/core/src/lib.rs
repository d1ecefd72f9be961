//! Pseudo-spectral simulation of the focusing stochastic nonlinear Schrödinger
//! equation with conservative (real, Stratonovich) multiplicative noise
//!
//! ```text
//!     i ∂_t u − Δu = μ θ(‖u‖_{X¹([0,t])}/R) |u|^{p−1} u + u ∘ dW/dt
//! ```
//!
//! on a periodic box, together with the machinery to study how likely the
//! solution is to leave a ball of radius `R` in the space-time norm
//! `X¹ = L^∞_t H¹_x ∩ L^8_t W^{1,12/5}_x` within a short horizon `T`.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: periodic grids, unitary transforms, derivatives, Lebesgue
//!   and Sobolev norms, and the free propagator `S(t) = e^{−itΔ}`.
//! * [`noise`]: the real noise `W = Σ β_k φ e_k` as a smoothed trigonometric
//!   sum, per-step increments, the Itô correction `F_φ` and counter-based
//!   random streams.
//! * [`integrator`]: Strang split-step evolution with the cutoff `θ`, running
//!   X¹ accumulators and stopping-time detection.
//! * [`diagnostics`]: mass, energy, variance and the spectral-tail monitor.
//! * [`probes`]: numerical checks of the Khintchine constant, dispersive
//!   decay, moment growth of the stochastic convolution, and an RK4 oracle.
//! * [`montecarlo`]: ensembles over a ladder of horizons, exact binomial
//!   intervals, and the `ln p = a − c·T^{−β}` scaling fit.
//! * [`experiment`]: TOML experiment configs and the artifact-writing
//!   commands behind the `snls` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod initial;
pub mod integrator;
pub mod montecarlo;
pub mod noise;
pub mod probes;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
