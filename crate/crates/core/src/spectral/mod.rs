//! Periodic grids, unitary spectral transforms, derivatives, norms and the
//! free Schrödinger propagator.
//!
//! The periodic box stands in for `ℝ^d`; it must be several data widths wide
//! and free evolution must stay below the wrap-around time (see
//! [`crate::probes::dispersive`]).

mod field;
mod grid;

pub(crate) use field::lebesgue_of_values;
pub use field::{Field, Propagator, Representation};
pub use grid::{mode_index, mode_number, Grid, GridSpec};
