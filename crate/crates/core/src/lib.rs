//! Adaptive moving-grid solver for one-dimensional nonlinear heat
//! conduction, with the building-envelope and insulation-cost tooling built
//! on top of it.
//!
//! * [`gridmotion`]: monitor function, equidistributed initial grid and the
//!   parabolic mesh-motion equation.
//! * [`pdesolver`]: dimensionless problem setup and the three time-stepping
//!   schemes (IMEX on a fixed grid, IMEX on the moving grid, Crank–Nicolson).
//! * [`benchmark`]: the nonlinear benchmark, error metrics, convergence and
//!   runtime studies.
//! * [`envelope`]: wall assemblies, climate data, year-long simulations and
//!   transmission loads.
//! * [`econ`]: insulation cost model and optimum thickness.

// `!(x > 0.0)` is how NaN gets rejected alongside non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmark;
pub mod econ;
pub mod envelope;
mod error;
pub mod gridmotion;
pub mod pdesolver;
pub mod tridiag;

#[cfg(test)]
pub(crate) mod testing;

pub use error::{Error, Result};
