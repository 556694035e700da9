//! The nonlinear slab benchmark: reference solution, error metrics,
//! convergence study and runtime comparison.

mod case;
mod errors;
mod run;
mod study;

pub use case::{cstar, kstar, BenchmarkCase, OPERATING_RANGE};
pub use errors::{compute_errors, ErrorReport, Sampling};
pub use run::{simulate, ReferenceSolution, SchemeOutput};
pub use study::{
    convergence_study, runtime_comparison, AccuracyGate, ConvergenceCell, ConvergenceTable, RuntimeRow, RuntimeTable,
    GATE_EPS_INF,
};
