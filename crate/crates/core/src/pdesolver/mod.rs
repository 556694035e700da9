//! Nonlinear heat conduction through a slab on `[0, 1]`.
//!
//! The dimensionless equation `c*(u) ∂u/∂t = Fo ∂/∂x (k*(u) ∂u/∂x)` is
//! advanced with one of three schemes sharing the same finite-difference
//! assembly: implicit diffusion on a fixed uniform grid ([`Scheme::Imex`]),
//! the same on an adaptive moving grid ([`Scheme::Qunt`]), and
//! Crank–Nicolson with fixed-point iteration ([`Scheme::CrankNicolson`]).
//! Boundary rows use a second-order one-sided derivative, so all systems
//! stay tridiagonal.

mod discretize;
mod problem;
mod scales;
mod schemes;
mod state;

pub use discretize::surface_gradient;
pub use problem::{
    constant, BoundaryKind, BoundarySpec, DimensionlessProblem, Homogeneous, Layered, Medium, PropertyFn, Side, Signal,
};
pub use scales::{
    nondimensionalize, redimensionalize_flux, redimensionalize_temperature, PhysicalBoundary, PhysicalLayer,
    PhysicalProblem, PhysicalSignal, ReferenceScales, STEFAN_BOLTZMANN,
};
pub use schemes::{
    advance_crank_nicolson, advance_imex, advance_qunt, step_crank_nicolson, step_imex_uniform, step_qunt, Workspace,
};
pub use state::FieldState;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gridmotion::{generate_initial_mesh, MonitorConfig, MovingMesh};

/// Dimensionless flux `q* = −k* ∂u/∂x` in the `+x` direction at the
/// boundary node on `side`.
pub fn boundary_flux(state: &FieldState, problem: &DimensionlessProblem, side: Side) -> Result<f64> {
    let x = state.mesh.nodes();
    let grad = surface_gradient(x, &state.u, side)?;
    let j = match side {
        Side::Left => 0,
        Side::Right => x.len() - 1,
    };
    Ok(-problem.medium.conductivity(state.u[j], x[j]) * grad)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Imex,
    Qunt,
    CrankNicolson,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Imex, Scheme::Qunt, Scheme::CrankNicolson];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Imex => "imex",
            Scheme::Qunt => "qunt",
            Scheme::CrankNicolson => "cn",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "imex" => Ok(Scheme::Imex),
            "qunt" => Ok(Scheme::Qunt),
            "cn" | "crank-nicolson" | "crank_nicolson" => Ok(Scheme::CrankNicolson),
            _ => Err(Error::invalid(format!(
                "unknown scheme '{s}' (expected imex, qunt or cn)"
            ))),
        }
    }
}

/// Scheme choice plus the knobs each scheme needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSettings {
    pub scheme: Scheme,
    /// Moving-grid parameters; ignored by the fixed-grid schemes.
    pub monitor: MonitorConfig,
    pub fp_tol: f64,
    pub fp_max_iter: usize,
}

impl SchemeSettings {
    pub fn new(scheme: Scheme, monitor: MonitorConfig) -> Self {
        Self {
            scheme,
            monitor,
            fp_tol: 1e-10,
            fp_max_iter: 50,
        }
    }
}

/// Advances a [`FieldState`] with a fixed scheme, reusing buffers.
#[derive(Debug)]
pub struct Integrator {
    settings: SchemeSettings,
    workspace: Workspace,
    fp_iterations: usize,
}

impl Integrator {
    pub fn new(settings: SchemeSettings) -> Result<Self> {
        if settings.scheme == Scheme::Qunt {
            settings.monitor.validate()?;
        }
        Ok(Self {
            settings,
            workspace: Workspace::default(),
            fp_iterations: 0,
        })
    }

    pub fn settings(&self) -> &SchemeSettings {
        &self.settings
    }

    /// Initial state at `t`: the moving grid starts from the
    /// equidistributed mesh of the initial field, the others from a
    /// uniform mesh.
    pub fn initial_state(&self, problem: &DimensionlessProblem, intervals: usize, t: f64) -> Result<FieldState> {
        let mesh = match self.settings.scheme {
            Scheme::Qunt => {
                let init = problem.initial.clone();
                generate_initial_mesh(move |x| init(x), intervals, 1.0, &self.settings.monitor)?
            }
            _ => MovingMesh::uniform(intervals, 1.0)?,
        };
        FieldState::sample(|x| (problem.initial)(x), mesh, t)
    }

    pub fn step(&mut self, state: &mut FieldState, problem: &DimensionlessProblem, dt: f64) -> Result<()> {
        let s = &self.settings;
        match s.scheme {
            Scheme::Imex => advance_imex(state, problem, dt, &mut self.workspace),
            Scheme::Qunt => advance_qunt(state, problem, &s.monitor, dt, &mut self.workspace),
            Scheme::CrankNicolson => {
                let it = advance_crank_nicolson(state, problem, dt, s.fp_tol, s.fp_max_iter, &mut self.workspace)?;
                self.fp_iterations += it;
                Ok(())
            }
        }
        .map_err(|e| Error::AtTime {
            time: state.t,
            source: Box::new(e),
        })
    }

    /// Total fixed-point sweeps performed so far (Crank–Nicolson only).
    pub fn fixed_point_iterations(&self) -> usize {
        self.fp_iterations
    }
}
