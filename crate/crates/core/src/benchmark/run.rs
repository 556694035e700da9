use std::io::Write;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::gridmotion::MeshTrajectory;
use crate::pdesolver::{boundary_flux, DimensionlessProblem, FieldState, Integrator, Scheme, SchemeSettings, Side};

use super::case::BenchmarkCase;

/// Saved snapshots of one simulation.
#[derive(Debug, Clone)]
pub struct SchemeOutput {
    pub scheme: Scheme,
    pub nx: usize,
    pub dt: f64,
    /// Field and mesh at each saved time, starting with `t = 0`.
    pub states: Vec<FieldState>,
    /// Boundary flux `q*` at each saved time: `[left, right]`.
    pub flux: Vec<[f64; 2]>,
    pub runtime: Duration,
}

impl SchemeOutput {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(|s| s.t)
    }

    pub fn trajectory(&self) -> MeshTrajectory {
        let mut tr = MeshTrajectory::default();
        for s in &self.states {
            tr.push((s.t / self.dt).round() as usize, s.t, &s.mesh);
        }
        tr
    }

    pub fn write_trajectory_csv<W: Write>(&self, out: W) -> Result<()> {
        self.trajectory().write_csv(out)
    }
}

/// Number of steps of size `dt` that make up `span`.
pub(crate) fn whole_steps(span: f64, dt: f64, what: &str) -> Result<usize> {
    let n = (span / dt).round();
    if n < 1.0 || (n * dt - span).abs() > 1e-9 * span.max(1.0) {
        return Err(Error::invalid(format!(
            "{what} {span} is not a whole number of time steps {dt}"
        )));
    }
    Ok(n as usize)
}

fn fluxes(state: &FieldState, problem: &DimensionlessProblem) -> Result<[f64; 2]> {
    Ok([
        boundary_flux(state, problem, Side::Left)?,
        boundary_flux(state, problem, Side::Right)?,
    ])
}

/// Runs `scheme` on the benchmark up to `horizon`, saving every
/// `save_every` time units.
pub fn simulate(
    case: &BenchmarkCase,
    scheme: Scheme,
    nx: usize,
    dt: f64,
    horizon: f64,
    save_every: f64,
) -> Result<SchemeOutput> {
    let problem = case.problem()?;
    let steps = whole_steps(horizon, dt, "horizon")?;
    let stride = whole_steps(save_every, dt, "save interval")?;
    if nx < 5 {
        return Err(Error::TooFewNodes { nodes: nx, min: 5 });
    }
    let mut integrator = Integrator::new(SchemeSettings::new(scheme, case.monitor.clone()))?;
    let start = Instant::now();
    let mut state = integrator.initial_state(&problem, nx - 1, 0.0)?;
    let mut states = vec![state.clone()];
    let mut flux = vec![fluxes(&state, &problem)?];
    for k in 1..=steps {
        integrator.step(&mut state, &problem, dt)?;
        if k % stride == 0 || k == steps {
            // pin the clock to the step count so saved times line up across runs
            state.t = k as f64 * dt;
            states.push(state.clone());
            flux.push(fluxes(&state, &problem)?);
        }
    }
    Ok(SchemeOutput {
        scheme,
        nx,
        dt,
        states,
        flux,
        runtime: start.elapsed(),
    })
}

/// Fine-grid Crank–Nicolson solution used as ground truth.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub output: SchemeOutput,
}

impl ReferenceSolution {
    /// Computes the reference with `nx_ref` nodes and step `dt_ref`.
    pub fn compute(case: &BenchmarkCase, nx_ref: usize, dt_ref: f64, save_every: f64) -> Result<Self> {
        let output = simulate(case, Scheme::CrankNicolson, nx_ref, dt_ref, case.tau, save_every)?;
        Ok(Self { output })
    }

    pub fn nx(&self) -> usize {
        self.output.nx
    }

    pub fn len(&self) -> usize {
        self.output.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.output.states.is_empty()
    }

    /// Reference field at saved level `k`, evaluated at `x` by four-point
    /// Lagrange interpolation on the reference grid.
    pub fn sample(&self, k: usize, x: f64) -> f64 {
        cubic_at(&self.output.states[k], x)
    }

    /// Largest nodal difference between two references of the same case,
    /// sampled at this reference's nodes.
    pub fn max_difference(&self, other: &ReferenceSolution) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::invalid("references have different save times"));
        }
        let mut worst = 0.0f64;
        for (k, s) in self.output.states.iter().enumerate() {
            for (&x, &u) in s.mesh.nodes().iter().zip(&s.u) {
                worst = worst.max((u - other.sample(k, x)).abs());
            }
        }
        Ok(worst)
    }
}

/// Four-point Lagrange interpolation of a nodal field.
pub(crate) fn cubic_at(state: &FieldState, x: f64) -> f64 {
    let nodes = state.mesh.nodes();
    let u = &state.u;
    let n = nodes.len();
    let j = state.mesh.locate(x);
    if x == nodes[j] {
        return u[j];
    }
    if x == nodes[j + 1] {
        return u[j + 1];
    }
    let k = j.clamp(1, n - 3) - 1;
    let xs = &nodes[k..k + 4];
    let mut acc = 0.0;
    for i in 0..4 {
        let mut l = 1.0;
        for m in 0..4 {
            if m != i {
                l *= (x - xs[m]) / (xs[i] - xs[m]);
            }
        }
        acc += l * u[k + i];
    }
    acc
}
