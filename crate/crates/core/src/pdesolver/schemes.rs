use crate::error::{Error, Result};
use crate::gridmotion::{advance_mesh, evaluate_monitor, smooth_monitor, MonitorConfig, MovingMesh};
use crate::tridiag::Tridiagonal;

use super::discretize::{assemble, coefficients, Assembly, Coefficients};
use super::problem::{BoundaryKind, DimensionlessProblem};
use super::state::FieldState;

/// Relative tolerance for treating a mesh as uniform.
const UNIFORM_TOL: f64 = 1e-9;

/// Scratch buffers reused across steps.
#[derive(Debug, Default)]
pub struct Workspace {
    coef: Coefficients,
    next_coef: Coefficients,
    sys: Tridiagonal,
    solution: Vec<f64>,
    scratch: Vec<f64>,
    mid: Vec<f64>,
    speed: Vec<f64>,
}

impl Workspace {
    fn resize(&mut self, n: usize) {
        if self.sys.len() != n {
            self.sys = Tridiagonal::zeros(n);
        }
        self.solution.resize(n, 0.0);
        self.scratch.resize(n, 0.0);
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("time step must be positive, got {dt}")))
    }
}

fn check_uniform(mesh: &MovingMesh, scheme: &str) -> Result<()> {
    if mesh.is_uniform(UNIFORM_TOL) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{scheme} requires a uniform mesh")))
    }
}

fn commit(state: &mut FieldState, ws: &mut Workspace, t_new: f64) -> Result<()> {
    if let Some(j) = ws.solution.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("temperature at node {j}, t = {t_new}")));
    }
    std::mem::swap(&mut state.u, &mut ws.solution);
    state.t = t_new;
    Ok(())
}

fn surface(u: &[f64]) -> [f64; 2] {
    [u[0], u[u.len() - 1]]
}

/// Implicit-diffusion step on a fixed uniform mesh, in place.
pub fn advance_imex(state: &mut FieldState, problem: &DimensionlessProblem, dt: f64, ws: &mut Workspace) -> Result<()> {
    check_dt(dt)?;
    check_uniform(&state.mesh, "the IMEX scheme")?;
    let x = state.mesh.nodes();
    ws.resize(x.len());
    coefficients(problem.medium.as_ref(), &state.u, x, &mut ws.coef);
    let t_new = state.t + dt;
    assemble(
        &Assembly {
            problem,
            geometry: x,
            target: x,
            mesh_speed: None,
            u_old: &state.u,
            coef: &ws.coef,
            dt,
            theta: 1.0,
            t_new,
            radiative_u: surface(&state.u),
        },
        &mut ws.sys,
    )?;
    ws.sys.solve_into(&mut ws.solution, &mut ws.scratch)?;
    commit(state, ws, t_new)
}

/// Moving-grid step, in place: relax the mesh towards equidistribution of
/// the smoothed monitor, then solve the field on the new nodes.
pub fn advance_qunt(
    state: &mut FieldState,
    problem: &DimensionlessProblem,
    cfg: &MonitorConfig,
    dt: f64,
    ws: &mut Workspace,
) -> Result<()> {
    check_dt(dt)?;
    let w = evaluate_monitor(&state.u, &state.mesh, cfg)?;
    let w = smooth_monitor(&w, cfg.sigma)?;
    let next = advance_mesh(&state.mesh, &w, dt, cfg.beta_mesh)?;
    let old = state.mesh.nodes();
    let new = next.nodes();
    ws.resize(old.len());
    ws.speed.clear();
    ws.speed.extend(new.iter().zip(old).map(|(a, b)| (a - b) / dt));
    coefficients(problem.medium.as_ref(), &state.u, old, &mut ws.coef);
    let t_new = state.t + dt;
    let geometry = if cfg.jacobian_at_new_level { new } else { old };
    assemble(
        &Assembly {
            problem,
            geometry,
            target: new,
            mesh_speed: Some(&ws.speed),
            u_old: &state.u,
            coef: &ws.coef,
            dt,
            theta: 1.0,
            t_new,
            radiative_u: surface(&state.u),
        },
        &mut ws.sys,
    )?;
    ws.sys.solve_into(&mut ws.solution, &mut ws.scratch)?;
    commit(state, ws, t_new)?;
    state.mesh = next;
    Ok(())
}

/// Crank–Nicolson step with coefficients evaluated at the midpoint state
/// `(uⁿ + uⁿ⁺¹)/2` and resolved by fixed-point iteration, in place.
///
/// Iteration stops once the next sweep cannot change the solution by more
/// than `fp_tol` (max norm). Returns the number of linear solves.
pub fn advance_crank_nicolson(
    state: &mut FieldState,
    problem: &DimensionlessProblem,
    dt: f64,
    fp_tol: f64,
    fp_max_iter: usize,
    ws: &mut Workspace,
) -> Result<usize> {
    check_dt(dt)?;
    check_uniform(&state.mesh, "the Crank-Nicolson scheme")?;
    if !(fp_tol > 0.0) || fp_max_iter == 0 {
        return Err(Error::invalid(
            "fixed-point tolerance and iteration limit must be positive",
        ));
    }
    let radiative = [&problem.left, &problem.right]
        .iter()
        .any(|b| b.kind == BoundaryKind::RobinRadiative && b.rlw != 0.0);
    let x = state.mesh.nodes();
    let n = x.len();
    ws.resize(n);
    let medium = problem.medium.as_ref();
    let t_new = state.t + dt;
    let mut iterate = state.u.clone();
    coefficients(medium, &state.u, x, &mut ws.coef);
    let mut change = f64::INFINITY;
    for iter in 1..=fp_max_iter {
        assemble(
            &Assembly {
                problem,
                geometry: x,
                target: x,
                mesh_speed: None,
                u_old: &state.u,
                coef: &ws.coef,
                dt,
                theta: 0.5,
                t_new,
                radiative_u: surface(&iterate),
            },
            &mut ws.sys,
        )?;
        ws.sys.solve_into(&mut ws.solution, &mut ws.scratch)?;
        change = ws
            .solution
            .iter()
            .zip(&iterate)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if !change.is_finite() {
            return Err(Error::NonFinite(format!("Crank-Nicolson iterate at t = {t_new}")));
        }
        std::mem::swap(&mut iterate, &mut ws.solution);
        ws.mid.clear();
        ws.mid.extend(state.u.iter().zip(&iterate).map(|(a, b)| 0.5 * (a + b)));
        coefficients(medium, &ws.mid, x, &mut ws.next_coef);
        let frozen = !radiative
            && ws.next_coef.capacity == ws.coef.capacity
            && ws.next_coef.conductivity == ws.coef.conductivity;
        std::mem::swap(&mut ws.coef, &mut ws.next_coef);
        if frozen || (iter > 1 && change <= fp_tol) {
            ws.solution = iterate;
            commit(state, ws, t_new)?;
            return Ok(iter);
        }
    }
    Err(Error::FixedPointNotConverged {
        iterations: fp_max_iter,
        change,
    })
}

/// One IMEX step on a uniform mesh.
pub fn step_imex_uniform(state: &FieldState, problem: &DimensionlessProblem, dt: f64) -> Result<FieldState> {
    let mut next = state.clone();
    advance_imex(&mut next, problem, dt, &mut Workspace::default())?;
    Ok(next)
}

/// One moving-grid step.
pub fn step_qunt(
    state: &FieldState,
    problem: &DimensionlessProblem,
    cfg: &MonitorConfig,
    dt: f64,
) -> Result<FieldState> {
    let mut next = state.clone();
    advance_qunt(&mut next, problem, cfg, dt, &mut Workspace::default())?;
    Ok(next)
}

/// One Crank–Nicolson step on a uniform mesh.
pub fn step_crank_nicolson(
    state: &FieldState,
    problem: &DimensionlessProblem,
    dt: f64,
    fp_tol: f64,
    fp_max_iter: usize,
) -> Result<FieldState> {
    let mut next = state.clone();
    advance_crank_nicolson(&mut next, problem, dt, fp_tol, fp_max_iter, &mut Workspace::default())?;
    Ok(next)
}
