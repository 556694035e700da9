use log::warn;

use crate::error::{Error, Result};
use crate::tridiag::Tridiagonal;

use super::mesh::{MovingMesh, MIN_INTERVALS};
use super::monitor::{evaluate_monitor, smooth_monitor, MonitorConfig, MonitorSamples};

/// Largest `|w_{j+½}Δx_{j+½} − w_{j−½}Δx_{j−½}|` over the interior nodes.
pub fn equidistribution_residual(mesh: &MovingMesh, w: &MonitorSamples) -> f64 {
    let wv = w.values();
    let widths: Vec<f64> = mesh.widths().collect();
    (1..widths.len())
        .map(|j| (wv[j] * widths[j] - wv[j - 1] * widths[j - 1]).abs())
        .fold(0.0, f64::max)
}

fn check_samples(mesh_intervals: usize, w: &MonitorSamples) -> Result<()> {
    if w.len() != mesh_intervals {
        return Err(Error::invalid(format!(
            "monitor has {} samples for a mesh with {} intervals",
            w.len(),
            mesh_intervals
        )));
    }
    Ok(())
}

/// Mesh that exactly equidistributes a fixed monitor: solves
/// `w_{j+½}(x_{j+1} − x_j) = w_{j−½}(x_j − x_{j−1})` with pinned ends.
pub fn equidistribute(w: &MonitorSamples, length: f64) -> Result<MovingMesh> {
    let n = w.len();
    if n < MIN_INTERVALS {
        return Err(Error::TooFewNodes {
            nodes: n + 1,
            min: MIN_INTERVALS + 1,
        });
    }
    if !(length > 0.0) {
        return Err(Error::invalid("domain length must be positive"));
    }
    let wv = w.values();
    let mut sys = Tridiagonal::zeros(n + 1);
    sys.diag[0] = 1.0;
    sys.diag[n] = 1.0;
    sys.rhs[n] = length;
    for j in 1..n {
        sys.lower[j] = -wv[j - 1];
        sys.diag[j] = wv[j - 1] + wv[j];
        sys.upper[j] = -wv[j];
    }
    let nodes = sys.solve()?;
    MovingMesh::from_solved(nodes.clone(), length).map_err(|j| Error::NodeOrdering {
        index: j,
        left: nodes[j],
        right: nodes[j + 1],
    })
}

/// Initial adaptive mesh for a field given as a function of position.
///
/// The monitor is evaluated from `initial_field` on the current mesh and
/// smoothed with `cfg.sigma` on every sweep.
pub fn generate_initial_mesh<F>(
    initial_field: F,
    intervals: usize,
    length: f64,
    cfg: &MonitorConfig,
) -> Result<MovingMesh>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    generate_initial_mesh_with(intervals, length, cfg, |mesh| {
        let u: Vec<f64> = mesh.nodes().iter().map(|&x| initial_field(x)).collect();
        smooth_monitor(&evaluate_monitor(&u, mesh, cfg)?, cfg.sigma)
    })
}

/// Damped fixed-point iteration for the equidistributed mesh, starting from
/// a uniform grid. `monitor` maps the current mesh to monitor samples; it is
/// called once per sweep.
pub fn generate_initial_mesh_with<M>(
    intervals: usize,
    length: f64,
    cfg: &MonitorConfig,
    mut monitor: M,
) -> Result<MovingMesh>
where
    M: FnMut(&MovingMesh) -> Result<MonitorSamples>,
{
    let mut mesh = MovingMesh::uniform(intervals, length)?;
    let tol = cfg.init_tol * length;
    let omega = cfg.init_relaxation;
    let mut residual = f64::INFINITY;
    for _ in 0..cfg.init_max_iter {
        let w = monitor(&mesh)?;
        check_samples(intervals, &w)?;
        residual = equidistribution_residual(&mesh, &w);
        if residual <= tol {
            return Ok(mesh);
        }
        let target = equidistribute(&w, length)?;
        let nodes: Vec<f64> = mesh
            .nodes()
            .iter()
            .zip(target.nodes())
            .map(|(old, new)| (1.0 - omega) * old + omega * new)
            .collect();
        mesh = MovingMesh::from_solved(nodes.clone(), length).map_err(|j| Error::NodeOrdering {
            index: j,
            left: nodes[j],
            right: nodes[j + 1],
        })?;
    }
    // the last update has not been checked yet
    let w = monitor(&mesh)?;
    let last = equidistribution_residual(&mesh, &w);
    if last <= tol {
        return Ok(mesh);
    }
    Err(Error::MeshNotConverged {
        iterations: cfg.init_max_iter,
        residual: last.min(residual),
    })
}

/// One implicit step of the mesh equation
/// `(1/h)[w_{j+½}(x_{j+1} − x_j)/h − w_{j−½}(x_j − x_{j−1})/h] = β(x_j − x_j^n)/Δt`
/// with both end nodes pinned.
pub fn advance_mesh(mesh: &MovingMesh, w: &MonitorSamples, dt: f64, beta_mesh: f64) -> Result<MovingMesh> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    if !(beta_mesh > 0.0 && beta_mesh.is_finite()) {
        return Err(Error::invalid(format!("beta must be positive, got {beta_mesh}")));
    }
    let n = mesh.intervals();
    check_samples(n, w)?;
    let wv = w.values();
    let x = mesh.nodes();
    let r = dt * (n * n) as f64;
    let mut sys = Tridiagonal::zeros(n + 1);
    sys.diag[0] = 1.0;
    sys.diag[n] = 1.0;
    sys.rhs[n] = mesh.length();
    for j in 1..n {
        sys.lower[j] = -r * wv[j - 1];
        sys.diag[j] = beta_mesh + r * (wv[j - 1] + wv[j]);
        sys.upper[j] = -r * wv[j];
        sys.rhs[j] = beta_mesh * x[j];
    }
    let nodes = sys.solve()?;
    let next = MovingMesh::from_solved(nodes, mesh.length()).map_err(|j| Error::NodeCrossing { index: j })?;
    let moved_too_far = next
        .nodes()
        .iter()
        .zip(x)
        .enumerate()
        .skip(1)
        .take(n - 1)
        .any(|(j, (a, b))| (a - b).abs() > (x[j + 1] - x[j]).min(x[j] - x[j - 1]));
    if moved_too_far {
        warn!("mesh node displacement exceeded the local interval width in one step (dt = {dt})");
    }
    Ok(next)
}
