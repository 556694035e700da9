use crate::error::{Error, Result};
use crate::tridiag::Tridiagonal;

use super::mesh::MovingMesh;

/// Parameters of the monitor function, the mesh relaxation and the
/// initial-grid iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorConfig {
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
    /// Inverse diffusion coefficient β of the mesh equation.
    pub beta_mesh: f64,
    /// Smoothing parameter σ.
    pub sigma: f64,
    /// Equidistribution tolerance, relative to the domain length.
    pub init_tol: f64,
    pub init_max_iter: usize,
    /// Under-relaxation ω of the initial-grid fixed point.
    pub init_relaxation: f64,
    /// Evaluate the Jacobian of the moving-grid field scheme on the new
    /// mesh. With `false` the old mesh is used; that variant does not keep
    /// linear profiles steady and goes unstable on fine grids.
    pub jacobian_at_new_level: bool,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        Self::benchmark()
    }
}

impl MonitorConfig {
    /// Parameter set tuned for the nonlinear benchmark.
    pub fn benchmark() -> Self {
        Self {
            alpha1: 0.9,
            beta1: 2.0,
            alpha2: 0.1,
            beta2: 2.0,
            beta_mesh: 100.0,
            sigma: 10.0,
            init_tol: 1e-10,
            init_max_iter: 200,
            init_relaxation: 0.5,
            jacobian_at_new_level: true,
        }
    }

    /// Parameter set used for the wall simulations.
    pub fn envelope() -> Self {
        Self {
            alpha1: 0.8,
            beta1: 2.0,
            alpha2: 0.2,
            beta2: 3.0,
            beta_mesh: 50.0,
            sigma: 5.0,
            ..Self::benchmark()
        }
    }

    /// A monitor that is identically one: the mesh never moves.
    pub fn degenerate() -> Self {
        Self {
            alpha1: 0.0,
            alpha2: 0.0,
            ..Self::benchmark()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.alpha1,
            self.beta1,
            self.alpha2,
            self.beta2,
            self.beta_mesh,
            self.sigma,
            self.init_tol,
            self.init_relaxation,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("monitor parameters must be finite"));
        }
        if self.alpha1 < 0.0 || self.alpha2 < 0.0 {
            return Err(Error::invalid("monitor weights alpha1, alpha2 must be >= 0"));
        }
        if self.beta1 <= 0.0 || self.beta2 <= 0.0 {
            return Err(Error::invalid("monitor exponents beta1, beta2 must be > 0"));
        }
        if self.beta_mesh <= 0.0 {
            return Err(Error::invalid("mesh diffusion parameter beta must be > 0"));
        }
        if self.sigma < 0.0 {
            return Err(Error::invalid("smoothing parameter sigma must be >= 0"));
        }
        if self.init_tol <= 0.0 || self.init_max_iter == 0 {
            return Err(Error::invalid(
                "initial-grid tolerance and iteration cap must be positive",
            ));
        }
        if !(self.init_relaxation > 0.0 && self.init_relaxation <= 1.0) {
            return Err(Error::invalid("initial-grid relaxation must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Monitor values on the `N` interval midpoints `j+½`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorSamples(Vec<f64>);

impl MonitorSamples {
    /// Wraps externally computed samples; every value must be finite and ≥ 1.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((j, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 1.0)) {
            return Err(Error::invalid(format!(
                "monitor sample {j} = {v} must be finite and >= 1"
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[inline]
fn pow_abs(v: f64, p: f64) -> f64 {
    let a = v.abs();
    if p == 2.0 {
        a * a
    } else if p == 1.0 {
        a
    } else if p == 3.0 {
        a * a * a
    } else {
        a.powf(p)
    }
}

/// `w_{j+½} = 1 + α₁|ū_{j+½}|^β₁ + α₂|(u_{j+1} − u_j)/(x_{j+1} − x_j)|^β₂`
/// with `ū_{j+½}` the mean of the two end values.
pub fn evaluate_monitor(field: &[f64], mesh: &MovingMesh, cfg: &MonitorConfig) -> Result<MonitorSamples> {
    let x = mesh.nodes();
    if field.len() != x.len() {
        return Err(Error::invalid(format!(
            "field has {} values but the mesh has {} nodes",
            field.len(),
            x.len()
        )));
    }
    let mut w = Vec::with_capacity(x.len() - 1);
    for j in 0..x.len() - 1 {
        let (a, b) = (field[j], field[j + 1]);
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite(format!("field value near node {j}")));
        }
        let dx = x[j + 1] - x[j];
        if !(dx > 0.0) {
            return Err(Error::NodeOrdering {
                index: j,
                left: x[j],
                right: x[j + 1],
            });
        }
        let mut v = 1.0;
        if cfg.alpha1 != 0.0 {
            v += cfg.alpha1 * pow_abs(0.5 * (a + b), cfg.beta1);
        }
        if cfg.alpha2 != 0.0 {
            v += cfg.alpha2 * pow_abs((b - a) / dx, cfg.beta2);
        }
        w.push(v);
    }
    Ok(MonitorSamples(w))
}

/// Implicit smoothing filter
/// `w̄_{j+½} = w_{j+½} − σ w̄_{j+½} + (σ/2)(w̄_{j−½} + w̄_{j+3/2})`
/// with the two end samples copied through unchanged.
pub fn smooth_monitor(w: &MonitorSamples, sigma: f64) -> Result<MonitorSamples> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::invalid(format!("smoothing parameter must be >= 0, got {sigma}")));
    }
    let n = w.len();
    if sigma == 0.0 || n < 3 {
        return Ok(w.clone());
    }
    let mut sys = Tridiagonal::zeros(n);
    sys.diag[0] = 1.0;
    sys.rhs[0] = w.0[0];
    sys.diag[n - 1] = 1.0;
    sys.rhs[n - 1] = w.0[n - 1];
    for i in 1..n - 1 {
        sys.lower[i] = -0.5 * sigma;
        sys.diag[i] = 1.0 + sigma;
        sys.upper[i] = -0.5 * sigma;
        sys.rhs[i] = w.0[i];
    }
    Ok(MonitorSamples(sys.solve()?))
}
