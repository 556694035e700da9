use crate::error::{Error, Result};
use crate::gridmotion::MovingMesh;

/// Node temperatures on a mesh at dimensionless time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub u: Vec<f64>,
    pub mesh: MovingMesh,
    pub t: f64,
}

impl FieldState {
    pub fn new(u: Vec<f64>, mesh: MovingMesh, t: f64) -> Result<Self> {
        if u.len() != mesh.node_count() {
            return Err(Error::invalid(format!(
                "{} field values for {} mesh nodes",
                u.len(),
                mesh.node_count()
            )));
        }
        if let Some(j) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("field value at node {j}")));
        }
        if !t.is_finite() {
            return Err(Error::NonFinite("time".into()));
        }
        Ok(Self { u, mesh, t })
    }

    /// Samples `f` on the mesh nodes.
    pub fn sample(f: impl Fn(f64) -> f64, mesh: MovingMesh, t: f64) -> Result<Self> {
        let u = mesh.nodes().iter().map(|&x| f(x)).collect();
        Self::new(u, mesh, t)
    }

    /// Piecewise-linear interpolation of the field at `x`.
    pub fn interpolate(&self, x: f64) -> f64 {
        let nodes = self.mesh.nodes();
        let j = self.mesh.locate(x);
        let s = ((x - nodes[j]) / (nodes[j + 1] - nodes[j])).clamp(0.0, 1.0);
        self.u[j] + s * (self.u[j + 1] - self.u[j])
    }
}
