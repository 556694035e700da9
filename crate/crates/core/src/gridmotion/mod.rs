//! Adaptive grid construction and motion.
//!
//! A [`MovingMesh`] is the image of a uniform reference grid on `[0, 1]`
//! under a monotone map onto `[0, l]`. Node density is steered by a monitor
//! function `w = 1 + α₁|u|^β₁ + α₂|∂u/∂x|^β₂`: the mesh is initialised by
//! equidistributing `w` and then relaxed in time with the parabolic
//! equation `∂/∂q (w ∂x/∂q) = β ∂x/∂t`.

mod mesh;
mod monitor;
mod motion;

pub use mesh::{Jacobian, MeshTrajectory, MovingMesh, MIN_INTERVALS};
pub use monitor::{evaluate_monitor, smooth_monitor, MonitorConfig, MonitorSamples};
pub use motion::{
    advance_mesh, equidistribute, equidistribution_residual, generate_initial_mesh, generate_initial_mesh_with,
};
