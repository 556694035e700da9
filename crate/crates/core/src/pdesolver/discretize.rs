//! Finite-difference assembly shared by the three schemes.

use crate::error::{Error, Result};
use crate::tridiag::Tridiagonal;

use super::problem::{BoundaryKind, DimensionlessProblem, Medium, Side};

/// Frozen coefficients for one linear solve.
#[derive(Debug, Clone, Default)]
pub(crate) struct Coefficients {
    /// Nodal storage coefficient.
    pub capacity: Vec<f64>,
    /// Interval conductivity `k_{j+½}`.
    pub conductivity: Vec<f64>,
    /// Conductivity used in the left and right boundary conditions.
    pub boundary: [f64; 2],
}

fn interfaces_in(interfaces: &[f64], a: f64, b: f64) -> &[f64] {
    let lo = interfaces.partition_point(|&s| s <= a);
    let hi = interfaces.partition_point(|&s| s < b);
    &interfaces[lo..hi.max(lo)]
}

/// Evaluates `c*` at nodes and `k*` on intervals for field `u` on `x`.
///
/// Within one material `k_{j+½}` is the mean of the two nodal values; an
/// interval cut by material interfaces gets the series (harmonic) average
/// of its pieces, and nodal capacity is the length-weighted average over
/// the node's dual cell.
pub(crate) fn coefficients(medium: &dyn Medium, u: &[f64], x: &[f64], out: &mut Coefficients) {
    let n = x.len() - 1;
    out.capacity.resize(n + 1, 0.0);
    out.conductivity.resize(n, 0.0);
    let interfaces = medium.interfaces();
    if interfaces.is_empty() {
        let mut k_prev = medium.conductivity(u[0], x[0]);
        out.boundary[0] = k_prev;
        out.capacity[0] = medium.capacity(u[0], x[0]);
        for j in 0..n {
            let k_next = medium.conductivity(u[j + 1], x[j + 1]);
            out.conductivity[j] = 0.5 * (k_prev + k_next);
            out.capacity[j + 1] = medium.capacity(u[j + 1], x[j + 1]);
            k_prev = k_next;
        }
        out.boundary[1] = k_prev;
        return;
    }

    for j in 0..n {
        let (a, b) = (x[j], x[j + 1]);
        let cuts = interfaces_in(interfaces, a, b);
        if cuts.is_empty() {
            let m = 0.5 * (a + b);
            out.conductivity[j] = 0.5 * (medium.conductivity(u[j], m) + medium.conductivity(u[j + 1], m));
            continue;
        }
        let mut resistance = 0.0;
        let mut start = a;
        for &end in cuts.iter().chain(std::iter::once(&b)) {
            let m = 0.5 * (start + end);
            let k = 0.5 * (medium.conductivity(u[j], m) + medium.conductivity(u[j + 1], m));
            resistance += (end - start) / k;
            start = end;
        }
        out.conductivity[j] = (b - a) / resistance;
    }

    for j in 0..=n {
        let a = if j == 0 { x[0] } else { 0.5 * (x[j - 1] + x[j]) };
        let b = if j == n { x[n] } else { 0.5 * (x[j] + x[j + 1]) };
        let cuts = interfaces_in(interfaces, a, b);
        if cuts.is_empty() {
            out.capacity[j] = medium.capacity(u[j], 0.5 * (a + b));
            continue;
        }
        let mut acc = 0.0;
        let mut start = a;
        for &end in cuts.iter().chain(std::iter::once(&b)) {
            acc += (end - start) * medium.capacity(u[j], 0.5 * (start + end));
            start = end;
        }
        out.capacity[j] = acc / (b - a);
    }

    let first = interfaces_in(interfaces, x[0], x[1]).first().copied().unwrap_or(x[1]);
    out.boundary[0] = medium.conductivity(u[0], 0.5 * (x[0] + first));
    let last = interfaces_in(interfaces, x[n - 1], x[n])
        .last()
        .copied()
        .unwrap_or(x[n - 1]);
    out.boundary[1] = medium.conductivity(u[n], 0.5 * (last + x[n]));
}

/// Outward normal derivative `∂u/∂n ≈ w0·u_b + w1·u_{b±1} + w2·u_{b±2}`
/// at a boundary node, plus the conductivity that multiplies it.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BoundaryStencil {
    pub weights: [f64; 3],
    pub conductivity: f64,
}

/// Second-order one-sided weights for `∂u/∂x` at `x[0]` from the first three
/// nodes of a (possibly non-uniform) mesh.
pub(crate) fn forward_weights(x0: f64, x1: f64, x2: f64) -> [f64; 3] {
    let h1 = x1 - x0;
    let h2 = x2 - x1;
    [
        -(2.0 * h1 + h2) / (h1 * (h1 + h2)),
        (h1 + h2) / (h1 * h2),
        -h1 / (h2 * (h1 + h2)),
    ]
}

/// Normal-derivative stencil on `side`. When a material interface lies
/// inside the two boundary intervals the three-point formula would
/// differentiate across a kink, so the two-point difference with the
/// series conductivity of the boundary interval is used instead.
pub(crate) fn boundary_stencil(medium: &dyn Medium, x: &[f64], coef: &Coefficients, side: Side) -> BoundaryStencil {
    let n = x.len() - 1;
    let interfaces = medium.interfaces();
    match side {
        Side::Left => {
            if interfaces_in(interfaces, x[0], x[2]).is_empty() {
                let w = forward_weights(x[0], x[1], x[2]);
                BoundaryStencil {
                    weights: [-w[0], -w[1], -w[2]],
                    conductivity: coef.boundary[0],
                }
            } else {
                let h = x[1] - x[0];
                BoundaryStencil {
                    weights: [1.0 / h, -1.0 / h, 0.0],
                    conductivity: coef.conductivity[0],
                }
            }
        }
        Side::Right => {
            if interfaces_in(interfaces, x[n - 2], x[n]).is_empty() {
                // the forward formula in y = −x gives −∂u/∂x at x_N
                let w = forward_weights(-x[n], -x[n - 1], -x[n - 2]);
                BoundaryStencil {
                    weights: [-w[0], -w[1], -w[2]],
                    conductivity: coef.boundary[1],
                }
            } else {
                let h = x[n] - x[n - 1];
                BoundaryStencil {
                    weights: [1.0 / h, -1.0 / h, 0.0],
                    conductivity: coef.conductivity[n - 1],
                }
            }
        }
    }
}

/// Everything needed to assemble one linear system.
pub(crate) struct Assembly<'a> {
    pub problem: &'a DimensionlessProblem,
    /// Geometry of the interior rows (Jacobians).
    pub geometry: &'a [f64],
    /// Node positions at the new time level (boundary stencils).
    pub target: &'a [f64],
    /// Mesh speed `(x^{n+1} − x^n)/Δt`, if the mesh moves.
    pub mesh_speed: Option<&'a [f64]>,
    pub u_old: &'a [f64],
    pub coef: &'a Coefficients,
    pub dt: f64,
    /// Implicit weight: 1 for IMEX, ½ for Crank–Nicolson.
    pub theta: f64,
    pub t_new: f64,
    /// Surface temperatures used in the long-wave term.
    pub radiative_u: [f64; 2],
}

pub(crate) fn assemble(a: &Assembly<'_>, sys: &mut Tridiagonal) -> Result<()> {
    let x = a.geometry;
    let n = x.len() - 1;
    if sys.len() != n + 1 {
        *sys = Tridiagonal::zeros(n + 1);
    }
    let fo = a.problem.fo;
    let inv_dt = 1.0 / a.dt;
    let theta = a.theta;
    let u = a.u_old;
    for j in 1..n {
        let dm = x[j] - x[j - 1];
        let dp = x[j + 1] - x[j];
        let c = a.coef.capacity[j];
        let m = c * 0.5 * (x[j + 1] - x[j - 1]) * inv_dt;
        let d_minus = fo * a.coef.conductivity[j - 1] / dm;
        let d_plus = fo * a.coef.conductivity[j] / dp;
        let adv = a.mesh_speed.map_or(0.0, |s| 0.5 * c * s[j]);
        sys.lower[j] = -theta * d_minus + adv;
        sys.diag[j] = m + theta * (d_minus + d_plus);
        sys.upper[j] = -theta * d_plus - adv;
        let mut rhs = m * u[j];
        if theta < 1.0 {
            rhs += (1.0 - theta) * (d_plus * (u[j + 1] - u[j]) - d_minus * (u[j] - u[j - 1]));
        }
        sys.rhs[j] = rhs;
    }
    boundary_row(a, sys, Side::Left)?;
    boundary_row(a, sys, Side::Right)?;
    Ok(())
}

fn boundary_row(a: &Assembly<'_>, sys: &mut Tridiagonal, side: Side) -> Result<()> {
    let n = a.geometry.len() - 1;
    let spec = a.problem.boundary(side);
    let (b, adj) = match side {
        Side::Left => (0, 1),
        Side::Right => (n, n - 1),
    };
    sys.lower[b] = 0.0;
    sys.upper[b] = 0.0;
    if spec.kind == BoundaryKind::Dirichlet {
        sys.diag[b] = 1.0;
        sys.rhs[b] = (spec.ambient)(a.t_new);
        return Ok(());
    }
    let st = boundary_stencil(a.problem.medium.as_ref(), a.target, a.coef, side);
    let k = st.conductivity;
    let u_rad = a.radiative_u[if side == Side::Left { 0 } else { 1 }];
    // (k·w0 + Bi)·u_b + k·w1·u_adj + k·w2·u_far = Bi·u_amb + αq* − R*(u⁴ − u_sky⁴)
    let mut diag = k * st.weights[0] + spec.biot;
    let mut near = k * st.weights[1];
    let far = k * st.weights[2];
    let mut rhs = spec.forcing(a.t_new, u_rad);
    if far != 0.0 {
        // eliminate the third entry against the adjacent interior row
        let (adj_to_b, adj_to_far) = match side {
            Side::Left => (sys.lower[adj], sys.upper[adj]),
            Side::Right => (sys.upper[adj], sys.lower[adj]),
        };
        if adj_to_far == 0.0 {
            return Err(Error::Singular { row: adj, pivot: 0.0 });
        }
        let f = far / adj_to_far;
        diag -= f * adj_to_b;
        near -= f * sys.diag[adj];
        rhs -= f * sys.rhs[adj];
    }
    sys.diag[b] = diag;
    sys.rhs[b] = rhs;
    match side {
        Side::Left => sys.upper[b] = near,
        Side::Right => sys.lower[b] = near,
    }
    Ok(())
}

/// Second-order one-sided `∂u/∂x` at the boundary on `side`.
pub fn surface_gradient(x: &[f64], u: &[f64], side: Side) -> Result<f64> {
    if x.len() < 3 || u.len() != x.len() {
        return Err(Error::TooFewNodes {
            nodes: x.len().min(u.len()),
            min: 3,
        });
    }
    let n = x.len() - 1;
    Ok(match side {
        Side::Left => {
            let w = forward_weights(x[0], x[1], x[2]);
            w[0] * u[0] + w[1] * u[1] + w[2] * u[2]
        }
        Side::Right => {
            let w = forward_weights(-x[n], -x[n - 1], -x[n - 2]);
            -(w[0] * u[n] + w[1] * u[n - 1] + w[2] * u[n - 2])
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdesolver::problem::{Homogeneous, Layered};

    #[test]
    fn one_sided_weights_exact_for_quadratics() {
        let x = [0.0, 0.1, 0.3, 1.0];
        let u: Vec<f64> = x.iter().map(|v| v * v).collect();
        assert!(surface_gradient(&x, &u, Side::Left).unwrap().abs() < 1e-14);
        // d/dx x² at 1 is 2
        assert!((surface_gradient(&x, &u, Side::Right).unwrap() - 2.0).abs() < 1e-13);
        let cubic_free: Vec<f64> = x.iter().map(|v| 3.0 - 2.0 * v + 0.5 * v * v).collect();
        assert!((surface_gradient(&x, &cubic_free, Side::Left).unwrap() + 2.0).abs() < 1e-13);
        assert!((surface_gradient(&x, &cubic_free, Side::Right).unwrap() + 1.0).abs() < 1e-13);
    }

    #[test]
    fn gradient_needs_three_nodes() {
        assert!(surface_gradient(&[0.0, 1.0], &[0.0, 1.0], Side::Left).is_err());
    }

    #[test]
    fn interface_interval_gets_series_conductivity() {
        let medium = Layered::new(vec![
            (0.3, Homogeneous::constant(1.0, 0.5)),
            (1.0, Homogeneous::constant(2.0, 4.0)),
        ])
        .unwrap();
        let x = [0.0, 0.2, 0.4, 0.7, 1.0];
        let u = [1.0; 5];
        let mut c = Coefficients::default();
        coefficients(&medium, &u, &x, &mut c);
        assert_eq!(c.conductivity[0], 0.5);
        // 0.1 at k=0.5 and 0.1 at k=4
        let series = 0.2 / (0.1 / 0.5 + 0.1 / 4.0);
        assert!((c.conductivity[1] - series).abs() < 1e-14);
        assert_eq!(c.conductivity[2], 4.0);
        // node 1 dual cell [0.1, 0.3] lies wholly in layer one; node 2 dual
        // cell [0.3, 0.55] wholly in layer two; node 0 cell [0, 0.1]
        assert!((c.capacity[1] - 1.0).abs() < 1e-12);
        assert!((c.capacity[2] - 2.0).abs() < 1e-12);
        let x2 = [0.0, 0.2, 0.35, 0.7, 1.0];
        coefficients(&medium, &u, &x2, &mut c);
        // node 1 dual cell [0.1, 0.275] in layer one; node 2 dual cell [0.275, 0.525]
        let mixed = (0.025 * 1.0 + 0.225 * 2.0) / 0.25;
        assert!((c.capacity[2] - mixed).abs() < 1e-14);
    }

    #[test]
    fn homogeneous_coefficients_are_nodal_means() {
        let medium = Homogeneous::new(|u| 2.0 + u, |u| 1.0 + u * u);
        let x = [0.0, 0.25, 0.5, 0.75, 1.0];
        let u = [0.0, 1.0, 2.0, 1.0, 0.0];
        let mut c = Coefficients::default();
        coefficients(&medium, &u, &x, &mut c);
        assert_eq!(c.conductivity, vec![1.5, 3.5, 3.5, 1.5]);
        assert_eq!(c.capacity, vec![2.0, 3.0, 4.0, 3.0, 2.0]);
        assert_eq!(c.boundary, [1.0, 1.0]);
    }
}
