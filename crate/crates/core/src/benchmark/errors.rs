use std::time::Duration;

use crate::error::{Error, Result};
use crate::pdesolver::Scheme;

use super::run::{ReferenceSolution, SchemeOutput};

/// Where numerical and reference fields are compared.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampling {
    /// At the scheme's own nodes (for a moving grid, the nodes at each
    /// saved time); the reference is interpolated there.
    SchemeNodes,
    /// At fixed positions; a moving-grid solution is linearly
    /// interpolated onto them.
    Grid(Vec<f64>),
}

impl Sampling {
    pub fn uniform_grid(nx: usize) -> Self {
        let n = (nx.max(2) - 1) as f64;
        Sampling::Grid((0..nx.max(2)).map(|i| i as f64 / n).collect())
    }
}

/// Field and flux errors of one run against the reference.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub scheme: Scheme,
    pub nx: usize,
    pub dt: f64,
    /// Time at which `delta` was taken.
    pub delta_time: f64,
    /// `(x, |u_ref − u_num|)` at `delta_time`.
    pub delta: Vec<(f64, f64)>,
    /// `(x, ε)`: time-RMS error at each comparison point. For moving nodes
    /// `x` is the node's mean position.
    pub epsilon: Vec<(f64, f64)>,
    pub eps_inf: f64,
    pub times: Vec<f64>,
    /// `ξ(t)` at the left and right boundaries.
    pub xi: [Vec<f64>; 2],
    /// `max_t ξ(t)` per side.
    pub xi_inf: [f64; 2],
    pub runtime: Duration,
}

impl ErrorReport {
    /// Largest flux error over both sides.
    pub fn xi_inf_max(&self) -> f64 {
        self.xi_inf[0].max(self.xi_inf[1])
    }
}

/// Errors of `num` against `reference`: `δ`, `ε(x) = sqrt(mean_n δ²)`,
/// `ε∞ = max ε`, `ξ(t) = |q_ref − q_num|`, `ξ∞ = max ξ`.
///
/// The initial level is excluded from the time averages.
pub fn compute_errors(
    num: &SchemeOutput,
    reference: &ReferenceSolution,
    sampling: &Sampling,
    delta_time: f64,
) -> Result<ErrorReport> {
    let refo = &reference.output;
    if num.states.len() != refo.states.len() {
        return Err(Error::invalid(format!(
            "output has {} saved levels, reference has {}",
            num.states.len(),
            refo.states.len()
        )));
    }
    for (k, (a, b)) in num.states.iter().zip(&refo.states).enumerate() {
        if (a.t - b.t).abs() > 1e-9 * b.t.abs().max(1.0) {
            return Err(Error::invalid(format!(
                "saved level {k} is at t = {} but the reference is at t = {}",
                a.t, b.t
            )));
        }
    }
    if num.states.len() < 2 {
        return Err(Error::invalid("need at least one saved level after t = 0"));
    }
    let levels = 1..num.states.len();
    let nt = (levels.len()) as f64;
    let delta_level = levels
        .clone()
        .min_by(|&a, &b| {
            let da = (num.states[a].t - delta_time).abs();
            let db = (num.states[b].t - delta_time).abs();
            da.total_cmp(&db)
        })
        .unwrap();

    let points = match sampling {
        Sampling::SchemeNodes => num.nx,
        Sampling::Grid(xs) => xs.len(),
    };
    let mut sum_sq = vec![0.0; points];
    let mut mean_x = vec![0.0; points];
    let mut delta = Vec::with_capacity(points);
    for k in levels.clone() {
        let s = &num.states[k];
        for i in 0..points {
            let (x, u) = match sampling {
                Sampling::SchemeNodes => (s.mesh.nodes()[i], s.u[i]),
                Sampling::Grid(xs) => (xs[i], s.interpolate(xs[i])),
            };
            let d = u - reference.sample(k, x);
            sum_sq[i] += d * d;
            mean_x[i] += x / nt;
            if k == delta_level {
                delta.push((x, d.abs()));
            }
        }
    }
    let epsilon: Vec<(f64, f64)> = mean_x
        .iter()
        .zip(&sum_sq)
        .map(|(&x, &s)| (x, (s / nt).sqrt()))
        .collect();
    let eps_inf = epsilon.iter().fold(0.0f64, |m, e| m.max(e.1));

    let mut xi = [Vec::with_capacity(levels.len()), Vec::with_capacity(levels.len())];
    for k in levels.clone() {
        for side in 0..2 {
            xi[side].push((num.flux[k][side] - refo.flux[k][side]).abs());
        }
    }
    let xi_inf = [
        xi[0].iter().fold(0.0f64, |m, &v| m.max(v)),
        xi[1].iter().fold(0.0f64, |m, &v| m.max(v)),
    ];
    Ok(ErrorReport {
        scheme: num.scheme,
        nx: num.nx,
        dt: num.dt,
        delta_time: num.states[delta_level].t,
        delta,
        epsilon,
        eps_inf,
        times: levels.map(|k| num.states[k].t).collect(),
        xi,
        xi_inf,
        runtime: num.runtime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmotion::MovingMesh;
    use crate::pdesolver::FieldState;
    use proptest::prelude::*;

    fn output(scheme: Scheme, fields: Vec<Vec<f64>>, mesh: MovingMesh, flux: Vec<[f64; 2]>) -> SchemeOutput {
        let nx = mesh.node_count();
        let states = fields
            .into_iter()
            .enumerate()
            .map(|(k, u)| FieldState::new(u, mesh.clone(), k as f64).unwrap())
            .collect();
        SchemeOutput {
            scheme,
            nx,
            dt: 1.0,
            states,
            flux,
            runtime: Duration::ZERO,
        }
    }

    fn field(t: f64, mesh: &MovingMesh) -> Vec<f64> {
        mesh.nodes().iter().map(|x| (x * 3.0 + t).sin()).collect()
    }

    fn reference() -> ReferenceSolution {
        let mesh = MovingMesh::uniform(40, 1.0).unwrap();
        let fields = (0..5).map(|k| field(k as f64, &mesh)).collect();
        let flux = (0..5).map(|k| [k as f64, -(k as f64)]).collect();
        ReferenceSolution {
            output: output(Scheme::CrankNicolson, fields, mesh, flux),
        }
    }

    #[test]
    fn self_comparison_is_exactly_zero() {
        let r = reference();
        for sampling in [Sampling::SchemeNodes, Sampling::uniform_grid(11)] {
            let rep = compute_errors(&r.output, &r, &sampling, 2.0).unwrap();
            assert_eq!(rep.eps_inf, 0.0);
            assert_eq!(rep.xi_inf, [0.0, 0.0]);
            assert_eq!(rep.delta_time, 2.0);
        }
    }

    #[test]
    fn constant_offset_gives_offset() {
        let r = reference();
        let mut shifted = r.output.clone();
        for s in &mut shifted.states {
            s.u.iter_mut().for_each(|u| *u += 1e-3);
        }
        shifted.flux.iter_mut().for_each(|f| f[1] += 0.25);
        let rep = compute_errors(&shifted, &r, &Sampling::SchemeNodes, 0.0).unwrap();
        assert!(rep.epsilon.iter().all(|e| (e.1 - 1e-3).abs() < 1e-15));
        assert!((rep.eps_inf - 1e-3).abs() < 1e-15);
        assert_eq!(rep.xi_inf, [0.0, 0.25]);
        assert_eq!(rep.times, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn mismatched_times_are_rejected() {
        let r = reference();
        let mut other = r.output.clone();
        other.states[2].t = 2.5;
        assert!(compute_errors(&other, &r, &Sampling::SchemeNodes, 0.0).is_err());
        other.states.pop();
        assert!(compute_errors(&other, &r, &Sampling::SchemeNodes, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn eps_inf_bounds_each_level(noise in prop::collection::vec(-1e-2f64..1e-2, 41 * 4)) {
            let r = reference();
            let mut num = r.output.clone();
            for (k, s) in num.states.iter_mut().enumerate().skip(1) {
                for (j, u) in s.u.iter_mut().enumerate() {
                    *u += noise[(k - 1) * 41 + j];
                }
            }
            let rep = compute_errors(&num, &r, &Sampling::SchemeNodes, 1.0).unwrap();
            let nt = rep.times.len() as f64;
            prop_assert!(rep.epsilon.iter().all(|e| e.1 >= 0.0 && e.1 <= rep.eps_inf));
            for k in 1..5 {
                let rms: f64 = (0..41).map(|j| noise[(k - 1) * 41 + j].powi(2)).sum::<f64>() / 41.0;
                prop_assert!(rep.eps_inf >= rms.sqrt() / nt.sqrt() - 1e-15);
            }
        }
    }
}
