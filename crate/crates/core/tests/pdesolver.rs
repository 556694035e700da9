use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use qunt::gridmotion::{MonitorConfig, MovingMesh};
use qunt::pdesolver::*;

fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, p);
        b.swap(col, p);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

fn linear_problem(
    k: f64,
    c: f64,
    fo: f64,
    left: BoundarySpec,
    right: BoundarySpec,
    init: fn(f64) -> f64,
) -> DimensionlessProblem {
    DimensionlessProblem::new(
        Arc::new(Homogeneous::constant(c, k)),
        fo,
        left,
        right,
        Arc::new(init),
        (0.0, 2.0),
    )
    .unwrap()
}

fn dirichlet(a: f64, b: f64, init: fn(f64) -> f64) -> DimensionlessProblem {
    linear_problem(
        1.0,
        1.0,
        1.0,
        BoundarySpec::dirichlet(constant(a)),
        BoundarySpec::dirichlet(constant(b)),
        init,
    )
}

fn uniform_state(problem: &DimensionlessProblem, intervals: usize) -> FieldState {
    FieldState::sample(
        |x| (problem.initial)(x),
        MovingMesh::uniform(intervals, 1.0).unwrap(),
        0.0,
    )
    .unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
}

#[test]
fn five_node_step_matches_hand_assembled_system() {
    let p = dirichlet(0.0, 1.0, |_| 0.0);
    let s = uniform_state(&p, 4);
    let dt = 0.1;
    let next = step_imex_uniform(&s, &p, dt).unwrap();
    // (u_j − 0)/Δt = (u_{j+1} − 2u_j + u_{j−1})/h², h = 1/4, u_0 = 0, u_4 = 1
    let r = dt / (0.25 * 0.25);
    let a = vec![
        vec![1.0 + 2.0 * r, -r, 0.0],
        vec![-r, 1.0 + 2.0 * r, -r],
        vec![0.0, -r, 1.0 + 2.0 * r],
    ];
    let oracle = dense_solve(a, vec![0.0, 0.0, r]);
    assert!(max_diff(&next.u[1..4], &oracle) < 1e-15);
    let frozen = [512.0 / 6573.0, 64.0 / 313.0, 3016.0 / 6573.0];
    assert!(max_diff(&next.u[1..4], &frozen) < 1e-15);
    assert_eq!((next.u[0], next.u[4]), (0.0, 1.0));
    assert!((next.t - 0.1).abs() < 1e-15);
}

#[test]
fn constant_state_is_steady_for_every_scheme() {
    let p = DimensionlessProblem::new(
        Arc::new(Homogeneous::new(|u| 2.0 + u * u, |u| 1.0 + u)),
        0.7,
        BoundarySpec::dirichlet(constant(1.3)),
        BoundarySpec::dirichlet(constant(1.3)),
        Arc::new(|_| 1.3),
        (0.5, 1.5),
    )
    .unwrap();
    let mut s = uniform_state(&p, 20);
    let cfg = MonitorConfig::benchmark();
    for _ in 0..50 {
        s = step_imex_uniform(&s, &p, 0.05).unwrap();
        s = step_crank_nicolson(&s, &p, 0.05, 1e-12, 20).unwrap();
        s = step_qunt(&s, &p, &cfg, 0.05).unwrap();
    }
    assert!(s.u.iter().all(|&u| (u - 1.3).abs() < 1e-14));
    assert!(s.mesh.is_uniform(1e-12));
}

#[test]
fn linear_profile_is_steady_for_every_scheme() {
    let p = dirichlet(0.5, 1.5, |x| 0.5 + x);
    let s0 = uniform_state(&p, 16);
    let cfg = MonitorConfig::benchmark();
    let mut a = s0.clone();
    let mut b = s0.clone();
    let mut q = s0.clone();
    for _ in 0..100 {
        a = step_imex_uniform(&a, &p, 0.1).unwrap();
        b = step_crank_nicolson(&b, &p, 0.1, 1e-12, 20).unwrap();
        q = step_qunt(&q, &p, &cfg, 0.1).unwrap();
    }
    for st in [&a, &b, &q] {
        let exact: Vec<f64> = st.mesh.nodes().iter().map(|x| 0.5 + x).collect();
        assert!(max_diff(&st.u, &exact) < 1e-13, "{:?}", st.u);
    }
}

#[test]
fn imex_rejects_non_uniform_mesh() {
    let p = dirichlet(0.0, 1.0, |_| 0.0);
    let mesh = MovingMesh::new(vec![0.0, 0.1, 0.3, 0.6, 1.0]).unwrap();
    let s = FieldState::sample(|_| 0.0, mesh, 0.0).unwrap();
    assert!(step_imex_uniform(&s, &p, 0.1).is_err());
    assert!(step_crank_nicolson(&s, &p, 0.1, 1e-10, 10).is_err());
    assert!(step_imex_uniform(&uniform_state(&p, 4), &p, 0.0).is_err());
}

#[test]
fn crank_nicolson_linear_problem_needs_one_sweep() {
    let p = dirichlet(0.0, 1.0, |x| (PI * x).sin());
    let mut s = uniform_state(&p, 32);
    let mut ws = Workspace::default();
    for _ in 0..10 {
        assert_eq!(advance_crank_nicolson(&mut s, &p, 0.01, 1e-12, 20, &mut ws).unwrap(), 1);
    }
}

#[test]
fn crank_nicolson_reports_non_convergence() {
    let p = DimensionlessProblem::new(
        Arc::new(Homogeneous::new(|u| 1.0 + u * u, |u| 1.0 + 5.0 * u * u)),
        1.0,
        BoundarySpec::dirichlet(constant(0.0)),
        BoundarySpec::dirichlet(constant(1.0)),
        Arc::new(|_| 0.0),
        (0.0, 1.0),
    )
    .unwrap();
    let s = uniform_state(&p, 20);
    let err = step_crank_nicolson(&s, &p, 0.5, 1e-14, 2).unwrap_err();
    assert!(matches!(err, qunt::Error::FixedPointNotConverged { iterations: 2, .. }));
}

#[test]
fn flux_of_simple_fields() {
    let p = dirichlet(0.0, 1.0, |_| 0.0);
    let mesh = MovingMesh::uniform(10, 1.0).unwrap();
    let constant_state = FieldState::sample(|_| 0.7, mesh.clone(), 0.0).unwrap();
    let linear = FieldState::sample(|x| x, mesh, 0.0).unwrap();
    for side in [Side::Left, Side::Right] {
        assert!(boundary_flux(&constant_state, &p, side).unwrap().abs() < 1e-12);
        assert!((boundary_flux(&linear, &p, side).unwrap() + 1.0).abs() < 1e-12);
    }
}

#[test]
fn flux_is_exact_for_quadratics_on_non_uniform_mesh() {
    let p = dirichlet(0.0, 1.0, |_| 0.0);
    let mesh = MovingMesh::new(vec![0.0, 0.1, 0.3, 0.6, 1.0]).unwrap();
    let s = FieldState::sample(|x| x * x, mesh, 0.0).unwrap();
    assert!(boundary_flux(&s, &p, Side::Left).unwrap().abs() < 1e-14);
    assert!((boundary_flux(&s, &p, Side::Right).unwrap() + 2.0).abs() < 1e-13);
}

fn benchmark_like() -> DimensionlessProblem {
    DimensionlessProblem::new(
        Arc::new(Homogeneous::new(
            |u: f64| 900.0 - 656.0 * u + 1e4 * (-5.0 * (u - 1.5) * (u - 1.5)).exp(),
            |u: f64| 1.0 + 0.91 * u + 600.0 * (-10.0 * (u - 1.5) * (u - 1.5)).exp(),
        )),
        1.0,
        BoundarySpec::dirichlet(Arc::new(|t| 1.0 - 0.5 * (2.0 * PI * t / 12.0).sin())),
        BoundarySpec::dirichlet(Arc::new(|t| 1.0 + 0.5 * (2.0 * PI * t / 24.0).sin())),
        Arc::new(|_| 1.0),
        (0.5, 1.5),
    )
    .unwrap()
}

#[test]
fn degenerate_monitor_reduces_moving_grid_to_imex() {
    let p = benchmark_like();
    let cfg = MonitorConfig::degenerate();
    let mut a = uniform_state(&p, 20);
    let mut b = a.clone();
    let mut wa = Workspace::default();
    let mut wb = Workspace::default();
    for _ in 0..200 {
        advance_imex(&mut a, &p, 0.05, &mut wa).unwrap();
        advance_qunt(&mut b, &p, &cfg, 0.05, &mut wb).unwrap();
    }
    let rel =
        a.u.iter()
            .zip(&b.u)
            .fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs() / x.abs()));
    assert!(rel < 1e-12, "relative difference {rel}");
}

#[test]
fn radiation_against_equal_sky_matches_robin() {
    let robin = linear_problem(
        1.0,
        1.0,
        1.0,
        BoundarySpec::robin(constant(1.2), 3.0),
        BoundarySpec::robin(constant(0.9), 8.0),
        |x| 1.0 + 0.1 * x,
    );
    let s = uniform_state(&robin, 20);
    let (ul, ur) = (s.u[0], s.u[20]);
    let radiative = linear_problem(
        1.0,
        1.0,
        1.0,
        BoundarySpec::radiative(constant(1.2), 3.0, constant(0.0), 0.4, constant(ul)),
        BoundarySpec::radiative(constant(0.9), 8.0, constant(0.0), 0.4, constant(ur)),
        |x| 1.0 + 0.1 * x,
    );
    let a = step_imex_uniform(&s, &robin, 0.01).unwrap();
    let b = step_imex_uniform(&s, &radiative, 0.01).unwrap();
    assert!(max_diff(&a.u, &b.u) < 1e-12);
    let cfg = MonitorConfig::envelope();
    let a = step_qunt(&s, &robin, &cfg, 0.01).unwrap();
    let b = step_qunt(&s, &radiative, &cfg, 0.01).unwrap();
    assert!(max_diff(&a.u, &b.u) < 1e-12);
}

#[test]
fn radiation_cools_the_surface() {
    let bare = linear_problem(
        1.0,
        1.0,
        1.0,
        BoundarySpec::robin(constant(1.0), 2.0),
        BoundarySpec::robin(constant(1.0), 2.0),
        |_| 1.0,
    );
    let cold_sky = linear_problem(
        1.0,
        1.0,
        1.0,
        BoundarySpec::radiative(constant(1.0), 2.0, constant(0.0), 0.5, constant(0.9)),
        BoundarySpec::robin(constant(1.0), 2.0),
        |_| 1.0,
    );
    let s = uniform_state(&bare, 20);
    let a = step_imex_uniform(&s, &bare, 0.01).unwrap();
    let b = step_imex_uniform(&s, &cold_sky, 0.01).unwrap();
    assert!(b.u[0] < a.u[0]);
    let c = step_crank_nicolson(&s, &cold_sky, 0.01, 1e-13, 50).unwrap();
    assert!(c.u[0] < 1.0);
}

/// Steady flux through layers in series with surface films.
#[test]
fn layered_wall_reaches_series_resistance_flux() {
    let layers = vec![
        (0.3, Homogeneous::constant(1.0, 0.2)),
        (0.55, Homogeneous::constant(0.5, 2.0)),
        (1.0, Homogeneous::constant(2.0, 1.0)),
    ];
    let medium = Arc::new(Layered::new(layers).unwrap());
    let (bl, br) = (4.0, 10.0);
    let p = DimensionlessProblem::new(
        medium,
        1.0,
        BoundarySpec::robin(constant(1.1), bl),
        BoundarySpec::robin(constant(0.9), br),
        Arc::new(|_| 1.0),
        (0.5, 1.5),
    )
    .unwrap();
    let resistance = 1.0 / bl + 0.3 / 0.2 + 0.25 / 2.0 + 0.45 / 1.0 + 1.0 / br;
    let q = 0.2 / resistance;
    for intervals in [20, 41] {
        let mut s = uniform_state(&p, intervals);
        let mut ws = Workspace::default();
        for _ in 0..4000 {
            advance_imex(&mut s, &p, 0.05, &mut ws).unwrap();
        }
        for side in [Side::Left, Side::Right] {
            let got = boundary_flux(&s, &p, side).unwrap();
            assert!(
                (got - q).abs() < 1e-9 * q.abs().max(1.0) + 1e-9,
                "{side:?}: {got} vs {q}"
            );
        }
        // film condition at the warm side: q = Bi (u_amb − u_s)
        assert!((bl * (1.1 - s.u[0]) - q).abs() < 1e-9);
    }
}

/// `u = x + e^{−π²t} sin πx` solves the unit heat equation with
/// Dirichlet data 0 and 1.
fn exact(x: f64, t: f64) -> f64 {
    x + (-PI * PI * t).exp() * (PI * x).sin()
}

fn mms_error(scheme: Scheme, intervals: usize, dt: f64, t_end: f64) -> f64 {
    let p = dirichlet(0.0, 1.0, |x| exact(x, 0.0));
    let mut integ = Integrator::new(SchemeSettings::new(scheme, MonitorConfig::benchmark())).unwrap();
    let mut s = uniform_state(&p, intervals);
    let steps = (t_end / dt).round() as usize;
    for _ in 0..steps {
        integ.step(&mut s, &p, dt).unwrap();
    }
    let t = steps as f64 * dt;
    s.mesh
        .nodes()
        .iter()
        .zip(&s.u)
        .fold(0.0, |m, (&x, &u)| f64::max(m, (u - exact(x, t)).abs()))
}

fn slope(e_coarse: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).log2()
}

#[test]
fn imex_is_second_order_in_space() {
    let errs: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| mms_error(Scheme::Imex, n, 1e-6, 0.05))
        .collect();
    for w in errs.windows(2) {
        let s = slope(w[0], w[1]);
        assert!((s - 2.0).abs() < 0.3, "spatial slope {s} from {errs:?}");
    }
}

#[test]
fn imex_is_first_order_in_time() {
    let errs: Vec<f64> = [0.02, 0.01, 0.005]
        .iter()
        .map(|&dt| mms_error(Scheme::Imex, 400, dt, 0.2))
        .collect();
    for w in errs.windows(2) {
        let s = slope(w[0], w[1]);
        assert!((s - 1.0).abs() < 0.3, "temporal slope {s} from {errs:?}");
    }
}

#[test]
fn crank_nicolson_is_second_order() {
    let errs: Vec<f64> = [(8, 0.02), (16, 0.01), (32, 0.005)]
        .iter()
        .map(|&(n, dt)| mms_error(Scheme::CrankNicolson, n, dt, 0.2))
        .collect();
    for w in errs.windows(2) {
        let s = slope(w[0], w[1]);
        assert!((s - 2.0).abs() < 0.3, "slope {s} from {errs:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn maximum_principle_holds(
        intervals in 4usize..64,
        k in 0.05f64..20.0,
        c in 0.05f64..20.0,
        dt in 1e-4f64..10.0,
        left in -1.0f64..1.0,
        right in -1.0f64..1.0,
        init in prop::collection::vec(-1.0f64..1.0, 65),
    ) {
        let p = linear_problem(k, c, 1.0, BoundarySpec::dirichlet(constant(left)), BoundarySpec::dirichlet(constant(right)), |_| 0.0);
        let mut u: Vec<f64> = init[..=intervals].to_vec();
        u[0] = left;
        u[intervals] = right;
        let lo = u.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut s = FieldState::new(u, MovingMesh::uniform(intervals, 1.0).unwrap(), 0.0).unwrap();
        for _ in 0..5 {
            s = step_imex_uniform(&s, &p, dt).unwrap();
            prop_assert!(s.u.iter().all(|&v| v >= lo - 1e-12 && v <= hi + 1e-12));
        }
    }
}
