use std::sync::Arc;

use chrono::{NaiveDate, NaiveDateTime};
use qunt::envelope::{
    load_climate_csv, physical_problem, simulate_span, simulate_year, sweep_thickness, synthesize_climate, wall_scales,
    ClimateProfile, ClimateSeries, Configuration, IndoorSchedule, Orientation, SolverOptions,
};
use qunt::pdesolver::{nondimensionalize, Integrator, PhysicalProblem, Scheme, SchemeSettings};
use qunt::Error;

fn jan1() -> NaiveDateTime {
    NaiveDate::from_ymd_opt(2023, 1, 1)
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap()
}

#[test]
fn steady_wall_matches_series_resistance() {
    // 5 / (1/10 + 0.15/0.69 + 1/25), recomputed by hand: 13.990 W/m²
    let oracle: f64 = 5.0 / (0.1 + 0.15 / 0.69 + 0.04);
    assert!((oracle - 13.990).abs() < 5e-4);
    let w1 = Configuration::Wall1.build(Orientation::South, 0.0).unwrap();
    let climate = ClimateSeries::constant(jan1(), 24 * 20, 25.0, 0.0).unwrap();
    let r = simulate_year(
        &w1,
        &climate,
        &IndoorSchedule::constant(20.0),
        &SolverOptions::default(),
    )
    .unwrap();
    let q = *r.loads.flux.flux.last().unwrap();
    assert!((q - oracle).abs() < 0.005 * oracle, "flux {q} vs {oracle}");
}

#[test]
fn steady_state_for_every_configuration() {
    // the initial profile is already steady, so a short run stays on the oracle
    let climate = ClimateSeries::constant(jan1(), 48, 35.0, 0.0).unwrap();
    for c in [Configuration::Wall2, Configuration::Wall3] {
        let a = c.build(Orientation::East, 0.07).unwrap();
        let oracle = 15.0 / a.resistance();
        let r = simulate_year(&a, &climate, &IndoorSchedule::constant(20.0), &SolverOptions::default()).unwrap();
        for q in &r.loads.flux.flux {
            assert!((q - oracle).abs() < 0.005 * oracle, "{c}: {q} vs {oracle}");
        }
    }
}

#[test]
fn equilibrium_gives_no_load() {
    let w2 = Configuration::Wall2.build(Orientation::North, 0.1).unwrap();
    let climate = ClimateSeries::constant(jan1(), 24 * 31, 21.0, 0.0).unwrap();
    let r = simulate_year(
        &w2,
        &climate,
        &IndoorSchedule::constant(21.0),
        &SolverOptions::default(),
    )
    .unwrap();
    assert!(r.loads.annual.total() < 1e-3);
    assert!(r.loads.flux.flux.iter().all(|q| q.abs() < 1e-6));
}

#[test]
fn hot_outside_heats_the_room_throughout() {
    let mut t = vec![0.0; 24 * 10];
    for (h, v) in t.iter_mut().enumerate() {
        *v = 32.0 + 4.0 * (std::f64::consts::PI * h as f64 / 12.0).sin();
    }
    let climate = ClimateSeries::new(jan1(), t.clone(), std::array::from_fn(|_| vec![0.0; t.len()]), t).unwrap();
    let w1 = Configuration::Wall1.build(Orientation::South, 0.0).unwrap();
    let r = simulate_year(
        &w1,
        &climate,
        &IndoorSchedule::constant(22.0),
        &SolverOptions::default(),
    )
    .unwrap();
    // skip the first day of transient
    assert!(r.loads.flux.flux[240..].iter().all(|&q| q > 0.0));
    assert!(r.loads.annual.heating.abs() < 1e-12);
}

#[test]
fn moving_grid_agrees_with_fine_crank_nicolson() {
    let climate = synthesize_climate(&ClimateProfile::curitiba()).unwrap();
    let schedule = IndoorSchedule::for_latitude(-25.5);
    let w2 = Configuration::Wall2.build(Orientation::South, 0.1).unwrap();
    let qunt = simulate_year(&w2, &climate, &schedule, &SolverOptions::default()).unwrap();
    let cn_opts = SolverOptions {
        scheme: Scheme::CrankNicolson,
        nx: 801,
        ..SolverOptions::default()
    };
    let cn = simulate_year(&w2, &climate, &schedule, &cn_opts).unwrap();
    let (a, b) = (qunt.loads.annual.total(), cn.loads.annual.total());
    assert!((a - b).abs() < 0.02 * b, "QUNT {a} vs CN {b}");
}

fn mirrored(p: &PhysicalProblem) -> PhysicalProblem {
    let l = p.thickness();
    let init = p.initial.clone();
    PhysicalProblem {
        layers: p.layers.iter().rev().cloned().collect(),
        left: p.right.clone(),
        right: p.left.clone(),
        initial: Arc::new(move |x| init(l - x)),
        temperature_range: p.temperature_range,
    }
}

#[test]
fn flipping_the_assembly_mirrors_the_profile() {
    let mut profile = ClimateProfile::rio_de_janeiro();
    profile.solar_peak = 0.0;
    let climate = synthesize_climate(&profile).unwrap();
    let w3 = Configuration::Wall3.build(Orientation::West, 0.04).unwrap();
    let schedule = IndoorSchedule::for_latitude(-22.9);
    let physical = physical_problem(&w3, &climate, &schedule).unwrap();
    let scales = wall_scales(&w3);
    let p = nondimensionalize(&physical, &scales).unwrap();
    let m = nondimensionalize(&mirrored(&physical), &scales).unwrap();
    for scheme in [Scheme::Qunt, Scheme::CrankNicolson] {
        let settings = SchemeSettings::new(scheme, SolverOptions::default().monitor);
        let (mut a, mut b) = (
            Integrator::new(settings.clone()).unwrap(),
            Integrator::new(settings).unwrap(),
        );
        let mut sa = a.initial_state(&p, 40, 0.0).unwrap();
        let mut sb = b.initial_state(&m, 40, 0.0).unwrap();
        for _ in 0..480 {
            a.step(&mut sa, &p, 0.1).unwrap();
            b.step(&mut sb, &m, 0.1).unwrap();
        }
        let n = sa.u.len() - 1;
        let mut worst: f64 = 0.0;
        for j in 0..=n {
            worst = worst.max((sa.u[j] - sb.u[n - j]).abs());
            worst = worst.max((sa.mesh.nodes()[j] - (1.0 - sb.mesh.nodes()[n - j])).abs());
        }
        assert!(worst < 1e-8, "{scheme}: {worst}");
    }
}

#[test]
fn thicker_insulation_lowers_the_load() {
    let climate = synthesize_climate(&ClimateProfile::curitiba()).unwrap();
    let schedule = IndoorSchedule::for_latitude(-25.5);
    let w2 = Configuration::Wall2.build(Orientation::South, 0.1).unwrap();
    let grid = [0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3];
    let table = sweep_thickness(&w2, 0, &grid, &climate, &schedule, &SolverOptions::default(), 1).unwrap();
    let e = table.annual_totals();
    assert_eq!(e.len(), grid.len());
    for w in e.windows(2) {
        assert!(w[1].1 < w[0].1 * 1.01, "{w:?}");
    }
    // diminishing returns: each further 5 cm saves less than the one before
    let drops: Vec<f64> = e.windows(2).skip(2).map(|w| w[0].1 - w[1].1).collect();
    for d in drops.windows(2) {
        assert!(d[1] < d[0], "{drops:?}");
    }
    let last_drop = (e[6].1 - e[7].1) / e[6].1;
    println!("relative drop 0.25 -> 0.30 m: {last_drop:.4}");
    // same thickness outside the brick
    let w3 = Configuration::Wall3.build(Orientation::South, 0.1).unwrap();
    let e3 = simulate_year(&w3, &climate, &schedule, &SolverOptions::default()).unwrap();
    let (a, b) = (e[3].1, e3.loads.annual.total());
    assert!((a - b).abs() < 0.05 * a.max(b), "wall2 {a} vs wall3 {b}");
}

#[test]
fn sweep_records_failures_and_continues() {
    let climate = ClimateSeries::constant(jan1(), 24, 20.0, 0.0).unwrap();
    let w2 = Configuration::Wall2.build(Orientation::South, 0.1).unwrap();
    let schedule = IndoorSchedule::constant(20.0);
    // 24 h is not a whole number of 0.7 h steps: every row fails
    let bad = SolverOptions {
        dt: 0.7,
        ..SolverOptions::default()
    };
    let t = sweep_thickness(&w2, 0, &[0.01, 0.1], &climate, &schedule, &bad, 2).unwrap();
    assert_eq!(t.rows.len(), 2);
    assert_eq!(t.rows[0].thickness, 0.01);
    assert_eq!(t.failures().count(), 2);
    assert!(t.annual_totals().is_empty());
    let mut csv = Vec::new();
    t.write_csv(&mut csv).unwrap();
    assert!(String::from_utf8(csv).unwrap().contains("whole number of steps"));

    let ok = sweep_thickness(&w2, 0, &[0.01, 0.1], &climate, &schedule, &SolverOptions::default(), 2).unwrap();
    assert_eq!(ok.failures().count(), 0);
    assert!(sweep_thickness(&w2, 0, &[], &climate, &schedule, &bad, 1).is_err());
    assert!(sweep_thickness(&w2, 3, &[0.1], &climate, &schedule, &bad, 1).is_err());
}

#[test]
fn climate_file_round_trip_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curitiba.csv");
    let c = synthesize_climate(&ClimateProfile::curitiba()).unwrap();
    c.save(&path).unwrap();
    assert_eq!(load_climate_csv(&path).unwrap(), c);
    let err = load_climate_csv(&dir.path().join("missing.csv")).unwrap_err();
    assert!(matches!(err, Error::Io { .. }) && err.is_validation());
}

#[test]
fn short_span_and_loads_calendar() {
    let climate = synthesize_climate(&ClimateProfile::salvador()).unwrap();
    let w1 = Configuration::Wall1.build(Orientation::North, 0.0).unwrap();
    let r = simulate_span(
        &w1,
        &climate,
        &IndoorSchedule::default(),
        &SolverOptions::default(),
        72.0,
    )
    .unwrap();
    assert_eq!(r.steps, 720);
    assert_eq!(r.loads.daily.len(), 3);
    assert_eq!(r.loads.monthly.len(), 1);
    assert_eq!(*r.loads.flux.times.last().unwrap(), 72.0 * 3600.0);
}
