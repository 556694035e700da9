use std::collections::BTreeMap;
use std::io::Write;
use std::time::Duration;

use log::{info, warn};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pdesolver::Scheme;

use super::case::BenchmarkCase;
use super::errors::{compute_errors, Sampling};
use super::run::{simulate, ReferenceSolution};

/// Outcome of one `(scheme, Nx, Δt)` cell of a convergence study.
#[derive(Debug, Clone)]
pub struct ConvergenceCell {
    pub scheme: Scheme,
    pub nx: usize,
    pub dt: f64,
    /// `(ε∞, [ξ∞ left, ξ∞ right])`, or the failure message.
    pub result: std::result::Result<(f64, [f64; 2]), String>,
}

#[derive(Debug, Clone, Default)]
pub struct ConvergenceTable {
    pub cells: Vec<ConvergenceCell>,
    /// Cases where `ε∞` grows with `Nx` (for `Nx ≥ 20`) by more than a
    /// factor 1.5.
    pub trend_violations: Vec<String>,
}

impl ConvergenceTable {
    pub fn eps_inf(&self, scheme: Scheme, nx: usize, dt: f64) -> Option<f64> {
        self.cell(scheme, nx, dt)?.result.as_ref().ok().map(|r| r.0)
    }

    pub fn cell(&self, scheme: Scheme, nx: usize, dt: f64) -> Option<&ConvergenceCell> {
        self.cells
            .iter()
            .find(|c| c.scheme == scheme && c.nx == nx && (c.dt - dt).abs() <= 1e-12 * dt)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConvergenceCell> {
        self.cells.iter().filter(|c| c.result.is_err())
    }

    /// `scheme,Nx,dt,eps_inf`; failed cells are left empty.
    pub fn write_field_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["scheme", "Nx", "dt", "eps_inf"])?;
        for c in &self.cells {
            let e = c.result.as_ref().map(|r| r.0.to_string()).unwrap_or_default();
            w.write_record([c.scheme.to_string(), c.nx.to_string(), c.dt.to_string(), e])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    /// `scheme,Nx,dt,side,xi_inf`.
    pub fn write_flux_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["scheme", "Nx", "dt", "side", "xi_inf"])?;
        for c in &self.cells {
            for (i, side) in ["left", "right"].iter().enumerate() {
                let x = c.result.as_ref().map(|r| r.1[i].to_string()).unwrap_or_default();
                w.write_record([
                    c.scheme.to_string(),
                    c.nx.to_string(),
                    c.dt.to_string(),
                    side.to_string(),
                    x,
                ])?;
            }
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    fn check_trends(&mut self) {
        let mut series: BTreeMap<(&'static str, u64), Vec<(usize, f64)>> = BTreeMap::new();
        for c in &self.cells {
            if let Ok((e, _)) = c.result {
                if c.nx >= 20 {
                    series
                        .entry((c.scheme.name(), c.dt.to_bits()))
                        .or_default()
                        .push((c.nx, e));
                }
            }
        }
        for ((scheme, dt), mut s) in series {
            s.sort_by_key(|p| p.0);
            for p in s.windows(2) {
                if p[1].1 > 1.5 * p[0].1 {
                    self.trend_violations.push(format!(
                        "{scheme} dt={}: eps_inf rises from {:.3e} (Nx={}) to {:.3e} (Nx={})",
                        f64::from_bits(dt),
                        p[0].1,
                        p[0].0,
                        p[1].1,
                        p[1].0
                    ));
                }
            }
        }
    }
}

/// Global field and flux errors for every combination of `schemes`,
/// `nxs` and `dts`, run on a pool of `workers` threads. A failing cell is
/// recorded and the study carries on.
pub fn convergence_study(
    case: &BenchmarkCase,
    reference: &ReferenceSolution,
    schemes: &[Scheme],
    nxs: &[usize],
    dts: &[f64],
    sampling: &Sampling,
    workers: usize,
) -> Result<ConvergenceTable> {
    let save_every = reference
        .output
        .states
        .get(1)
        .map(|s| s.t)
        .ok_or_else(|| Error::invalid("reference has no saved levels"))?;
    let jobs: Vec<(Scheme, usize, f64)> = schemes
        .iter()
        .flat_map(|&s| nxs.iter().flat_map(move |&n| dts.iter().map(move |&d| (s, n, d))))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let cells: Vec<ConvergenceCell> = pool.install(|| {
        jobs.par_iter()
            .map(|&(scheme, nx, dt)| {
                let result = simulate(case, scheme, nx, dt, case.tau, save_every)
                    .and_then(|out| compute_errors(&out, reference, sampling, 16.0))
                    .map(|r| (r.eps_inf, r.xi_inf))
                    .map_err(|e| e.to_string());
                match &result {
                    Ok((e, _)) => info!("{scheme} Nx={nx} dt={dt}: eps_inf = {e:.3e}"),
                    Err(e) => warn!("{scheme} Nx={nx} dt={dt} failed: {e}"),
                }
                ConvergenceCell { scheme, nx, dt, result }
            })
            .collect()
    });
    let mut table = ConvergenceTable {
        cells,
        trend_violations: Vec::new(),
    };
    table.check_trends();
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct RuntimeRow {
    pub scheme: Scheme,
    pub nx: usize,
    pub horizon: f64,
    pub seconds: f64,
    /// Time relative to the Crank–Nicolson row of the same horizon.
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct AccuracyGate {
    pub scheme: Scheme,
    pub nx: usize,
    pub eps_inf: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Default)]
pub struct RuntimeTable {
    pub rows: Vec<RuntimeRow>,
    pub gate: Vec<AccuracyGate>,
}

impl RuntimeTable {
    pub fn ratio(&self, scheme: Scheme, horizon: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.scheme == scheme && r.horizon == horizon)
            .map(|r| r.ratio)
    }

    /// `scheme,Nx,horizon,seconds,ratio`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["scheme", "Nx", "horizon", "seconds", "ratio"])?;
        for r in &self.rows {
            w.write_record([
                r.scheme.to_string(),
                r.nx.to_string(),
                r.horizon.to_string(),
                r.seconds.to_string(),
                r.ratio.to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Accuracy counted as "order 10⁻⁴": `ε∞` below 10⁻³.
pub const GATE_EPS_INF: f64 = 1e-3;

/// Wall-clock time of each `(scheme, Nx)` over each horizon (best of
/// `repeats`), run serially. When a reference is given, each configuration
/// is first checked against it over the case's own final time.
pub fn runtime_comparison(
    case: &BenchmarkCase,
    configs: &[(Scheme, usize)],
    dt: f64,
    horizons: &[f64],
    repeats: usize,
    reference: Option<&ReferenceSolution>,
) -> Result<RuntimeTable> {
    let mut table = RuntimeTable::default();
    if let Some(reference) = reference {
        let save_every = reference.output.states.get(1).map_or(case.tau, |s| s.t);
        for &(scheme, nx) in configs {
            let out = simulate(case, scheme, nx, dt, case.tau, save_every)?;
            let eps_inf = compute_errors(&out, reference, &Sampling::SchemeNodes, 16.0)?.eps_inf;
            let passed = eps_inf < GATE_EPS_INF;
            if !passed {
                warn!("{scheme} with {nx} nodes misses the accuracy gate: eps_inf = {eps_inf:.3e}");
            }
            table.gate.push(AccuracyGate {
                scheme,
                nx,
                eps_inf,
                passed,
            });
        }
    }
    for &horizon in horizons {
        let mut timed = Vec::with_capacity(configs.len());
        for &(scheme, nx) in configs {
            let mut best = Duration::MAX;
            for _ in 0..repeats.max(1) {
                // save only the end state so timing covers the stepping
                let out = simulate(case, scheme, nx, dt, horizon, horizon)?;
                best = best.min(out.runtime);
            }
            timed.push((scheme, nx, best.as_secs_f64()));
        }
        let base = timed
            .iter()
            .find(|t| t.0 == Scheme::CrankNicolson)
            .map(|t| t.2)
            .unwrap_or(f64::NAN);
        for (scheme, nx, seconds) in timed {
            table.rows.push(RuntimeRow {
                scheme,
                nx,
                horizon,
                seconds,
                ratio: seconds / base,
            });
        }
    }
    Ok(table)
}
