use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use log::{info, warn};

use qunt::benchmark::{
    convergence_study, runtime_comparison, simulate as run_benchmark, BenchmarkCase, ReferenceSolution, Sampling,
};
use qunt::econ::{optimum_thickness, EconomicParams};
use qunt::envelope::{
    load_climate_csv, simulate_span, sweep_thickness, synthesize_climate, thickness_grid, ClimateProfile,
    ClimateSeries, Configuration, IndoorSchedule, Layer, Material, Orientation, SolverOptions, WallAssembly,
};
use qunt::pdesolver::Scheme;
use qunt::Error;

use crate::config::RunConfig;
use crate::{BenchmarkArgs, GridArgs, OptimizeArgs, SimulateArgs, SweepArgs, SynthArgs, WallArgs};

/// Smallest node count any scheme accepts.
const MIN_NODES: usize = 5;

pub struct Context<'a> {
    pub config: &'a RunConfig,
    pub out_dir: PathBuf,
    pub workers: usize,
}

impl<'a> Context<'a> {
    pub fn new(config: &'a RunConfig, out_dir: Option<PathBuf>, workers: Option<usize>) -> Result<Self> {
        let workers = workers.or(config.workers).unwrap_or(1);
        if workers == 0 {
            return Err(Error::Invalid("--workers must be at least 1".into()).into());
        }
        Ok(Self {
            config,
            out_dir: out_dir
                .or_else(|| config.out_dir.clone())
                .unwrap_or_else(|| PathBuf::from(".")),
            workers,
        })
    }

    fn create(&self, name: impl AsRef<Path>) -> Result<BufWriter<File>> {
        std::fs::create_dir_all(&self.out_dir).with_context(|| format!("cannot create {}", self.out_dir.display()))?;
        let path = self.out_dir.join(name);
        let file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
        Ok(BufWriter::new(file))
    }
}

/// Flag, then config file, then default.
fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn pick_list<T: Clone>(flag: &[T], file: &Option<Vec<T>>, default: Vec<T>) -> Vec<T> {
    if !flag.is_empty() {
        flag.to_vec()
    } else {
        file.clone().unwrap_or(default)
    }
}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Error::Invalid(msg.into()).into()
}

fn check_nodes(nx: usize) -> Result<()> {
    if nx < MIN_NODES {
        return Err(Error::TooFewNodes {
            nodes: nx,
            min: MIN_NODES,
        }
        .into());
    }
    Ok(())
}

/// `interval` must hold a whole number of `dt` steps.
fn check_multiple(interval: f64, dt: f64, what: &str) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    let n = interval / dt;
    if !(interval > 0.0 && n.round() >= 1.0 && (n - n.round()).abs() <= 1e-9 * n) {
        return Err(invalid(format!(
            "{what} {interval} is not a whole number of {dt} steps"
        )));
    }
    Ok(())
}

fn parse_runtime_config(s: &str) -> Result<(Scheme, usize)> {
    let (scheme, nx) = s
        .split_once(':')
        .ok_or_else(|| invalid(format!("runtime config '{s}' is not scheme:nodes")))?;
    let nx = nx
        .trim()
        .parse()
        .map_err(|_| invalid(format!("bad node count in runtime config '{s}'")))?;
    Ok((scheme.trim().parse()?, nx))
}

pub fn benchmark(ctx: &Context, a: &BenchmarkArgs) -> Result<()> {
    let b = &ctx.config.benchmark;
    let mut case = BenchmarkCase::default();
    case.fo = pick(a.fo, b.fo, case.fo);
    case.tau = pick(a.tau, b.tau, case.tau);
    case.validate()?;

    let schemes = pick_list(&a.schemes, &b.schemes, vec!["qunt".into(), "imex".into()])
        .iter()
        .map(|s| s.parse::<Scheme>())
        .collect::<qunt::Result<Vec<_>>>()?;
    let nxs = pick_list(&a.nx, &b.nx, vec![case.nx]);
    let dts = pick_list(&a.dt, &b.dt, vec![case.dt]);
    let ref_nx = pick(a.ref_nx, b.ref_nx, 2001);
    let ref_dt = pick(a.ref_dt, b.ref_dt, 5e-3);
    let save_every = pick(a.save_every, b.save_every, 0.05);
    let runtime_configs = pick_list(
        &a.runtime_configs,
        &b.runtime_configs,
        vec!["cn:1001".into(), "qunt:51".into(), "imex:501".into()],
    )
    .iter()
    .map(|s| parse_runtime_config(s))
    .collect::<Result<Vec<_>>>()?;
    let runtime_dt = pick(a.runtime_dt, b.runtime_dt, 1e-2);
    let horizons = pick_list(&a.runtime_horizons, &b.runtime_horizons, vec![case.tau]);
    let repeats = pick(a.runtime_repeats, b.runtime_repeats, 1);

    if schemes.is_empty() || nxs.is_empty() || dts.is_empty() {
        return Err(invalid(
            "the convergence table needs at least one scheme, node count and time step",
        ));
    }
    for &nx in nxs.iter().chain(runtime_configs.iter().map(|(_, n)| n)) {
        check_nodes(nx)?;
    }
    let largest = nxs.iter().copied().max().unwrap_or(0);
    if ref_nx < 4 * largest {
        return Err(invalid(format!(
            "reference needs at least {} nodes for Nx = {largest}",
            4 * largest
        )));
    }
    check_nodes(ref_nx)?;
    check_multiple(case.tau, save_every, "final time")?;
    for &dt in dts.iter().chain([ref_dt, runtime_dt].iter()) {
        check_multiple(save_every, dt, "save interval")?;
    }
    for &h in &horizons {
        check_multiple(h, runtime_dt, "runtime horizon")?;
    }
    if repeats == 0 {
        return Err(invalid("runtime repeats must be at least 1"));
    }
    if !runtime_configs.iter().any(|(s, _)| *s == Scheme::CrankNicolson) {
        warn!("no Crank-Nicolson run among the timed configurations: ratios will be NaN");
    }

    info!("reference: Crank-Nicolson, {ref_nx} nodes, dt {ref_dt}");
    let reference = ReferenceSolution::compute(&case, ref_nx, ref_dt, save_every)?;
    let table = convergence_study(
        &case,
        &reference,
        &schemes,
        &nxs,
        &dts,
        &Sampling::SchemeNodes,
        ctx.workers,
    )?;
    for v in &table.trend_violations {
        warn!("{v}");
    }
    table.write_field_csv(ctx.create("errors_field.csv")?)?;
    table.write_flux_csv(ctx.create("errors_flux.csv")?)?;
    for c in &table.cells {
        match &c.result {
            Ok((eps, xi)) => println!(
                "{} Nx={} dt={}: eps_inf={eps:e} xi_inf=[{:e}, {:e}]",
                c.scheme, c.nx, c.dt, xi[0], xi[1]
            ),
            Err(e) => println!("{} Nx={} dt={}: failed: {e}", c.scheme, c.nx, c.dt),
        }
    }

    let runtime = runtime_comparison(
        &case,
        &runtime_configs,
        runtime_dt,
        &horizons,
        repeats,
        Some(&reference),
    )?;
    runtime.write_csv(ctx.create("runtime.csv")?)?;

    let trajectory = run_benchmark(&case, Scheme::Qunt, nxs[0], dts[0], case.tau, save_every)?;
    trajectory.write_trajectory_csv(ctx.create("trajectory.csv")?)?;
    Ok(())
}

/// Everything a wall simulation needs, resolved from flags, file and
/// defaults.
struct WallSetup {
    climate: ClimateSeries,
    schedule: IndoorSchedule,
    assembly: WallAssembly,
    /// Layer swept by `sweep` and `optimize`.
    insulation_layer: Option<usize>,
    options: SolverOptions,
}

fn climate_profile(ctx: &Context, city: Option<&str>, seed: Option<u64>, year: Option<i32>) -> Result<ClimateProfile> {
    let c = &ctx.config.climate;
    let mut p = ClimateProfile::by_name(city.or(c.city.as_deref()).unwrap_or("curitiba"))?;
    p.seed = pick(seed, c.seed, p.seed);
    p.year = pick(year, c.year, p.year);
    p.noise = c.noise.unwrap_or(p.noise);
    p.t_min = c.t_min.unwrap_or(p.t_min);
    p.t_mean = c.t_mean.unwrap_or(p.t_mean);
    p.t_max = c.t_max.unwrap_or(p.t_max);
    p.latitude = c.latitude.unwrap_or(p.latitude);
    p.solar_peak = c.solar_peak.unwrap_or(p.solar_peak);
    p.sky_offset = c.sky_offset.unwrap_or(p.sky_offset);
    p.validate()?;
    Ok(p)
}

fn custom_layers(entries: &[crate::config::LayerEntry]) -> Result<Vec<Layer>> {
    entries
        .iter()
        .map(|e| {
            let material = match (e.rho, e.cp, e.k) {
                (None, None, None) => Material::by_name(&e.material)?,
                (Some(rho), Some(cp), Some(k)) => Material::new(e.material.clone(), rho, cp, k)?,
                _ => {
                    return Err(invalid(format!(
                        "material '{}' needs all of rho, cp and k, or none",
                        e.material
                    )))
                }
            };
            Ok(Layer {
                material,
                thickness: e.thickness,
            })
        })
        .collect()
}

impl WallSetup {
    fn resolve(ctx: &Context, w: &WallArgs) -> Result<Self> {
        let cfg = ctx.config;
        let profile = climate_profile(ctx, w.city.as_deref(), w.seed, None)?;
        let climate = match w.climate.as_ref().or(cfg.climate.file.as_ref()) {
            Some(path) => load_climate_csv(path)?,
            None => synthesize_climate(&profile)?,
        };

        let s = &cfg.schedule;
        let mut schedule = IndoorSchedule::for_latitude(profile.latitude);
        schedule.winter_setpoint = pick(w.winter_setpoint, s.winter_setpoint, schedule.winter_setpoint);
        schedule.summer_setpoint = pick(w.summer_setpoint, s.summer_setpoint, schedule.summer_setpoint);
        schedule.peak_day = s.peak_day.unwrap_or(schedule.peak_day);
        schedule.validate()?;

        let a = &cfg.assembly;
        let orientation: Option<Orientation> = w
            .orientation
            .as_deref()
            .or(a.orientation.as_deref())
            .map(str::parse)
            .transpose()?;
        let insulation = w.insulation.or(a.insulation);
        let (mut assembly, insulation_layer) = match (&a.layers, &w.configuration) {
            (Some(layers), None) => {
                let mut assembly =
                    WallAssembly::new(custom_layers(layers)?, orientation.unwrap_or(Orientation::South))?;
                if let (Some(i), Some(l)) = (a.insulation_layer, insulation) {
                    assembly = assembly.with_layer_thickness(i, l)?;
                } else if insulation.is_some() {
                    return Err(invalid("set assembly.insulation_layer to resize a custom layer"));
                }
                (assembly, a.insulation_layer)
            }
            _ => {
                let c: Configuration = w
                    .configuration
                    .as_deref()
                    .or(a.configuration.as_deref())
                    .unwrap_or("wall2")
                    .parse()?;
                let o = orientation.unwrap_or(if c.is_wall() {
                    Orientation::South
                } else {
                    Orientation::Roof
                });
                (c.build(o, insulation.unwrap_or(0.1))?, c.insulation_layer())
            }
        };
        assembly.solar_absorptivity = a.solar_absorptivity.unwrap_or(assembly.solar_absorptivity);
        assembly.emissivity = a.emissivity.unwrap_or(assembly.emissivity);
        assembly.h_inside = a.h_inside.unwrap_or(assembly.h_inside);
        assembly.h_outside = a.h_outside.unwrap_or(assembly.h_outside);
        assembly.validate()?;
        if let Some(i) = insulation_layer {
            if i >= assembly.layers.len() {
                return Err(invalid(format!("insulation layer {i} out of range")));
            }
        }

        let sv = &cfg.solver;
        let defaults = SolverOptions::default();
        let scheme = match w.scheme.as_deref().or(sv.scheme.as_deref()) {
            Some(s) => s.parse()?,
            None => defaults.scheme,
        };
        let options = SolverOptions {
            scheme,
            nx: pick(w.nx, sv.nx, defaults.nx),
            dt: pick(w.dt, sv.dt, defaults.dt),
            ..defaults
        };
        options.validate()?;
        Ok(Self {
            climate,
            schedule,
            assembly,
            insulation_layer,
            options,
        })
    }

    fn grid(ctx: &Context, g: &GridArgs) -> Result<Vec<f64>> {
        let s = &ctx.config.sweep;
        Ok(thickness_grid(
            pick(g.first, s.first, 0.01),
            pick(g.last, s.last, 0.3),
            pick(g.step, s.step, 0.01),
        )?)
    }

    fn sweep(&self, ctx: &Context, grid: &[f64]) -> Result<qunt::envelope::SweepTable> {
        let layer = self
            .insulation_layer
            .ok_or_else(|| invalid("this assembly has no insulation layer to sweep"))?;
        let table = sweep_thickness(
            &self.assembly,
            layer,
            grid,
            &self.climate,
            &self.schedule,
            &self.options,
            ctx.workers,
        )?;
        table.write_csv(ctx.create("sweep.csv")?)?;
        let failed = table.failures().count();
        if failed > 0 {
            warn!(
                "{failed} of {} thicknesses failed; see the error column of sweep.csv",
                table.rows.len()
            );
        }
        Ok(table)
    }
}

pub fn simulate(ctx: &Context, a: &SimulateArgs) -> Result<()> {
    let setup = WallSetup::resolve(ctx, &a.wall)?;
    let hours = a.hours.unwrap_or(setup.climate.len() as f64);
    let r = simulate_span(&setup.assembly, &setup.climate, &setup.schedule, &setup.options, hours)?;
    r.loads.flux.write_csv(ctx.create("flux.csv")?)?;
    r.loads.write_daily_csv(ctx.create("loads_daily.csv")?)?;
    r.loads.write_monthly_csv(ctx.create("loads_monthly.csv")?)?;
    let l = r.loads.annual;
    println!(
        "heating {:.4} MJ/m2, cooling {:.4} MJ/m2, total {:.4} MJ/m2 over {hours} h",
        l.heating,
        l.cooling,
        l.total()
    );
    Ok(())
}

pub fn sweep(ctx: &Context, a: &SweepArgs) -> Result<()> {
    let setup = WallSetup::resolve(ctx, &a.wall)?;
    let grid = WallSetup::grid(ctx, &a.grid)?;
    let table = setup.sweep(ctx, &grid)?;
    for (l, e) in table.annual_totals() {
        println!("{l} m: {e:.4} MJ/m2");
    }
    Ok(())
}

/// `(thickness, annual total)` rows of a sweep.csv; failed rows are skipped.
fn read_sweep(path: &Path) -> Result<Vec<(f64, f64)>> {
    let data_err = |row: usize, message: String| Error::Data {
        path: path.to_path_buf(),
        row,
        message,
    };
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers().map_err(Error::from)?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| data_err(1, format!("missing column {name}")))
    };
    let (li, ti) = (column("l_i_m")?, column("total_MJm2")?);
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(Error::from)?;
        let field = |j: usize| record.get(j).unwrap_or("").trim();
        let l: f64 = field(li)
            .parse()
            .map_err(|_| data_err(line, format!("bad thickness '{}'", field(li))))?;
        if field(ti).is_empty() {
            warn!("{}: row {line}: thickness {l} has no load, skipped", path.display());
            continue;
        }
        let e: f64 = field(ti)
            .parse()
            .map_err(|_| data_err(line, format!("bad total load '{}'", field(ti))))?;
        rows.push((l, e));
    }
    if rows.is_empty() {
        return Err(data_err(2, "no completed rows".into()).into());
    }
    Ok(rows)
}

pub fn optimize(ctx: &Context, a: &OptimizeArgs) -> Result<()> {
    let e = &ctx.config.economics;
    let base = EconomicParams::default();
    let params = EconomicParams {
        insulation_price: pick(a.insulation_price, e.insulation_price, base.insulation_price),
        system_efficiency: pick(a.system_efficiency, e.system_efficiency, base.system_efficiency),
        energy_price: pick(a.energy_price, e.energy_price, base.energy_price),
    };
    params.validate()?;
    let sweep = match &a.sweep {
        Some(path) => read_sweep(path)?,
        None => {
            let setup = WallSetup::resolve(ctx, &a.wall)?;
            let grid = WallSetup::grid(ctx, &a.grid)?;
            setup.sweep(ctx, &grid)?.annual_totals()
        }
    };
    if sweep.is_empty() {
        return Err(invalid("every thickness of the sweep failed"));
    }
    let o = optimum_thickness(&sweep, &params)?;
    o.write_csv(ctx.create("costs.csv")?)?;
    let best = o.best();
    println!(
        "optimum {} m: energy {:.4} $/m2 + insulation {:.4} $/m2 = {:.4} $/m2",
        best.thickness, best.energy_cost, best.insulation_cost, best.total
    );
    Ok(())
}

pub fn synth_climate(ctx: &Context, a: &SynthArgs) -> Result<()> {
    let profile = climate_profile(ctx, a.city.as_deref(), a.seed, a.year)?;
    let climate = synthesize_climate(&profile)?;
    let name = a.output.clone().unwrap_or_else(|| PathBuf::from("climate.csv"));
    climate.write_csv(ctx.create(&name)?)?;
    println!(
        "{}: {} hours written to {}",
        profile.name,
        climate.len(),
        ctx.out_dir.join(name).display()
    );
    Ok(())
}
