use std::sync::Arc;

use chrono::{Datelike, Duration, Timelike};

use super::assembly::WallAssembly;
use super::climate::{interpolate_hourly, ClimateSeries};
use super::loads::{transmission_loads, FluxSeries, LoadReport};
use super::schedule::IndoorSchedule;
use crate::error::{Error, Result};
use crate::gridmotion::MonitorConfig;
use crate::pdesolver::{
    boundary_flux, nondimensionalize, DimensionlessProblem, FieldState, Integrator, PhysicalBoundary, PhysicalLayer,
    PhysicalProblem, ReferenceScales, Scheme, SchemeSettings, Side,
};

/// Reference temperature of the wall simulations, K.
pub const REFERENCE_TEMPERATURE: f64 = 293.15;
/// Reference time: one hour.
pub const REFERENCE_TIME: f64 = 3600.0;
const KELVIN: f64 = 273.15;

/// Numerical settings of a wall simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub scheme: Scheme,
    /// Number of nodes.
    pub nx: usize,
    /// Dimensionless time step (hours).
    pub dt: f64,
    pub monitor: MonitorConfig,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            scheme: Scheme::Qunt,
            nx: 41,
            dt: 0.1,
            monitor: MonitorConfig::envelope(),
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.nx < 5 {
            return Err(Error::TooFewNodes { nodes: self.nx, min: 5 });
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!("time step must be positive, got {}", self.dt)));
        }
        if self.scheme == Scheme::Qunt {
            self.monitor.validate()?;
        }
        Ok(())
    }
}

/// Scales used for a given assembly: `T₀ = 293.15 K`, `t₀ = 1 h`, the total
/// thickness, and the properties of the inside layer.
pub fn wall_scales(assembly: &WallAssembly) -> ReferenceScales {
    let inner = &assembly.layers[0].material;
    ReferenceScales {
        temperature: REFERENCE_TEMPERATURE,
        time: REFERENCE_TIME,
        length: assembly.thickness(),
        conductivity: inner.k,
        capacity: inner.capacity(),
    }
}

/// Steady conduction profile (K) between two air temperatures (°C),
/// including the surface films.
fn steady_profile(assembly: &WallAssembly, t_in: f64, t_out: f64) -> impl Fn(f64) -> f64 + Send + Sync {
    // flux in the +x direction, W/m²
    let q = (t_in - t_out) / assembly.resistance();
    let surface = t_in + KELVIN - q / assembly.h_inside;
    let layers: Vec<(f64, f64)> = assembly.layers.iter().map(|l| (l.thickness, l.material.k)).collect();
    move |x: f64| {
        let mut t = surface;
        let mut start = 0.0;
        for &(l, k) in &layers {
            let span = (x - start).clamp(0.0, l);
            t -= q * span / k;
            start += l;
            if x <= start {
                break;
            }
        }
        t
    }
}

/// Physical problem for an assembly: inside film at x = 0, outside film
/// with absorbed short-wave flux (and sky exchange on roofs) at x = l.
/// Climate and set point are in °C and interpolated linearly in time.
pub fn physical_problem(
    assembly: &WallAssembly,
    climate: &ClimateSeries,
    schedule: &IndoorSchedule,
) -> Result<PhysicalProblem> {
    assembly.validate()?;
    schedule.validate()?;
    let start = climate.start();
    let day0 = start.ordinal0() as f64 + start.num_seconds_from_midnight() as f64 / 86_400.0;
    let indoor = {
        let s = schedule.clone();
        Arc::new(move |t: f64| s.temperature(day0 + t / 86_400.0) + KELVIN)
    };
    let series = |v: &[f64], offset: f64, factor: f64| {
        let v: Arc<[f64]> = v.into();
        Arc::new(move |t: f64| factor * interpolate_hourly(&v, t) + offset)
    };
    let outdoor = series(climate.t_out(), KELVIN, 1.0);
    let absorbed = series(climate.solar(assembly.orientation), 0.0, assembly.solar_absorptivity);
    let sky = series(climate.t_sky(), KELVIN, 1.0);
    let emissivity = if assembly.has_longwave() {
        assembly.emissivity
    } else {
        0.0
    };

    let t_in0 = schedule.temperature(day0);
    let t_out0 = climate.t_out()[0];
    let layers = assembly
        .layers
        .iter()
        .map(|l| {
            let (c, k) = (l.material.capacity(), l.material.k);
            PhysicalLayer {
                thickness: l.thickness,
                capacity: Arc::new(move |_| c),
                conductivity: Arc::new(move |_| k),
            }
        })
        .collect();
    Ok(PhysicalProblem {
        layers,
        left: PhysicalBoundary::Robin {
            air: indoor,
            h: assembly.h_inside,
        },
        right: PhysicalBoundary::Radiative {
            air: outdoor,
            h: assembly.h_outside,
            absorbed,
            emissivity,
            sky,
        },
        initial: Arc::new(steady_profile(assembly, t_in0, t_out0)),
        temperature_range: (200.0, 400.0),
    })
}

#[derive(Debug, Clone)]
pub struct YearResult {
    pub loads: LoadReport,
    pub final_state: FieldState,
    pub scales: ReferenceScales,
    pub steps: usize,
}

/// Heat flux entering the room through the inside surface, W/m².
pub fn inside_flux(state: &FieldState, problem: &DimensionlessProblem, scales: &ReferenceScales) -> Result<f64> {
    Ok(-scales.flux_to_physical(boundary_flux(state, problem, Side::Left)?))
}

/// Runs the assembly over the whole climate series (treated as periodic for
/// the final hour) and integrates the inside flux into loads.
pub fn simulate_year(
    assembly: &WallAssembly,
    climate: &ClimateSeries,
    schedule: &IndoorSchedule,
    options: &SolverOptions,
) -> Result<YearResult> {
    let horizon = climate.len() as f64 * 3600.0 / REFERENCE_TIME;
    simulate_span(assembly, climate, schedule, options, horizon)
}

/// Like [`simulate_year`] but stops after `horizon` dimensionless time units
/// (hours).
pub fn simulate_span(
    assembly: &WallAssembly,
    climate: &ClimateSeries,
    schedule: &IndoorSchedule,
    options: &SolverOptions,
    horizon: f64,
) -> Result<YearResult> {
    options.validate()?;
    let scales = wall_scales(assembly);
    let problem = nondimensionalize(&physical_problem(assembly, climate, schedule)?, &scales)?;
    let steps_f = horizon / options.dt;
    let steps = steps_f.round() as usize;
    if steps == 0 || (steps_f - steps as f64).abs() > 1e-6 * steps_f {
        return Err(Error::invalid(format!(
            "horizon {horizon} is not a whole number of steps of {}",
            options.dt
        )));
    }

    let mut integrator = Integrator::new(SchemeSettings::new(options.scheme, options.monitor.clone()))?;
    let mut state = integrator.initial_state(&problem, options.nx - 1, 0.0)?;
    let mut times = Vec::with_capacity(steps + 1);
    let mut flux = Vec::with_capacity(steps + 1);
    times.push(0.0);
    flux.push(inside_flux(&state, &problem, &scales)?);
    for k in 1..=steps {
        integrator.step(&mut state, &problem, options.dt).map_err(|e| {
            let seconds = scales.time_to_physical((k - 1) as f64 * options.dt);
            let at = climate.start() + Duration::milliseconds((seconds * 1000.0).round() as i64);
            let source = match e {
                Error::AtTime { source, .. } => source,
                other => Box::new(other),
            };
            Error::AtTimestamp {
                timestamp: at.format("%Y-%m-%dT%H:%M:%S").to_string(),
                source,
            }
        })?;
        state.t = k as f64 * options.dt;
        times.push(scales.time_to_physical(state.t));
        flux.push(inside_flux(&state, &problem, &scales)?);
    }
    let loads = transmission_loads(FluxSeries {
        start: climate.start(),
        times,
        flux,
    })?;
    Ok(YearResult {
        loads,
        final_state: state,
        scales,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::assembly::{Configuration, Orientation};

    #[test]
    fn steady_profile_is_piecewise_linear() {
        let w = Configuration::Wall2.build(Orientation::South, 0.1).unwrap();
        let f = steady_profile(&w, 20.0, 0.0);
        let q = 20.0 / w.resistance();
        assert!((f(0.0) - (293.15 - q / 10.0)).abs() < 1e-12);
        assert!((f(0.1) - (f(0.0) - q * 0.1 / 0.0275)).abs() < 1e-12);
        assert!((f(0.25) - (273.15 + q / 25.0)).abs() < 1e-10);
    }

    #[test]
    fn scales_use_the_inside_layer() {
        let w = Configuration::Wall3.build(Orientation::South, 0.1).unwrap();
        let s = wall_scales(&w);
        assert_eq!(s.conductivity, 0.69);
        assert!((s.length - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_fractional_horizon() {
        let w = Configuration::Wall1.build(Orientation::South, 0.0).unwrap();
        let start = chrono::NaiveDate::from_ymd_opt(2023, 1, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap();
        let c = ClimateSeries::constant(start, 24, 20.0, 0.0).unwrap();
        let opts = SolverOptions {
            dt: 0.7,
            ..SolverOptions::default()
        };
        assert!(simulate_span(&w, &c, &IndoorSchedule::constant(20.0), &opts, 1.0).is_err());
    }
}
