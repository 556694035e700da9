//! Walls and roofs exposed to a year of weather.
//!
//! Layers run from the room (x = 0) to the outside (x = l). The inside
//! surface sees a film coefficient and the indoor set point; the outside
//! surface sees the outdoor air, the absorbed short-wave flux and, for
//! roofs, long-wave exchange with the sky. The heat flux through the inside
//! surface is integrated into daily, monthly and annual loads.

mod assembly;
mod climate;
mod loads;
mod schedule;
mod simulate;
mod sweep;

pub use assembly::{Configuration, Layer, Material, Orientation, WallAssembly, BRICK_THICKNESS, ROOF_SLAB_THICKNESS};
pub use climate::{
    load_climate_csv, read_climate, summer_peak_day, synthesize_climate, ClimateProfile, ClimateSeries,
    DEFAULT_SKY_OFFSET,
};
pub use loads::{transmission_loads, FluxSeries, LoadComponents, LoadReport};
pub use schedule::IndoorSchedule;
pub use simulate::{
    inside_flux, physical_problem, simulate_span, simulate_year, wall_scales, SolverOptions, YearResult,
    REFERENCE_TEMPERATURE, REFERENCE_TIME,
};
pub use sweep::{sweep_thickness, thickness_grid, SweepRow, SweepTable};
