//! Scenario files. Every key is optional; command-line flags take
//! precedence over the file, and the file over the built-in defaults.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub out_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub benchmark: BenchmarkSection,
    pub solver: SolverSection,
    pub climate: ClimateSection,
    pub schedule: ScheduleSection,
    pub assembly: AssemblySection,
    pub sweep: SweepSection,
    pub economics: EconomicsSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchmarkSection {
    pub fo: Option<f64>,
    pub tau: Option<f64>,
    pub schemes: Option<Vec<String>>,
    pub nx: Option<Vec<usize>>,
    pub dt: Option<Vec<f64>>,
    pub ref_nx: Option<usize>,
    pub ref_dt: Option<f64>,
    pub save_every: Option<f64>,
    /// Entries of the form `scheme:nodes`.
    pub runtime_configs: Option<Vec<String>>,
    pub runtime_dt: Option<f64>,
    pub runtime_horizons: Option<Vec<f64>>,
    pub runtime_repeats: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub scheme: Option<String>,
    pub nx: Option<usize>,
    pub dt: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClimateSection {
    /// Hourly climate CSV; when absent a synthetic year is generated.
    pub file: Option<PathBuf>,
    pub city: Option<String>,
    pub seed: Option<u64>,
    pub year: Option<i32>,
    pub noise: Option<f64>,
    pub t_min: Option<f64>,
    pub t_mean: Option<f64>,
    pub t_max: Option<f64>,
    pub latitude: Option<f64>,
    pub solar_peak: Option<f64>,
    pub sky_offset: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScheduleSection {
    pub winter_setpoint: Option<f64>,
    pub summer_setpoint: Option<f64>,
    pub peak_day: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AssemblySection {
    pub configuration: Option<String>,
    pub orientation: Option<String>,
    pub insulation: Option<f64>,
    /// Custom layers, inside to outside. Replaces `configuration`.
    pub layers: Option<Vec<LayerEntry>>,
    /// Layer swept by `sweep` and `optimize` for custom layers.
    pub insulation_layer: Option<usize>,
    pub solar_absorptivity: Option<f64>,
    pub emissivity: Option<f64>,
    pub h_inside: Option<f64>,
    pub h_outside: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerEntry {
    pub material: String,
    pub thickness: f64,
    /// Density, conductivity and specific heat; all three or none (built-in).
    pub rho: Option<f64>,
    pub cp: Option<f64>,
    pub k: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub first: Option<f64>,
    pub last: Option<f64>,
    pub step: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EconomicsSection {
    pub insulation_price: Option<f64>,
    pub system_efficiency: Option<f64>,
    pub energy_price: Option<f64>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let mut config: Self = toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        // files named in the config are relative to it
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(f) = config.climate.file.as_mut() {
            *f = base.join(&*f);
        }
        if let Some(d) = config.out_dir.as_mut() {
            *d = base.join(&*d);
        }
        Ok(config)
    }
}
