use std::io::Write;

use rayon::prelude::*;

use super::assembly::WallAssembly;
use super::climate::ClimateSeries;
use super::loads::LoadComponents;
use super::schedule::IndoorSchedule;
use super::simulate::{simulate_year, SolverOptions};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Thickness of the swept layer, m.
    pub thickness: f64,
    /// Annual loads, or the failure message.
    pub result: std::result::Result<LoadComponents, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// `(thickness, annual total)` for the rows that completed.
    pub fn annual_totals(&self) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.result.as_ref().ok().map(|l| (r.thickness, l.total())))
            .collect()
    }

    pub fn failures(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.result.is_err())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["l_i_m", "heating_MJm2", "cooling_MJm2", "total_MJm2", "error"])?;
        for r in &self.rows {
            let rec = match &r.result {
                Ok(l) => [
                    r.thickness.to_string(),
                    l.heating.to_string(),
                    l.cooling.to_string(),
                    l.total().to_string(),
                    String::new(),
                ],
                Err(e) => [
                    r.thickness.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    e.clone(),
                ],
            };
            w.write_record(&rec)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Runs one year per thickness of layer `layer`, on up to `workers`
/// threads. A failing thickness is recorded and the sweep carries on.
pub fn sweep_thickness(
    template: &WallAssembly,
    layer: usize,
    thicknesses: &[f64],
    climate: &ClimateSeries,
    schedule: &IndoorSchedule,
    options: &SolverOptions,
    workers: usize,
) -> Result<SweepTable> {
    if thicknesses.is_empty() {
        return Err(Error::invalid("no thicknesses to sweep"));
    }
    if let Some(l) = thicknesses.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
        return Err(Error::invalid(format!("swept thicknesses must be positive, got {l}")));
    }
    template.with_layer_thickness(layer, thicknesses[0])?;
    options.validate()?;
    let run = |&l: &f64| SweepRow {
        thickness: l,
        result: template
            .with_layer_thickness(layer, l)
            .and_then(|a| simulate_year(&a, climate, schedule, options))
            .map(|r| r.loads.annual)
            .map_err(|e| {
                log::warn!("sweep: thickness {l} m failed: {e}");
                e.to_string()
            }),
    };
    let rows = if workers <= 1 {
        thicknesses.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
        pool.install(|| thicknesses.par_iter().map(run).collect())
    };
    Ok(SweepTable { rows })
}

/// `first, first + step, …` up to `last`, rounded to 1e-9 m.
pub fn thickness_grid(first: f64, last: f64, step: f64) -> Result<Vec<f64>> {
    if !(first > 0.0 && step > 0.0 && last >= first) || ![first, last, step].iter().all(|v| v.is_finite()) {
        return Err(Error::invalid(format!(
            "bad thickness range {first}..{last} step {step}"
        )));
    }
    let count = ((last - first) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((first + i as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_from_one_to_thirty_centimetres() {
        let g = thickness_grid(0.01, 0.30, 0.01).unwrap();
        assert_eq!(g.len(), 30);
        assert_eq!(g[0], 0.01);
        assert_eq!(g[2], 0.03);
        assert_eq!(g[29], 0.3);
        assert!(thickness_grid(0.0, 0.3, 0.01).is_err());
        assert!(thickness_grid(0.1, 0.05, 0.01).is_err());
    }
}
