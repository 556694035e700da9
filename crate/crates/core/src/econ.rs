//! Insulation economics: yearly energy cost, insulation cost and the
//! thickness minimising their sum over a sweep.

use std::io::Write;

use crate::error::{Error, Result};

/// MJ per kWh.
pub const MJ_PER_KWH: f64 = 3.6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EconomicParams {
    /// Insulation price including installation, $/m³.
    pub insulation_price: f64,
    /// Efficiency of the heating/cooling system.
    pub system_efficiency: f64,
    /// Energy price, $/kWh.
    pub energy_price: f64,
}

impl Default for EconomicParams {
    fn default() -> Self {
        Self {
            insulation_price: 100.0,
            system_efficiency: 0.8,
            energy_price: 0.218,
        }
    }
}

impl EconomicParams {
    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("insulation price", self.insulation_price),
            ("system efficiency", self.system_efficiency),
            ("energy price", self.energy_price),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{what} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// `C_E = (E/3.6)·p_e/η` in $/m² for an annual load `E` in MJ/m².
pub fn energy_cost(annual_load: f64, params: &EconomicParams) -> Result<f64> {
    params.validate()?;
    if !(annual_load >= 0.0 && annual_load.is_finite()) {
        return Err(Error::invalid(format!("annual load must be >= 0, got {annual_load}")));
    }
    Ok(annual_load / MJ_PER_KWH * params.energy_price / params.system_efficiency)
}

/// `C_I = p_i·l` in $/m².
pub fn insulation_cost(thickness: f64, params: &EconomicParams) -> Result<f64> {
    params.validate()?;
    if !(thickness >= 0.0 && thickness.is_finite()) {
        return Err(Error::invalid(format!(
            "insulation thickness must be >= 0, got {thickness}"
        )));
    }
    Ok(params.insulation_price * thickness)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    /// m
    pub thickness: f64,
    /// Annual load, MJ/m².
    pub annual_load: f64,
    pub energy_cost: f64,
    pub insulation_cost: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    /// Sorted by thickness.
    pub table: Vec<CostBreakdown>,
    pub index: usize,
}

impl Optimum {
    pub fn best(&self) -> &CostBreakdown {
        &self.table[self.index]
    }

    pub fn thickness(&self) -> f64 {
        self.best().thickness
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["l_i_m", "E_MJm2", "C_E", "C_I", "C_T", "is_optimum"])?;
        for (i, c) in self.table.iter().enumerate() {
            w.write_record([
                c.thickness.to_string(),
                c.annual_load.to_string(),
                c.energy_cost.to_string(),
                c.insulation_cost.to_string(),
                c.total.to_string(),
                (i == self.index).to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Costs every `(thickness, annual load)` entry and picks the cheapest;
/// ties go to the thinner layer.
pub fn optimum_thickness(sweep: &[(f64, f64)], params: &EconomicParams) -> Result<Optimum> {
    if sweep.is_empty() {
        return Err(Error::invalid("cannot optimise an empty sweep"));
    }
    let mut table = sweep
        .iter()
        .map(|&(l, e)| {
            let energy = energy_cost(e, params)?;
            let insulation = insulation_cost(l, params)?;
            Ok(CostBreakdown {
                thickness: l,
                annual_load: e,
                energy_cost: energy,
                insulation_cost: insulation,
                total: energy + insulation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    table.sort_by(|a, b| a.thickness.total_cmp(&b.thickness));
    if let Some(w) = table.windows(2).find(|w| w[0].thickness == w[1].thickness) {
        return Err(Error::invalid(format!(
            "thickness {} appears twice in the sweep",
            w[0].thickness
        )));
    }
    let mut index = 0;
    for (i, c) in table.iter().enumerate() {
        if c.total < table[index].total {
            index = i;
        }
    }
    Ok(Optimum { table, index })
}
