use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Indoor air temperature following an annual cosine between a winter and
/// a summer set point (°C).
#[derive(Debug, Clone, PartialEq)]
pub struct IndoorSchedule {
    pub winter_setpoint: f64,
    pub summer_setpoint: f64,
    /// Day of the year (0-based) at which the summer set point is reached.
    pub peak_day: f64,
}

impl Default for IndoorSchedule {
    fn default() -> Self {
        Self::for_latitude(-25.5)
    }
}

impl IndoorSchedule {
    /// 20 °C in winter, 25 °C in summer, phased by hemisphere.
    pub fn for_latitude(latitude: f64) -> Self {
        Self {
            winter_setpoint: 20.0,
            summer_setpoint: 25.0,
            peak_day: super::climate::summer_peak_day(latitude),
        }
    }

    pub fn constant(t: f64) -> Self {
        Self {
            winter_setpoint: t,
            summer_setpoint: t,
            peak_day: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.winter_setpoint.is_finite() && self.summer_setpoint.is_finite() && self.peak_day.is_finite()) {
            return Err(Error::invalid("indoor schedule values must be finite"));
        }
        Ok(())
    }

    /// Set point in °C on fractional day `day` of a 365-day year.
    pub fn temperature(&self, day: f64) -> f64 {
        let mid = 0.5 * (self.winter_setpoint + self.summer_setpoint);
        let half = 0.5 * (self.summer_setpoint - self.winter_setpoint);
        mid + half * (2.0 * PI * (day - self.peak_day) / 365.0).cos()
    }
}
