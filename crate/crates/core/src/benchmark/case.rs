use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gridmotion::MonitorConfig;
use crate::pdesolver::{BoundarySpec, DimensionlessProblem, Homogeneous};

/// The nonlinear test problem: a slab with strongly temperature-dependent
/// properties, driven by out-of-phase sinusoidal Dirichlet temperatures.
///
/// `k*(u) = 1 + 0.91u + 600·exp(−10(u − 1.5)²)`,
/// `c*(u) = 900 − 656u + 10⁴·exp(−5(u − 1.5)²)`,
/// `u_L = 1 − A_L·sin(2πt/P_L)`, `u_R = 1 + A_R·sin(2πt/P_R)`, `u(x, 0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkCase {
    pub fo: f64,
    pub tau: f64,
    pub amplitude: [f64; 2],
    pub period: [f64; 2],
    pub monitor: MonitorConfig,
    pub dt: f64,
    pub nx: usize,
}

impl Default for BenchmarkCase {
    fn default() -> Self {
        Self {
            fo: 1.0,
            tau: 48.0,
            amplitude: [0.5, 0.5],
            period: [12.0, 24.0],
            monitor: MonitorConfig::benchmark(),
            dt: 5e-3,
            nx: 51,
        }
    }
}

pub fn kstar(u: f64) -> f64 {
    let d = u - 1.5;
    1.0 + 0.91 * u + 600.0 * (-10.0 * d * d).exp()
}

pub fn cstar(u: f64) -> f64 {
    let d = u - 1.5;
    900.0 - 656.0 * u + 1e4 * (-5.0 * d * d).exp()
}

/// Range of `u` the boundary signals can reach.
pub const OPERATING_RANGE: (f64, f64) = (0.5, 1.5);

impl BenchmarkCase {
    /// Same problem with both boundaries held at `u = 1`.
    pub fn steady() -> Self {
        Self {
            amplitude: [0.0, 0.0],
            ..Self::default()
        }
    }

    pub fn u_left(&self, t: f64) -> f64 {
        1.0 - self.amplitude[0] * (2.0 * PI * t / self.period[0]).sin()
    }

    pub fn u_right(&self, t: f64) -> f64 {
        1.0 + self.amplitude[1] * (2.0 * PI * t / self.period[1]).sin()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::invalid(format!("final time must be positive, got {}", self.tau)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!("time step must be positive, got {}", self.dt)));
        }
        if self.amplitude.iter().any(|a| !(0.0..=0.5).contains(a)) {
            return Err(Error::invalid("boundary amplitudes must lie in [0, 0.5]"));
        }
        if self.period.iter().any(|p| !(*p > 0.0)) {
            return Err(Error::invalid("boundary periods must be positive"));
        }
        self.monitor.validate()
    }

    pub fn problem(&self) -> Result<DimensionlessProblem> {
        self.validate()?;
        let (al, pl) = (self.amplitude[0], self.period[0]);
        let (ar, pr) = (self.amplitude[1], self.period[1]);
        DimensionlessProblem::new(
            Arc::new(Homogeneous::new(cstar, kstar)),
            self.fo,
            BoundarySpec::dirichlet(Arc::new(move |t| 1.0 - al * (2.0 * PI * t / pl).sin())),
            BoundarySpec::dirichlet(Arc::new(move |t| 1.0 + ar * (2.0 * PI * t / pr).sin())),
            Arc::new(|_| 1.0),
            OPERATING_RANGE,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_positive_on_operating_range() {
        for i in 0..=1000 {
            let u = 0.5 + i as f64 / 1000.0;
            assert!(kstar(u) > 1.0);
            assert!(cstar(u) > 0.0);
        }
    }

    #[test]
    fn signals_start_at_one() {
        let c = BenchmarkCase::default();
        assert_eq!(c.u_left(0.0), 1.0);
        assert_eq!(c.u_right(0.0), 1.0);
        assert!((c.u_left(3.0) - 0.5).abs() < 1e-15);
        assert!((c.u_right(6.0) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn peak_values() {
        assert!((kstar(1.5) - (1.0 + 0.91 * 1.5 + 600.0)).abs() < 1e-12);
        assert!((cstar(1.5) - (900.0 - 984.0 + 1e4)).abs() < 1e-9);
    }
}
