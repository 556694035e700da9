use std::sync::Arc;

use crate::error::{Error, Result};

use super::problem::{BoundarySpec, DimensionlessProblem, Homogeneous, Layered, PropertyFn, Signal};

/// Stefan–Boltzmann constant, W/(m²·K⁴).
pub const STEFAN_BOLTZMANN: f64 = 5.670374e-8;

/// Reference values used to scale the physical problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceScales {
    /// Temperature T₀, K.
    pub temperature: f64,
    /// Time t₀, s.
    pub time: f64,
    /// Length l, m.
    pub length: f64,
    /// Conductivity k₀, W/(m·K).
    pub conductivity: f64,
    /// Volumetric heat capacity c₀, J/(m³·K).
    pub capacity: f64,
}

impl ReferenceScales {
    pub fn validate(&self) -> Result<()> {
        let ok = [
            self.temperature,
            self.time,
            self.length,
            self.conductivity,
            self.capacity,
        ]
        .iter()
        .all(|v| *v > 0.0 && v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("reference scales must be positive: {self:?}")))
        }
    }

    /// `Fo = t₀k₀/(l²c₀)`
    pub fn fourier(&self) -> f64 {
        self.time * self.conductivity / (self.length * self.length * self.capacity)
    }

    /// `Bi = h·l/k₀`
    pub fn biot(&self, h: f64) -> f64 {
        h * self.length / self.conductivity
    }

    /// `q* = l·q/(T₀k₀)`
    pub fn flux_to_dimensionless(&self, q: f64) -> f64 {
        self.length * q / (self.temperature * self.conductivity)
    }

    /// `q = q*·T₀k₀/l`
    pub fn flux_to_physical(&self, q_star: f64) -> f64 {
        q_star * self.temperature * self.conductivity / self.length
    }

    /// `R*_lw = εσlT₀³/k₀`
    pub fn longwave(&self, emissivity: f64) -> f64 {
        emissivity * STEFAN_BOLTZMANN * self.length * self.temperature.powi(3) / self.conductivity
    }

    pub fn temperature_to_dimensionless(&self, t_kelvin: f64) -> f64 {
        t_kelvin / self.temperature
    }

    pub fn temperature_to_physical(&self, u: f64) -> f64 {
        u * self.temperature
    }

    pub fn time_to_dimensionless(&self, seconds: f64) -> f64 {
        seconds / self.time
    }

    pub fn time_to_physical(&self, t_star: f64) -> f64 {
        t_star * self.time
    }
}

/// Physical signal of time in seconds.
pub type PhysicalSignal = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One layer with temperature-dependent properties `c(T)` in J/(m³·K)
/// and `k(T)` in W/(m·K).
#[derive(Clone)]
pub struct PhysicalLayer {
    pub thickness: f64,
    pub capacity: PropertyFn,
    pub conductivity: PropertyFn,
}

/// Boundary conditions in SI units. Temperatures in K, fluxes in W/m².
#[derive(Clone)]
pub enum PhysicalBoundary {
    Dirichlet {
        temperature: PhysicalSignal,
    },
    Robin {
        air: PhysicalSignal,
        h: f64,
    },
    Radiative {
        air: PhysicalSignal,
        h: f64,
        /// Absorbed short-wave flux `α·q∞(t)`.
        absorbed: PhysicalSignal,
        emissivity: f64,
        sky: PhysicalSignal,
    },
}

/// A layered slab `x ∈ [0, Σ thickness]` with boundary conditions and an
/// initial temperature profile `T_i(x)` (x in m, T in K).
#[derive(Clone)]
pub struct PhysicalProblem {
    pub layers: Vec<PhysicalLayer>,
    pub left: PhysicalBoundary,
    pub right: PhysicalBoundary,
    pub initial: PhysicalSignal,
    /// Temperature range (K) over which the properties are checked.
    pub temperature_range: (f64, f64),
}

impl PhysicalProblem {
    pub fn thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }
}

fn scale_signal(s: &PhysicalSignal, time: f64, factor: f64) -> Signal {
    let s = s.clone();
    Arc::new(move |t_star| factor * s(t_star * time))
}

fn scale_boundary(b: &PhysicalBoundary, sc: &ReferenceScales) -> Result<BoundarySpec> {
    let inv_t0 = 1.0 / sc.temperature;
    let check_h = |h: f64| {
        if h >= 0.0 && h.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid(format!("convective coefficient must be >= 0, got {h}")))
        }
    };
    Ok(match b {
        PhysicalBoundary::Dirichlet { temperature } => {
            BoundarySpec::dirichlet(scale_signal(temperature, sc.time, inv_t0))
        }
        PhysicalBoundary::Robin { air, h } => {
            check_h(*h)?;
            BoundarySpec::robin(scale_signal(air, sc.time, inv_t0), sc.biot(*h))
        }
        PhysicalBoundary::Radiative {
            air,
            h,
            absorbed,
            emissivity,
            sky,
        } => {
            check_h(*h)?;
            if !(0.0..=1.0).contains(emissivity) {
                return Err(Error::invalid(format!(
                    "emissivity must lie in [0, 1], got {emissivity}"
                )));
            }
            BoundarySpec::radiative(
                scale_signal(air, sc.time, inv_t0),
                sc.biot(*h),
                scale_signal(absorbed, sc.time, sc.flux_to_dimensionless(1.0)),
                sc.longwave(*emissivity),
                scale_signal(sky, sc.time, inv_t0),
            )
        }
    })
}

/// Maps a physical slab problem onto `x* ∈ [0, 1]`, `u = T/T₀`,
/// `t* = t/t₀` with `c* = c/c₀`, `k* = k/k₀`.
///
/// `scales.length` must equal the total slab thickness.
pub fn nondimensionalize(physical: &PhysicalProblem, scales: &ReferenceScales) -> Result<DimensionlessProblem> {
    scales.validate()?;
    if physical.layers.is_empty() {
        return Err(Error::invalid("problem has no layers"));
    }
    if physical
        .layers
        .iter()
        .any(|l| !(l.thickness > 0.0 && l.thickness.is_finite()))
    {
        return Err(Error::invalid("layer thicknesses must be positive"));
    }
    let total = physical.thickness();
    if ((total - scales.length) / total).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "length scale {} m does not match slab thickness {total} m",
            scales.length
        )));
    }
    let t0 = scales.temperature;
    let mut end = 0.0;
    let mut layers = Vec::with_capacity(physical.layers.len());
    for layer in &physical.layers {
        end += layer.thickness / total;
        let (c, k) = (layer.capacity.clone(), layer.conductivity.clone());
        let (c0, k0) = (scales.capacity, scales.conductivity);
        layers.push((end, Homogeneous::new(move |u| c(u * t0) / c0, move |u| k(u * t0) / k0)));
    }
    let medium = Layered::new(layers)?;
    let initial = {
        let init = physical.initial.clone();
        Arc::new(move |x: f64| init(x * total) / t0)
    };
    let (tlo, thi) = physical.temperature_range;
    DimensionlessProblem::new(
        Arc::new(medium),
        scales.fourier(),
        scale_boundary(&physical.left, scales)?,
        scale_boundary(&physical.right, scales)?,
        initial,
        (tlo / t0, thi / t0),
    )
}

/// `q = q*·T₀k₀/l`, W/m².
pub fn redimensionalize_flux(q_star: f64, scales: &ReferenceScales) -> f64 {
    scales.flux_to_physical(q_star)
}

/// `T = u·T₀`, K.
pub fn redimensionalize_temperature(u: f64, scales: &ReferenceScales) -> f64 {
    scales.temperature_to_physical(u)
}
