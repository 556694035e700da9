use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A scalar signal of dimensionless time.
pub type Signal = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar property of temperature (dimensionless or physical).
pub type PropertyFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub fn constant(value: f64) -> Signal {
    Arc::new(move |_| value)
}

/// Storage coefficient `c*(u, x)` and conductivity `k*(u, x)` of the
/// conducting medium on `[0, 1]`.
pub trait Medium: Send + Sync {
    fn capacity(&self, u: f64, x: f64) -> f64;
    fn conductivity(&self, u: f64, x: f64) -> f64;

    /// Positions inside `(0, 1)` where the properties jump, ascending.
    fn interfaces(&self) -> &[f64] {
        &[]
    }
}

/// Properties that depend on `u` only.
pub struct Homogeneous {
    pub capacity: PropertyFn,
    pub conductivity: PropertyFn,
}

impl Homogeneous {
    pub fn new(
        capacity: impl Fn(f64) -> f64 + Send + Sync + 'static,
        conductivity: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            capacity: Arc::new(capacity),
            conductivity: Arc::new(conductivity),
        }
    }

    pub fn constant(capacity: f64, conductivity: f64) -> Self {
        Self::new(move |_| capacity, move |_| conductivity)
    }
}

impl Medium for Homogeneous {
    #[inline]
    fn capacity(&self, u: f64, _x: f64) -> f64 {
        (self.capacity)(u)
    }

    #[inline]
    fn conductivity(&self, u: f64, _x: f64) -> f64 {
        (self.conductivity)(u)
    }
}

/// Piecewise medium: layer `i` occupies `[bounds[i-1], bounds[i]]` with
/// `bounds[-1] = 0` and the last bound equal to 1.
pub struct Layered {
    ends: Vec<f64>,
    layers: Vec<Homogeneous>,
}

impl Layered {
    /// `layers` pairs each layer's right end (dimensionless) with its
    /// properties; the last end must be 1.
    pub fn new(layers: Vec<(f64, Homogeneous)>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("a layered medium needs at least one layer"));
        }
        let mut prev = 0.0;
        for (end, _) in &layers {
            if !(*end > prev) {
                return Err(Error::invalid("layer ends must be strictly increasing"));
            }
            prev = *end;
        }
        if (prev - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("last layer must end at 1, got {prev}")));
        }
        let (mut ends, layers): (Vec<f64>, Vec<Homogeneous>) = layers.into_iter().unzip();
        *ends.last_mut().unwrap() = 1.0;
        Ok(Self { ends, layers })
    }

    #[inline]
    fn layer_at(&self, x: f64) -> &Homogeneous {
        let i = self.ends.partition_point(|&e| e <= x).min(self.layers.len() - 1);
        &self.layers[i]
    }

    /// Mirror image `x ↦ 1 − x`.
    pub fn mirrored(&self) -> Self {
        let n = self.layers.len();
        let mut ends: Vec<f64> = (0..n - 1).map(|i| 1.0 - self.ends[n - 2 - i]).collect();
        ends.push(1.0);
        let layers = self
            .layers
            .iter()
            .rev()
            .map(|l| Homogeneous {
                capacity: l.capacity.clone(),
                conductivity: l.conductivity.clone(),
            })
            .collect();
        Self { ends, layers }
    }
}

impl Medium for Layered {
    #[inline]
    fn capacity(&self, u: f64, x: f64) -> f64 {
        (self.layer_at(x).capacity)(u)
    }

    #[inline]
    fn conductivity(&self, u: f64, x: f64) -> f64 {
        (self.layer_at(x).conductivity)(u)
    }

    fn interfaces(&self) -> &[f64] {
        &self.ends[..self.ends.len() - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Dirichlet,
    Robin,
    RobinRadiative,
}

/// Boundary condition on one side, written with the outward normal `n`:
///
/// * Dirichlet: `u = u_amb(t)`
/// * Robin: `−k ∂u/∂n = Bi (u − u_amb(t))`
/// * RobinRadiative: `−k ∂u/∂n = Bi (u − u_amb(t)) − αq*(t) + R*_lw (u⁴ − u_sky⁴(t))`
#[derive(Clone)]
pub struct BoundarySpec {
    pub kind: BoundaryKind,
    pub ambient: Signal,
    pub biot: f64,
    pub absorbed_flux: Signal,
    pub rlw: f64,
    pub sky: Signal,
}

impl fmt::Debug for BoundarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundarySpec")
            .field("kind", &self.kind)
            .field("biot", &self.biot)
            .field("rlw", &self.rlw)
            .finish_non_exhaustive()
    }
}

impl BoundarySpec {
    pub fn dirichlet(ambient: Signal) -> Self {
        Self {
            kind: BoundaryKind::Dirichlet,
            ambient,
            biot: 0.0,
            absorbed_flux: constant(0.0),
            rlw: 0.0,
            sky: constant(0.0),
        }
    }

    pub fn robin(ambient: Signal, biot: f64) -> Self {
        Self {
            kind: BoundaryKind::Robin,
            biot,
            ..Self::dirichlet(ambient)
        }
    }

    pub fn radiative(ambient: Signal, biot: f64, absorbed_flux: Signal, rlw: f64, sky: Signal) -> Self {
        Self {
            kind: BoundaryKind::RobinRadiative,
            ambient,
            biot,
            absorbed_flux,
            rlw,
            sky,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.biot >= 0.0 && self.biot.is_finite()) {
            return Err(Error::invalid(format!("Biot number must be >= 0, got {}", self.biot)));
        }
        if !(self.rlw >= 0.0 && self.rlw.is_finite()) {
            return Err(Error::invalid(format!(
                "long-wave coefficient must be >= 0, got {}",
                self.rlw
            )));
        }
        Ok(())
    }

    /// Right-hand side of the flux condition at time `t` without the
    /// `Bi·u` term: `Bi·u_amb + αq* − R*(u_b⁴ − u_sky⁴)`.
    pub(crate) fn forcing(&self, t: f64, u_surface: f64) -> f64 {
        let mut g = self.biot * (self.ambient)(t);
        if self.kind == BoundaryKind::RobinRadiative {
            g += (self.absorbed_flux)(t);
            if self.rlw != 0.0 {
                let s = (self.sky)(t);
                g -= self.rlw * (u_surface.powi(4) - s.powi(4));
            }
        }
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// The dimensionless problem `c*(u,x) ∂u/∂t = Fo ∂/∂x (k*(u,x) ∂u/∂x)` on
/// `x ∈ [0, 1]`.
#[derive(Clone)]
pub struct DimensionlessProblem {
    pub medium: Arc<dyn Medium>,
    pub fo: f64,
    pub left: BoundarySpec,
    pub right: BoundarySpec,
    pub initial: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for DimensionlessProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DimensionlessProblem")
            .field("fo", &self.fo)
            .field("left", &self.left)
            .field("right", &self.right)
            .finish_non_exhaustive()
    }
}

impl DimensionlessProblem {
    /// Builds the problem and checks `c* > 0`, `k* > 0` on a sample of
    /// `u ∈ operating_range` across the domain.
    pub fn new(
        medium: Arc<dyn Medium>,
        fo: f64,
        left: BoundarySpec,
        right: BoundarySpec,
        initial: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        operating_range: (f64, f64),
    ) -> Result<Self> {
        if !(fo > 0.0 && fo.is_finite()) {
            return Err(Error::invalid(format!("Fourier number must be positive, got {fo}")));
        }
        left.validate()?;
        right.validate()?;
        let (lo, hi) = operating_range;
        if !(lo <= hi) {
            return Err(Error::invalid("operating range is empty"));
        }
        let mut xs: Vec<f64> = (0..=32).map(|i| i as f64 / 32.0).collect();
        for &s in medium.interfaces() {
            xs.push((s - 1e-9).max(0.0));
            xs.push((s + 1e-9).min(1.0));
        }
        for i in 0..=32 {
            let u = lo + (hi - lo) * i as f64 / 32.0;
            for &x in &xs {
                let (c, k) = (medium.capacity(u, x), medium.conductivity(u, x));
                if !(c > 0.0 && c.is_finite() && k > 0.0 && k.is_finite()) {
                    return Err(Error::invalid(format!(
                        "material properties must be positive: c* = {c}, k* = {k} at u = {u}, x = {x}"
                    )));
                }
            }
        }
        Ok(Self {
            medium,
            fo,
            left,
            right,
            initial,
        })
    }

    pub fn boundary(&self, side: Side) -> &BoundarySpec {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
}
