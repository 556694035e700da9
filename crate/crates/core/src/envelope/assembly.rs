use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A homogeneous material with constant properties.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    /// Density, kg/m³.
    pub rho: f64,
    /// Specific heat, J/(kg·K).
    pub cp: f64,
    /// Conductivity, W/(m·K).
    pub k: f64,
}

impl Material {
    pub fn new(name: impl Into<String>, rho: f64, cp: f64, k: f64) -> Result<Self> {
        let m = Self {
            name: name.into(),
            rho,
            cp,
            k,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn brick() -> Self {
        Self::builtin("brick", 1800.0, 840.0, 0.69)
    }

    pub fn concrete() -> Self {
        Self::builtin("concrete", 2200.0, 840.0, 2.0)
    }

    /// Extruded polystyrene.
    pub fn xps() -> Self {
        Self::builtin("xps", 25.0, 1470.0, 0.0275)
    }

    /// Looks up a built-in material by name (case-insensitive).
    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "brick" => Ok(Self::brick()),
            "concrete" => Ok(Self::concrete()),
            "xps" | "extruded_polystyrene" | "extruded polystyrene" => Ok(Self::xps()),
            other => Err(Error::invalid(format!(
                "unknown material '{other}' (built-ins: brick, concrete, xps)"
            ))),
        }
    }

    fn builtin(name: &str, rho: f64, cp: f64, k: f64) -> Self {
        Self {
            name: name.to_string(),
            rho,
            cp,
            k,
        }
    }

    /// Volumetric heat capacity ρ·c_p, J/(m³·K).
    pub fn capacity(&self) -> f64 {
        self.rho * self.cp
    }

    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("density", self.rho),
            ("specific heat", self.cp),
            ("conductivity", self.k),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!(
                    "{} {what} must be positive, got {v}",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    North,
    South,
    East,
    West,
    Roof,
}

impl Orientation {
    pub const ALL: [Orientation; 5] = [
        Orientation::North,
        Orientation::South,
        Orientation::East,
        Orientation::West,
        Orientation::Roof,
    ];
    pub const WALLS: [Orientation; 4] = [
        Orientation::North,
        Orientation::South,
        Orientation::East,
        Orientation::West,
    ];

    /// Column suffix in the climate file.
    pub fn code(self) -> &'static str {
        match self {
            Orientation::North => "N",
            Orientation::South => "S",
            Orientation::East => "E",
            Orientation::West => "W",
            Orientation::Roof => "H",
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Orientation::North => "north",
            Orientation::South => "south",
            Orientation::East => "east",
            Orientation::West => "west",
            Orientation::Roof => "roof",
        };
        f.write_str(s)
    }
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "n" | "north" => Ok(Orientation::North),
            "s" | "south" => Ok(Orientation::South),
            "e" | "east" => Ok(Orientation::East),
            "w" | "west" => Ok(Orientation::West),
            "h" | "roof" => Ok(Orientation::Roof),
            _ => Err(Error::invalid(format!(
                "unknown orientation '{s}' (N, S, E, W or roof)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub material: Material,
    /// Thickness, m.
    pub thickness: f64,
}

/// A wall or roof cross-section. Layers run from the inside surface
/// (x = 0) to the outside surface (x = l).
///
/// Short-wave gains act on the outside surface of every orientation; the
/// long-wave exchange with the sky is applied to roofs only.
#[derive(Debug, Clone, PartialEq)]
pub struct WallAssembly {
    pub layers: Vec<Layer>,
    pub orientation: Orientation,
    pub solar_absorptivity: f64,
    pub emissivity: f64,
    /// W/(m²·K)
    pub h_inside: f64,
    /// W/(m²·K)
    pub h_outside: f64,
}

/// Brick thickness of the wall configurations, m.
pub const BRICK_THICKNESS: f64 = 0.15;
/// Concrete slab thickness of the roof configurations, m.
pub const ROOF_SLAB_THICKNESS: f64 = 0.15;

impl WallAssembly {
    pub fn new(layers: Vec<Layer>, orientation: Orientation) -> Result<Self> {
        let a = Self {
            layers,
            orientation,
            solar_absorptivity: 0.5,
            emissivity: 0.9,
            h_inside: 10.0,
            h_outside: 25.0,
        };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::invalid("assembly has no layers"));
        }
        for (i, layer) in self.layers.iter().enumerate() {
            layer.material.validate()?;
            if !(layer.thickness > 0.0 && layer.thickness.is_finite()) {
                return Err(Error::invalid(format!(
                    "layer {i} ({}) thickness must be positive, got {}",
                    layer.material.name, layer.thickness
                )));
            }
        }
        for (what, v) in [
            ("solar absorptivity", self.solar_absorptivity),
            ("emissivity", self.emissivity),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("{what} must lie in [0, 1], got {v}")));
            }
        }
        for (what, v) in [("inside", self.h_inside), ("outside", self.h_outside)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{what} film coefficient must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }

    /// Air-to-air thermal resistance `1/h_in + Σ l/k + 1/h_out`, m²·K/W.
    pub fn resistance(&self) -> f64 {
        1.0 / self.h_inside + self.layers.iter().map(|l| l.thickness / l.material.k).sum::<f64>() + 1.0 / self.h_outside
    }

    /// Copy with layer `index` resized.
    pub fn with_layer_thickness(&self, index: usize, thickness: f64) -> Result<Self> {
        if index >= self.layers.len() {
            return Err(Error::invalid(format!(
                "layer index {index} out of range for {} layers",
                self.layers.len()
            )));
        }
        let mut a = self.clone();
        a.layers[index].thickness = thickness;
        a.validate()?;
        Ok(a)
    }

    /// Long-wave exchange is only modelled on roofs.
    pub fn has_longwave(&self) -> bool {
        self.orientation == Orientation::Roof && self.emissivity > 0.0
    }
}

/// The standard configurations: bare brick wall, brick insulated inside or
/// outside, and a concrete roof insulated inside or outside.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Configuration {
    Wall1,
    Wall2,
    Wall3,
    RoofInside,
    RoofOutside,
}

impl Configuration {
    /// Builds the assembly. `insulation` is ignored for `Wall1`; roofs
    /// ignore `orientation`.
    pub fn build(self, orientation: Orientation, insulation: f64) -> Result<WallAssembly> {
        let brick = || Layer {
            material: Material::brick(),
            thickness: BRICK_THICKNESS,
        };
        let slab = || Layer {
            material: Material::concrete(),
            thickness: ROOF_SLAB_THICKNESS,
        };
        let xps = || Layer {
            material: Material::xps(),
            thickness: insulation,
        };
        let (layers, orientation) = match self {
            Configuration::Wall1 => (vec![brick()], orientation),
            Configuration::Wall2 => (vec![xps(), brick()], orientation),
            Configuration::Wall3 => (vec![brick(), xps()], orientation),
            Configuration::RoofInside => (vec![xps(), slab()], Orientation::Roof),
            Configuration::RoofOutside => (vec![slab(), xps()], Orientation::Roof),
        };
        if self.is_wall() && orientation == Orientation::Roof {
            return Err(Error::invalid(format!("{self} is a wall configuration, not a roof")));
        }
        WallAssembly::new(layers, orientation)
    }

    /// Index of the insulation layer, if any.
    pub fn insulation_layer(self) -> Option<usize> {
        match self {
            Configuration::Wall1 => None,
            Configuration::Wall2 | Configuration::RoofInside => Some(0),
            Configuration::Wall3 | Configuration::RoofOutside => Some(1),
        }
    }

    pub fn is_wall(self) -> bool {
        matches!(self, Configuration::Wall1 | Configuration::Wall2 | Configuration::Wall3)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Configuration::Wall1 => "wall1",
            Configuration::Wall2 => "wall2",
            Configuration::Wall3 => "wall3",
            Configuration::RoofInside => "roof-inside",
            Configuration::RoofOutside => "roof-outside",
        };
        f.write_str(s)
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "wall1" | "wall-1" => Ok(Configuration::Wall1),
            "wall2" | "wall-2" => Ok(Configuration::Wall2),
            "wall3" | "wall-3" => Ok(Configuration::Wall3),
            "roof-inside" => Ok(Configuration::RoofInside),
            "roof-outside" => Ok(Configuration::RoofOutside),
            _ => Err(Error::invalid(format!(
                "unknown configuration '{s}' (wall1, wall2, wall3, roof-inside, roof-outside)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_properties() {
        let b = Material::brick();
        assert_eq!((b.rho, b.cp, b.k), (1800.0, 840.0, 0.69));
        assert_eq!(b.capacity(), 1_512_000.0);
        assert_eq!(Material::by_name("XPS").unwrap(), Material::xps());
        assert!(Material::by_name("wood").is_err());
        assert!(Material::new("bad", 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn configurations_place_insulation() {
        let w2 = Configuration::Wall2.build(Orientation::South, 0.1).unwrap();
        assert_eq!(w2.layers[0].material, Material::xps());
        assert_eq!(w2.layers[1].thickness, 0.15);
        let w3 = Configuration::Wall3.build(Orientation::South, 0.1).unwrap();
        assert_eq!(w3.layers[1].material, Material::xps());
        assert!((w2.resistance() - w3.resistance()).abs() < 1e-12);
        let r = Configuration::RoofOutside.build(Orientation::North, 0.05).unwrap();
        assert_eq!(r.orientation, Orientation::Roof);
        assert!(r.has_longwave() && !w2.has_longwave());
        assert!(Configuration::Wall1.build(Orientation::Roof, 0.0).is_err());
        assert!(Configuration::Wall2.build(Orientation::South, 0.0).is_err());
    }

    #[test]
    fn wall1_resistance() {
        let w1 = Configuration::Wall1.build(Orientation::South, 0.0).unwrap();
        assert!((w1.resistance() - (0.1 + 0.15 / 0.69 + 0.04)).abs() < 1e-15);
    }

    #[test]
    fn parse_names() {
        assert_eq!("S".parse::<Orientation>().unwrap(), Orientation::South);
        assert_eq!("roof".parse::<Orientation>().unwrap(), Orientation::Roof);
        assert_eq!("wall-2".parse::<Configuration>().unwrap(), Configuration::Wall2);
        assert_eq!(
            "roof_inside".parse::<Configuration>().unwrap(),
            Configuration::RoofInside
        );
        for c in [Configuration::Wall1, Configuration::RoofOutside] {
            assert_eq!(c.to_string().parse::<Configuration>().unwrap(), c);
        }
    }

    #[test]
    fn resize_layer() {
        let w2 = Configuration::Wall2.build(Orientation::East, 0.1).unwrap();
        let t = w2.with_layer_thickness(0, 0.2).unwrap();
        assert_eq!(t.thickness(), 0.35);
        assert!(w2.with_layer_thickness(5, 0.2).is_err());
        assert!(w2.with_layer_thickness(0, -0.1).is_err());
    }
}
