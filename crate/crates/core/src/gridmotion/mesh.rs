use std::io::Write;

use crate::error::{Error, Result};

/// Smallest number of intervals a mesh may have.
pub const MIN_INTERVALS: usize = 4;

/// Node positions `x_0 < x_1 < … < x_N` of a moving mesh on `[0, l]`.
///
/// Node `j` is the image of the reference point `q_j = j/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct MovingMesh {
    nodes: Vec<f64>,
}

impl MovingMesh {
    /// Validates and wraps a node vector. The first node must be exactly 0.
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < MIN_INTERVALS + 1 {
            return Err(Error::TooFewNodes {
                nodes: nodes.len(),
                min: MIN_INTERVALS + 1,
            });
        }
        if nodes[0] != 0.0 {
            return Err(Error::invalid(format!("first mesh node must be 0, got {}", nodes[0])));
        }
        check_ordering(&nodes)?;
        Ok(Self { nodes })
    }

    pub fn uniform(intervals: usize, length: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::invalid(format!("domain length must be positive, got {length}")));
        }
        if intervals < MIN_INTERVALS {
            return Err(Error::TooFewNodes {
                nodes: intervals + 1,
                min: MIN_INTERVALS + 1,
            });
        }
        let nodes = (0..=intervals).map(|j| length * j as f64 / intervals as f64).collect();
        Ok(Self { nodes })
    }

    /// Wraps nodes already known to be valid, pinning both ends.
    pub(crate) fn from_solved(mut nodes: Vec<f64>, length: f64) -> std::result::Result<Self, usize> {
        let n = nodes.len() - 1;
        nodes[0] = 0.0;
        nodes[n] = length;
        for j in 0..n {
            if !(nodes[j + 1] > nodes[j]) {
                return Err(j);
            }
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn into_nodes(self) -> Vec<f64> {
        self.nodes
    }

    /// Number of intervals `N`.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Reference spacing `h = 1/N`.
    pub fn reference_spacing(&self) -> f64 {
        1.0 / self.intervals() as f64
    }

    pub fn length(&self) -> f64 {
        self.nodes[self.intervals()]
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.windows(2).map(|p| p[1] - p[0])
    }

    pub fn midpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.windows(2).map(|p| 0.5 * (p[0] + p[1]))
    }

    /// True when every interval has the same width to within `tol` relative.
    pub fn is_uniform(&self, tol: f64) -> bool {
        let h = self.length() / self.intervals() as f64;
        self.widths().all(|w| (w - h).abs() <= tol * h)
    }

    /// Discrete Jacobian `∂x/∂q` on intervals and nodes.
    pub fn jacobian(&self) -> Jacobian {
        let n = self.intervals();
        let inv_h = n as f64;
        let interval: Vec<f64> = self.widths().map(|w| w * inv_h).collect();
        let mut nodal = Vec::with_capacity(n + 1);
        nodal.push(interval[0]);
        for j in 1..n {
            nodal.push(0.5 * (self.nodes[j + 1] - self.nodes[j - 1]) * inv_h);
        }
        nodal.push(interval[n - 1]);
        Jacobian { interval, nodal }
    }

    /// The same mesh stretched by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.nodes.iter().map(|x| x * factor).collect())
    }

    /// Reflection `x ↦ l − x`, reindexed so nodes stay increasing.
    pub fn mirrored(&self) -> Self {
        let l = self.length();
        let nodes = self.nodes.iter().rev().map(|x| l - x).collect();
        Self { nodes }
    }

    /// Index of the interval containing `x` (clamped to the domain).
    pub fn locate(&self, x: f64) -> usize {
        let n = self.intervals();
        match self.nodes.partition_point(|&p| p <= x) {
            0 => 0,
            k if k > n => n - 1,
            k => k - 1,
        }
    }
}

fn check_ordering(nodes: &[f64]) -> Result<()> {
    for (j, p) in nodes.windows(2).enumerate() {
        if !p[0].is_finite() || !p[1].is_finite() {
            return Err(Error::NonFinite(format!("mesh node near index {j}")));
        }
        if !(p[1] > p[0]) {
            return Err(Error::NodeOrdering {
                index: j,
                left: p[0],
                right: p[1],
            });
        }
    }
    Ok(())
}

/// Jacobian values: `J_{j+½} = (x_{j+1} − x_j)/h` on intervals and
/// `J_j = (x_{j+1} − x_{j−1})/(2h)` on interior nodes, one-sided at the ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Jacobian {
    pub interval: Vec<f64>,
    pub nodal: Vec<f64>,
}

/// Node paths over time, written as `step,t,x_0,…,x_N`.
#[derive(Debug, Clone, Default)]
pub struct MeshTrajectory {
    pub rows: Vec<(usize, f64, Vec<f64>)>,
}

impl MeshTrajectory {
    pub fn push(&mut self, step: usize, t: f64, mesh: &MovingMesh) {
        self.rows.push((step, t, mesh.nodes().to_vec()));
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let width = self.rows.first().map_or(0, |r| r.2.len());
        let mut header = vec!["step".to_string(), "t".to_string()];
        header.extend((0..width).map(|j| format!("x_{j}")));
        w.write_record(&header)?;
        for (step, t, nodes) in &self.rows {
            let mut rec = vec![step.to_string(), t.to_string()];
            rec.extend(nodes.iter().map(|x| x.to_string()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}
