use crate::domain::{SensorModel, VertexId};
use crate::error::{Error, Result};

/// Absolute tolerance for probability comparisons.
pub const PROB_TOL: f64 = 1e-9;

/// Undetected-target probability mass per cell, plus the mass that drifted
/// off the mapped area and can no longer be searched.
#[derive(Debug, Clone, PartialEq)]
pub struct Belief {
    pub mass: Vec<f64>,
    pub outside: f64,
}

impl Belief {
    /// Builds a belief and checks entry ranges and the total-mass bound.
    pub fn new(mass: Vec<f64>, outside: f64) -> Result<Self> {
        let b = Belief { mass, outside };
        b.validate()?;
        Ok(b)
    }

    pub fn zeros(cells: usize) -> Self {
        Belief {
            mass: vec![0.0; cells],
            outside: 0.0,
        }
    }

    pub fn uniform_over(cells: usize, support: &[VertexId]) -> Self {
        let mut b = Belief::zeros(cells);
        let share = 1.0 / support.len() as f64;
        for &v in support {
            b.mass[v] = share;
        }
        b
    }

    pub fn point(cells: usize, v: VertexId) -> Self {
        let mut b = Belief::zeros(cells);
        b.mass[v] = 1.0;
        b
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Mass on searchable cells.
    pub fn grid_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Total undetected mass, i.e. P(D > t) when this is the belief at t.
    pub fn total(&self) -> f64 {
        self.grid_mass() + self.outside
    }

    pub fn validate(&self) -> Result<()> {
        for (v, &m) in self.mass.iter().enumerate() {
            if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&m) || m.is_nan() {
                return Err(Error::invariant(
                    "belief entries in [0,1]",
                    format!("cell {v} has mass {m}"),
                ));
            }
        }
        if !(-PROB_TOL..=1.0 + PROB_TOL).contains(&self.outside) {
            return Err(Error::invariant(
                "belief entries in [0,1]",
                format!("outside mass {}", self.outside),
            ));
        }
        let total = self.total();
        if total > 1.0 + PROB_TOL {
            return Err(Error::invariant(
                "belief total at most 1",
                format!("total mass {total}"),
            ));
        }
        Ok(())
    }

    /// Searches `v` once: its mass is scaled by `1 - q(v)`.
    pub fn apply_glimpse(&self, sensor: &SensorModel, v: VertexId) -> Belief {
        let mut out = self.clone();
        out.glimpse_in_place(sensor, v);
        out
    }

    /// In-place glimpse; returns the mass removed, `q(v) * b[v]`.
    #[inline]
    pub fn glimpse_in_place(&mut self, sensor: &SensorModel, v: VertexId) -> f64 {
        let removed = sensor.q(v) * self.mass[v];
        self.mass[v] -= removed;
        removed
    }
}
