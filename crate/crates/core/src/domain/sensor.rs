use crate::domain::VertexId;
use crate::error::{Error, Result};

/// Per-cell glimpse probability `q(v)`: the chance one visit detects a
/// target that is present. No false positives; visits are independent.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorModel {
    glimpse: Vec<f64>,
}

impl SensorModel {
    pub fn new(glimpse: Vec<f64>) -> Result<Self> {
        for (v, &q) in glimpse.iter().enumerate() {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::invariant(
                    "glimpse probability in [0,1]",
                    format!("q({v}) = {q}"),
                ));
            }
        }
        Ok(SensorModel { glimpse })
    }

    pub fn uniform(cells: usize, q: f64) -> Result<Self> {
        SensorModel::new(vec![q; cells])
    }

    #[inline]
    pub fn q(&self, v: VertexId) -> f64 {
        self.glimpse[v]
    }

    pub fn len(&self) -> usize {
        self.glimpse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.glimpse.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.glimpse
    }

    /// The common value when every cell shares one glimpse probability.
    pub fn uniform_value(&self) -> Option<f64> {
        let first = *self.glimpse.first()?;
        self.glimpse.iter().all(|&q| q == first).then_some(first)
    }
}
