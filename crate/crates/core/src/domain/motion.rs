use crate::domain::{Belief, Grid, ParticleEnsemble, VertexId};
use crate::error::{Error, Result};

/// Row-sum tolerance for stochastic matrices.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Outgoing probabilities of one cell for one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRow {
    /// `(destination, probability)` pairs over grid cells.
    pub to: Vec<(VertexId, f64)>,
    /// Probability of leaving the mapped area.
    pub out: f64,
}

impl TransitionRow {
    pub fn stay(v: VertexId) -> Self {
        TransitionRow {
            to: vec![(v, 1.0)],
            out: 0.0,
        }
    }

    pub fn absorbing_outside() -> Self {
        TransitionRow {
            to: Vec::new(),
            out: 1.0,
        }
    }

    pub fn sum(&self) -> f64 {
        self.to.iter().map(|&(_, p)| p).sum::<f64>() + self.out
    }
}

/// One time step of the target motion: a sparse row-stochastic matrix over
/// the grid cells plus the outside bucket.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    rows: Vec<TransitionRow>,
    outside_row: TransitionRow,
}

impl TransitionMatrix {
    /// Outside mass is absorbing.
    pub fn new(rows: Vec<TransitionRow>) -> Self {
        TransitionMatrix {
            rows,
            outside_row: TransitionRow::absorbing_outside(),
        }
    }

    pub fn with_outside_row(rows: Vec<TransitionRow>, outside_row: TransitionRow) -> Self {
        TransitionMatrix { rows, outside_row }
    }

    pub fn identity(cells: usize) -> Self {
        TransitionMatrix::new((0..cells).map(TransitionRow::stay).collect())
    }

    pub fn rows(&self) -> &[TransitionRow] {
        &self.rows
    }

    pub fn outside_row(&self) -> &TransitionRow {
        &self.outside_row
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if self.rows.len() != grid.len() {
            return Err(Error::invariant(
                "one transition row per cell",
                format!("{} rows for {} cells", self.rows.len(), grid.len()),
            ));
        }
        let rows = self.rows.iter().enumerate().map(|(v, r)| (Some(v), r));
        for (from, row) in rows.chain(std::iter::once((None, &self.outside_row))) {
            let label = from.map_or("outside".to_string(), |v| format!("cell {v}"));
            if from.is_some_and(|v| grid.is_blocked(v)) {
                continue;
            }
            for &(to, p) in &row.to {
                if !(p >= 0.0) {
                    return Err(Error::invariant(
                        "transition probabilities nonnegative",
                        format!("{label} -> {to}: {p}"),
                    ));
                }
                if !grid.contains(to) || (p > 0.0 && grid.is_blocked(to)) {
                    return Err(Error::invariant(
                        "transitions land on open cells",
                        format!("{label} -> {to}"),
                    ));
                }
            }
            if !(row.out >= 0.0) {
                return Err(Error::invariant(
                    "transition probabilities nonnegative",
                    format!("{label} -> outside: {}", row.out),
                ));
            }
            let sum = row.sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::invariant(
                    "transition rows sum to 1",
                    format!("{label} row sums to {sum}"),
                ));
            }
        }
        Ok(())
    }

    /// `b̄[j] = Σ_i P(j | i) b[i]`, written into `out`.
    pub(crate) fn apply_into(&self, belief: &Belief, out: &mut Belief) {
        out.mass.iter_mut().for_each(|m| *m = 0.0);
        out.outside = 0.0;
        for (row, &m) in self.rows.iter().zip(&belief.mass) {
            if m == 0.0 {
                continue;
            }
            for &(to, p) in &row.to {
                out.mass[to] += p * m;
            }
            out.outside += row.out * m;
        }
        if belief.outside != 0.0 {
            for &(to, p) in &self.outside_row.to {
                out.mass[to] += p * belief.outside;
            }
            out.outside += self.outside_row.out * belief.outside;
        }
    }
}

/// Time-indexed transition matrices. A single matrix is time-homogeneous;
/// otherwise step `t` (1-based) uses entry `t - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionModel {
    steps: Vec<TransitionMatrix>,
}

impl TransitionModel {
    pub fn new(steps: Vec<TransitionMatrix>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::Config("transition model without steps".into()));
        }
        Ok(TransitionModel { steps })
    }

    pub fn homogeneous(matrix: TransitionMatrix) -> Self {
        TransitionModel {
            steps: vec![matrix],
        }
    }

    pub fn steps(&self) -> &[TransitionMatrix] {
        &self.steps
    }

    pub fn is_homogeneous(&self) -> bool {
        self.steps.len() == 1
    }

    /// Largest time step the model covers, `None` when unbounded.
    pub fn horizon(&self) -> Option<usize> {
        (!self.is_homogeneous()).then_some(self.steps.len())
    }

    pub fn at(&self, t: usize) -> Result<&TransitionMatrix> {
        if t == 0 {
            return Err(Error::Config("motion is indexed from step 1".into()));
        }
        if self.is_homogeneous() {
            return Ok(&self.steps[0]);
        }
        self.steps.get(t - 1).ok_or_else(|| {
            Error::Config(format!(
                "transition model defines {} steps, step {t} requested",
                self.steps.len()
            ))
        })
    }
}

/// How the target moves between search steps.
#[derive(Debug, Clone, PartialEq)]
pub enum MotionModel {
    /// Stationary target.
    Identity,
    Transition(TransitionModel),
    /// Pre-sampled trajectories; the belief lives on the particles.
    Particles(ParticleEnsemble),
}

impl MotionModel {
    pub fn kind(&self) -> &'static str {
        match self {
            MotionModel::Identity => "identity",
            MotionModel::Transition(_) => "transition",
            MotionModel::Particles(_) => "particles",
        }
    }

    /// Last step the model can be queried at, `None` when unbounded.
    pub fn horizon(&self) -> Option<usize> {
        match self {
            MotionModel::Identity => None,
            MotionModel::Transition(m) => m.horizon(),
            MotionModel::Particles(e) => Some(e.horizon()),
        }
    }
}

/// Motion update: the a priori belief at step `t` from the belief at `t - 1`.
pub fn propagate(belief: &Belief, motion: &MotionModel, t: usize) -> Result<Belief> {
    match motion {
        MotionModel::Identity => Ok(belief.clone()),
        MotionModel::Transition(model) => {
            let matrix = model.at(t)?;
            let mut out = Belief::zeros(belief.len());
            matrix.apply_into(belief, &mut out);
            Ok(out)
        }
        MotionModel::Particles(_) => Err(Error::Config(
            "particle motion advances particle weights, not a cell belief".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(rows: Vec<Vec<(VertexId, f64)>>) -> MotionModel {
        let rows = rows
            .into_iter()
            .map(|to| TransitionRow { to, out: 0.0 })
            .collect();
        MotionModel::Transition(TransitionModel::homogeneous(TransitionMatrix::new(rows)))
    }

    #[test]
    fn identity_keeps_belief() {
        let b = Belief::new(vec![0.2, 0.3, 0.5], 0.0).unwrap();
        assert_eq!(propagate(&b, &MotionModel::Identity, 4).unwrap(), b);
    }

    #[test]
    fn deterministic_shift() {
        let m = chain(vec![vec![(1, 1.0)], vec![(1, 1.0)]]);
        let b = Belief::new(vec![1.0, 0.0], 0.0).unwrap();
        assert_eq!(propagate(&b, &m, 1).unwrap().mass, vec![0.0, 1.0]);
    }

    #[test]
    fn two_state_mixing() {
        let m = chain(vec![vec![(0, 0.5), (1, 0.5)], vec![(1, 1.0)]]);
        let b = Belief::new(vec![0.5, 0.5], 0.0).unwrap();
        // dense product [0.5 0.5] * [[0.5 0.5] [0 1]]
        let dense = [[0.5, 0.5], [0.0, 1.0]];
        let expect: Vec<f64> = (0..2)
            .map(|j| (0..2).map(|i| dense[i][j] * b.mass[i]).sum())
            .collect();
        assert_eq!(expect, vec![0.25, 0.75]);
        assert_eq!(propagate(&b, &m, 1).unwrap().mass, expect);
    }

    #[test]
    fn outside_mass_is_absorbing() {
        let rows = vec![
            TransitionRow {
                to: vec![(0, 0.5)],
                out: 0.5,
            },
            TransitionRow::stay(1),
        ];
        let m = MotionModel::Transition(TransitionModel::homogeneous(TransitionMatrix::new(rows)));
        let b = Belief::new(vec![0.8, 0.0], 0.2).unwrap();
        let after = propagate(&b, &m, 1).unwrap();
        assert_eq!(after.mass, vec![0.4, 0.0]);
        assert!((after.outside - 0.6).abs() < 1e-15);
    }

    #[test]
    fn undefined_step_is_config_error() {
        let grid = Grid::new(2, 1).unwrap();
        let m = TransitionModel::new(vec![
            TransitionMatrix::identity(grid.len()),
            TransitionMatrix::identity(grid.len()),
        ])
        .unwrap();
        let b = Belief::point(2, 0);
        let motion = MotionModel::Transition(m);
        assert!(propagate(&b, &motion, 2).is_ok());
        assert!(matches!(propagate(&b, &motion, 3), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_non_stochastic_rows() {
        let grid = Grid::new(2, 1).unwrap();
        let bad = TransitionMatrix::new(vec![
            TransitionRow {
                to: vec![(0, 0.5), (1, 0.4)],
                out: 0.0,
            },
            TransitionRow::stay(1),
        ]);
        assert!(matches!(
            bad.validate(&grid),
            Err(Error::Invariant {
                invariant: "transition rows sum to 1",
                ..
            })
        ));
    }
}
