//! Truncated mean-time-to-detection objective.
//!
//! For a path σ with `n` steps the objective is `J(σ) = Σ_{t=1..n} P(D > t)`
//! where `P(D > t)` is the total undetected mass (grid plus outside) after
//! the step-`t` search. The start cell is not searched.

use std::fmt;

use crate::domain::{Scenario, VertexId};
use crate::error::{Error, Result};

/// A searcher walk `(v_0, v_1, ..., v_n)`; `n` is its length in steps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(Vec<VertexId>);

impl Path {
    pub fn new(vertices: Vec<VertexId>) -> Self {
        Path(vertices)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn into_vertices(self) -> Vec<VertexId> {
        self.0
    }

    /// Number of edges.
    pub fn steps(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    /// Cell occupied at step `t`.
    pub fn at(&self, t: usize) -> VertexId {
        self.0[t]
    }

    /// Checks start, adjacency and the budget for `scenario`.
    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        let Some(&first) = self.0.first() else {
            return Err(Error::Path("empty vertex sequence".into()));
        };
        if first != scenario.start() {
            return Err(Error::Path(format!(
                "path starts at {first}, scenario starts at {}",
                scenario.start()
            )));
        }
        if self.steps() > scenario.budget() {
            return Err(Error::Path(format!(
                "{} steps exceed the budget of {}",
                self.steps(),
                scenario.budget()
            )));
        }
        let grid = scenario.grid();
        for (k, w) in self.0.windows(2).enumerate() {
            if !grid.are_adjacent(w[0], w[1]) {
                return Err(Error::Path(format!(
                    "step {}: {} -> {} is not an edge",
                    k + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        Ok(())
    }

    fn require_solution(&self, scenario: &Scenario) -> Result<()> {
        self.validate(scenario)?;
        if self.steps() != scenario.budget() {
            return Err(Error::Path(format!(
                "solution paths use the full budget of {}, got {} steps",
                scenario.budget(),
                self.steps()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

impl From<Vec<VertexId>> for Path {
    fn from(v: Vec<VertexId>) -> Self {
        Path(v)
    }
}

/// Per-step survival `P(D > t)` for `t = 1..n`, and their sum `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveTrace {
    pub survival: Vec<f64>,
    pub objective: f64,
}

struct Rollout {
    survival: Vec<f64>,
    detection: Vec<f64>,
}

fn rollout(scenario: &Scenario, path: &Path) -> Result<Rollout> {
    path.validate(scenario)?;
    let n = path.steps();
    let mut survival = Vec::with_capacity(n);
    let mut detection = Vec::with_capacity(n);
    let mut state = scenario.initial_state();
    for t in 1..=n {
        let (next, detected) = scenario.step(&state, path.at(t), t)?;
        state = next;
        survival.push(state.survival());
        detection.push(detected);
    }
    Ok(Rollout {
        survival,
        detection,
    })
}

/// Simulates the belief along `path` and sums the per-step survival.
pub fn path_objective(scenario: &Scenario, path: &Path) -> Result<ObjectiveTrace> {
    let Rollout { survival, .. } = rollout(scenario, path)?;
    let objective = survival.iter().sum();
    Ok(ObjectiveTrace {
        survival,
        objective,
    })
}

/// Probability that a full-budget path detects the target:
/// `1 - P(D > T)`, outside mass included in the undetected part.
pub fn detection_probability(scenario: &Scenario, path: &Path) -> Result<f64> {
    path.require_solution(scenario)?;
    let trace = path_objective(scenario, path)?;
    let last = trace.survival.last().copied().unwrap_or(1.0);
    Ok((1.0 - last).clamp(0.0, 1.0))
}

/// `P(D = t) = q(σ(t)) * b̄(σ(t), t)` for `t = 1..T`.
pub fn detection_time_distribution(scenario: &Scenario, path: &Path) -> Result<Vec<f64>> {
    path.require_solution(scenario)?;
    Ok(rollout(scenario, path)?.detection)
}

/// Objective-to-come of a child state: parent's value plus the child's
/// survival after its search.
#[inline]
pub fn objective_to_come(parent_g: f64, survival_new: f64) -> f64 {
    parent_g + survival_new
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Belief, Grid, MotionModel, SensorModel};

    fn stationary(grid: Grid, prior: Belief, q: f64, start: VertexId, budget: usize) -> Scenario {
        let cells = grid.len();
        Scenario::new(
            grid,
            prior,
            MotionModel::Identity,
            SensorModel::uniform(cells, q).unwrap(),
            start,
            budget,
        )
        .unwrap()
    }

    #[test]
    fn certain_detection_on_first_step() {
        let s = stationary(Grid::new(2, 1).unwrap(), Belief::point(2, 1), 1.0, 0, 1);
        let trace = path_objective(&s, &Path::new(vec![0, 1])).unwrap();
        assert_eq!(trace.survival, vec![0.0]);
        assert_eq!(trace.objective, 0.0);
    }

    #[test]
    fn empty_path_has_zero_objective() {
        let s = stationary(Grid::new(2, 1).unwrap(), Belief::point(2, 1), 1.0, 0, 0);
        let trace = path_objective(&s, &Path::new(vec![0])).unwrap();
        assert!(trace.survival.is_empty());
        assert_eq!(trace.objective, 0.0);
    }

    #[test]
    fn one_by_two_uniform() {
        let prior = Belief::new(vec![0.5, 0.5], 0.0).unwrap();
        let s = stationary(Grid::new(2, 1).unwrap(), prior, 0.78, 0, 1);
        let path = Path::new(vec![0, 1]);
        let trace = path_objective(&s, &path).unwrap();
        assert!((trace.objective - 0.61).abs() < 1e-12);
        assert!((detection_probability(&s, &path).unwrap() - 0.39).abs() < 1e-12);
        let dist = detection_time_distribution(&s, &path).unwrap();
        assert_eq!(dist.len(), 1);
        assert!((dist[0] - 0.39).abs() < 1e-12);
    }

    #[test]
    fn detection_distribution_for_perfect_sensor() {
        // target at cell 3 of a 4x1 strip, reached on step 3
        let s = stationary(Grid::new(4, 1).unwrap(), Belief::point(4, 3), 1.0, 0, 4);
        let path = Path::new(vec![0, 1, 2, 3, 2]);
        assert_eq!(
            detection_time_distribution(&s, &path).unwrap(),
            vec![0.0, 0.0, 1.0, 0.0]
        );
        assert_eq!(detection_probability(&s, &path).unwrap(), 1.0);
    }

    #[test]
    fn blind_and_disjoint_searches_never_detect() {
        let s = stationary(Grid::new(3, 1).unwrap(), Belief::point(3, 2), 0.0, 0, 2);
        let path = Path::new(vec![0, 1, 2]);
        assert_eq!(detection_time_distribution(&s, &path).unwrap(), vec![0.0, 0.0]);
        let s = stationary(Grid::new(3, 1).unwrap(), Belief::point(3, 2), 1.0, 0, 2);
        let path = Path::new(vec![0, 1, 0]);
        assert_eq!(detection_probability(&s, &path).unwrap(), 0.0);
    }

    #[test]
    fn objective_to_come_examples() {
        assert_eq!(objective_to_come(0.0, 1.0), 1.0);
        assert!((objective_to_come(0.61, 0.61) - 1.22).abs() < 1e-12);
        assert_eq!(objective_to_come(2.5, 0.0), 2.5);
    }

    #[test]
    fn rejects_bad_paths() {
        let s = stationary(Grid::new(3, 3).unwrap(), Belief::point(9, 8), 1.0, 0, 2);
        assert!(matches!(
            path_objective(&s, &Path::new(vec![0, 4])),
            Err(Error::Path(_))
        ));
        assert!(matches!(
            path_objective(&s, &Path::new(vec![1, 2])),
            Err(Error::Path(_))
        ));
        assert!(matches!(
            path_objective(&s, &Path::new(vec![0, 1, 2, 5])),
            Err(Error::Path(_))
        ));
        assert!(matches!(
            detection_probability(&s, &Path::new(vec![0, 1])),
            Err(Error::Path(_))
        ));
    }
}
