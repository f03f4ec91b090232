use std::time::Instant;

use crate::domain::{BeliefState, Scenario, VertexId};
use crate::error::{Error, Result};
use crate::heuristic::{heuristic_at, DistanceField};
use crate::objective::Path;
use crate::planner::{Plan, PlanStats};

/// Default limit on the number of full-budget walks the oracle enumerates.
pub const DEFAULT_WALK_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub cap: u128,
    /// Abandon prefixes whose `g + ĥ` cannot beat the incumbent. Exact only
    /// while `ĥ` never overestimates, so it is off by default.
    pub prune: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            cap: DEFAULT_WALK_CAP,
            prune: false,
        }
    }
}

/// Number of walks with `steps` edges leaving `from` (saturating).
pub fn count_walks(scenario: &Scenario, from: VertexId, steps: usize) -> u128 {
    let grid = scenario.grid();
    let mut ways = vec![0u128; grid.len()];
    ways[from] = 1;
    for _ in 0..steps {
        let mut next = vec![0u128; grid.len()];
        for v in (0..grid.len()).filter(|&v| ways[v] > 0) {
            grid.for_each_neighbor(v, |n| next[n] = next[n].saturating_add(ways[v]));
        }
        ways = next;
    }
    ways.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

/// Exact optimum by exhaustive enumeration of every full-budget walk.
/// Among equal objectives the lexicographically smallest walk wins.
pub fn brute_force_optimal(scenario: &Scenario) -> Result<Plan> {
    brute_force_with(scenario, OracleOptions::default())
}

pub fn brute_force_with(scenario: &Scenario, options: OracleOptions) -> Result<Plan> {
    let clock = Instant::now();
    let prefix = vec![scenario.start()];
    let found = optimal_completion(scenario, &prefix, options)?;
    let Some(completion) = found else {
        return Err(Error::Infeasible(format!(
            "no {}-step walk leaves start cell {}",
            scenario.budget(),
            scenario.start()
        )));
    };
    let stats = PlanStats {
        expansions: completion.visited,
        pushes: completion.leaves,
        peak_queue: scenario.budget() + 1,
        wall_time: clock.elapsed(),
        epsilon: Some(1.0),
    };
    Plan::evaluate(scenario, completion.path, stats)
}

/// Best continuation of a fixed prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct Completion {
    /// Full path, prefix included.
    pub path: Path,
    /// Objective accrued after the prefix (the optimal objective-to-go).
    pub cost_to_go: f64,
    /// Objective of the prefix itself.
    pub cost_to_come: f64,
    pub visited: usize,
    pub leaves: usize,
}

/// Exhaustively completes `prefix` (which must start at the scenario start)
/// to the full budget. Returns `None` when no completion exists.
pub fn optimal_completion(
    scenario: &Scenario,
    prefix: &[VertexId],
    options: OracleOptions,
) -> Result<Option<Completion>> {
    Path::new(prefix.to_vec()).validate(scenario)?;
    let depth = prefix.len() - 1;
    let remaining = scenario.budget() - depth;
    let last = *prefix.last().expect("validated path is non-empty");
    let walks = count_walks(scenario, last, remaining);
    if walks > options.cap {
        return Err(Error::Size {
            walks,
            cap: options.cap,
        });
    }

    let mut state = scenario.initial_state();
    let mut g = 0.0;
    for (t, &v) in prefix.iter().enumerate().skip(1) {
        state = scenario.step(&state, v, t)?.0;
        g += state.survival();
    }

    let mut search = Dfs {
        scenario,
        distances: options.prune.then(|| DistanceField::new(scenario.grid())),
        path: prefix.to_vec(),
        best_path: None,
        best: f64::INFINITY,
        visited: 0,
        leaves: 0,
    };
    search.descend(&state, g)?;
    Ok(search.best_path.map(|path| Completion {
        path: Path::new(path),
        cost_to_go: search.best - g,
        cost_to_come: g,
        visited: search.visited,
        leaves: search.leaves,
    }))
}

struct Dfs<'a> {
    scenario: &'a Scenario,
    distances: Option<DistanceField>,
    path: Vec<VertexId>,
    best_path: Option<Vec<VertexId>>,
    best: f64,
    visited: usize,
    leaves: usize,
}

impl Dfs<'_> {
    fn descend(&mut self, state: &BeliefState, g: f64) -> Result<()> {
        self.visited += 1;
        let depth = self.path.len() - 1;
        let v = *self.path.last().expect("non-empty");
        if depth == self.scenario.budget() {
            self.leaves += 1;
            if g < self.best {
                self.best = g;
                self.best_path = Some(self.path.clone());
            }
            return Ok(());
        }
        if let Some(distances) = &self.distances {
            let h = heuristic_at(self.scenario, distances, v, depth, state);
            if g + h >= self.best {
                return Ok(());
            }
        }
        let mut next = Vec::with_capacity(4);
        self.scenario.grid().for_each_neighbor(v, |n| next.push(n));
        next.sort_unstable();
        let t = depth + 1;
        for n in next {
            let (child, _) = self.scenario.step(state, n, t)?;
            let g_child = g + child.survival();
            self.path.push(n);
            self.descend(&child, g_child)?;
            self.path.pop();
        }
        Ok(())
    }
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
    fn one_by_two_has_a_single_candidate() {
        let s = stationary(
            Grid::new(2, 1).unwrap(),
            Belief::new(vec![0.5, 0.5], 0.0).unwrap(),
            0.78,
            0,
            1,
        );
        let plan = brute_force_optimal(&s).unwrap();
        assert_eq!(plan.path.vertices(), &[0, 1]);
        assert!((plan.objective - 0.61).abs() < 1e-12);
    }

    #[test]
    fn zero_budget() {
        let s = stationary(Grid::new(2, 1).unwrap(), Belief::point(2, 1), 0.78, 0, 0);
        let plan = brute_force_optimal(&s).unwrap();
        assert_eq!(plan.path.vertices(), &[0]);
        assert_eq!(plan.objective, 0.0);
    }

    #[test]
    fn geodesic_to_point_mass() {
        // 2x2, mass on the diagonal cell 3, two steps away from 0
        let s = stationary(Grid::new(2, 2).unwrap(), Belief::point(4, 3), 1.0, 0, 2);
        let plan = brute_force_optimal(&s).unwrap();
        assert_eq!(plan.path.vertices(), &[0, 1, 3]);
        assert_eq!(plan.objective, 1.0);
    }

    #[test]
    fn walk_count_and_cap() {
        let s = stationary(Grid::new(3, 3).unwrap(), Belief::point(9, 0), 1.0, 4, 3);
        // center: 4 moves, each to an edge cell with 3 moves, ...
        assert_eq!(count_walks(&s, 4, 1), 4);
        assert_eq!(count_walks(&s, 4, 2), 12);
        let err = brute_force_with(
            &s,
            OracleOptions {
                cap: 10,
                prune: true,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Size { .. }));
    }
}
