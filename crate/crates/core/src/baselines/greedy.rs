use std::time::Instant;

use crate::domain::{BeliefWalker, Scenario};
use crate::error::{Error, Result};
use crate::objective::Path;
use crate::planner::{Plan, PlanStats};

/// Myopic walk: every step moves to the neighbour with the largest
/// immediate detection `q(v) * b̄[v]`, lowest id on ties.
pub fn greedy_plan(scenario: &Scenario) -> Result<Plan> {
    let clock = Instant::now();
    let grid = scenario.grid();
    let sensor = scenario.sensor();
    let mut walker = BeliefWalker::new(scenario);
    let mut path = vec![scenario.start()];
    let mut neighbors = Vec::with_capacity(4);
    for _ in 0..scenario.budget() {
        let here = *path.last().expect("non-empty");
        walker.advance()?;
        neighbors.clear();
        grid.for_each_neighbor(here, |n| neighbors.push(n));
        let mut best = None;
        let mut best_val = f64::NEG_INFINITY;
        for &n in &neighbors {
            let val = sensor.q(n) * walker.mass(n);
            let better = match best {
                None => true,
                Some(b) => val > best_val || (val == best_val && n < b),
            };
            if better {
                best = Some(n);
                best_val = val;
            }
        }
        let next = best.ok_or_else(|| {
            Error::Infeasible(format!("cell {here} has no open neighbours"))
        })?;
        walker.observe(next);
        path.push(next);
    }
    let stats = PlanStats {
        wall_time: clock.elapsed(),
        ..PlanStats::default()
    };
    Plan::evaluate(scenario, Path::new(path), stats)
}
