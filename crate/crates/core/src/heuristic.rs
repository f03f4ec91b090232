//! Lower bound on the objective-to-go.
//!
//! The bound solves a relaxed problem: at the `k`-th remaining step the
//! searcher may look at any cell within `k` hops of its current cell,
//! ignoring path continuity. The relaxed schedule is built greedily, picking
//! at each step the reachable cell with the largest immediate detection
//! `q(v) * b̄[v]` (lowest id on ties), and the bound is the sum of the
//! resulting survival masses.

use std::collections::VecDeque;
use std::sync::OnceLock;

use crate::domain::{
    BeliefState, Grid, MotionModel, ParticleEnsemble, Scenario, SensorModel, TransitionModel,
    VertexId,
};
use crate::domain::Belief;
use crate::error::Result;
use crate::planner::SearchState;

pub const UNREACHABLE: u32 = u32::MAX;

/// Hop distances from one source cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceRow {
    source: VertexId,
    dist: Vec<u32>,
    /// Reachable cells in BFS order (nondecreasing distance).
    order: Vec<VertexId>,
    /// `ring_end[k]` = number of cells at distance `<= k`.
    ring_end: Vec<usize>,
}

impl DistanceRow {
    pub fn source(&self) -> VertexId {
        self.source
    }

    /// Hop count to `v`, `None` when unreachable.
    pub fn get(&self, v: VertexId) -> Option<usize> {
        match self.dist[v] {
            UNREACHABLE => None,
            d => Some(d as usize),
        }
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.dist
    }

    /// Cells reachable within `k` hops.
    pub fn within(&self, k: usize) -> &[VertexId] {
        let end = self.ring_end[k.min(self.ring_end.len() - 1)];
        &self.order[..end]
    }
}

/// Breadth-first hop distances from `source` over open cells.
pub fn bfs_distances(grid: &Grid, source: VertexId) -> Result<DistanceRow> {
    grid.check_open(source)?;
    let mut dist = vec![UNREACHABLE; grid.len()];
    let mut order = Vec::new();
    let mut ring_end = Vec::new();
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v] as usize;
        if ring_end.len() <= d {
            ring_end.push(order.len());
        }
        order.push(v);
        ring_end[d] = order.len();
        grid.for_each_neighbor(v, |n| {
            if dist[n] == UNREACHABLE {
                dist[n] = dist[v] + 1;
                queue.push_back(n);
            }
        });
    }
    Ok(DistanceRow {
        source,
        dist,
        order,
        ring_end,
    })
}

/// All-pairs hop distances, computed per source on first use and shared
/// between threads afterwards.
#[derive(Debug)]
pub struct DistanceField {
    grid: Grid,
    rows: Vec<OnceLock<DistanceRow>>,
}

impl DistanceField {
    pub fn new(grid: &Grid) -> Self {
        DistanceField {
            grid: grid.clone(),
            rows: (0..grid.len()).map(|_| OnceLock::new()).collect(),
        }
    }

    /// Distances from `source`; `source` must be an open cell.
    pub fn row(&self, source: VertexId) -> &DistanceRow {
        self.rows[source].get_or_init(|| {
            bfs_distances(&self.grid, source).expect("distance row requested for a blocked cell")
        })
    }

    pub fn distance(&self, from: VertexId, to: VertexId) -> Option<usize> {
        self.row(from).get(to)
    }
}

/// Heuristic value of a search state.
pub fn heuristic(state: &SearchState, scenario: &Scenario, distances: &DistanceField) -> f64 {
    heuristic_at(
        scenario,
        distances,
        state.vertex,
        state.elapsed,
        &state.belief,
    )
}

/// Heuristic for a searcher on `vertex` after `elapsed` steps holding
/// `belief` (the belief after the search at step `elapsed`).
pub fn heuristic_at(
    scenario: &Scenario,
    distances: &DistanceField,
    vertex: VertexId,
    elapsed: usize,
    belief: &BeliefState,
) -> f64 {
    if elapsed >= scenario.budget() {
        return 0.0;
    }
    let row = distances.row(vertex);
    match (belief, scenario.motion()) {
        (BeliefState::Particles(w), MotionModel::Particles(e)) => {
            particle_bound(scenario, e, row, elapsed, w)
        }
        (BeliefState::Cells(b), MotionModel::Transition(m)) => {
            cell_bound(Some(m), scenario.sensor(), row, elapsed, scenario.budget(), b)
        }
        (BeliefState::Cells(b), _) => {
            cell_bound(None, scenario.sensor(), row, elapsed, scenario.budget(), b)
        }
        (BeliefState::Particles(_), _) => 0.0,
    }
}

fn cell_bound(
    motion: Option<&TransitionModel>,
    sensor: &SensorModel,
    row: &DistanceRow,
    elapsed: usize,
    budget: usize,
    belief: &Belief,
) -> f64 {
    let mut work = belief.clone();
    let mut scratch = Belief::zeros(belief.len());
    let mut total = work.total();
    let mut h = 0.0;
    for t in elapsed + 1..=budget {
        if let Some(model) = motion {
            // a missing step was rejected when the scenario was validated
            let matrix = model.at(t).expect("motion covers the budget");
            matrix.apply_into(&work, &mut scratch);
            std::mem::swap(&mut work, &mut scratch);
        }
        let mut best = usize::MAX;
        let mut best_val = -1.0;
        for &v in row.within(t - elapsed) {
            let val = sensor.q(v) * work.mass[v];
            if val > best_val || (val == best_val && v < best) {
                best_val = val;
                best = v;
            }
        }
        if best != usize::MAX {
            total -= work.glimpse_in_place(sensor, best);
        }
        h += total.max(0.0);
    }
    h
}

fn particle_bound(
    scenario: &Scenario,
    ensemble: &ParticleEnsemble,
    row: &DistanceRow,
    elapsed: usize,
    weights: &[f64],
) -> f64 {
    let sensor = scenario.sensor();
    let mut work = weights.to_vec();
    let mut total: f64 = work.iter().sum();
    let reach = row.as_slice();
    // the sorted scan below stops early using bounds computed from the
    // ensemble's own weights, valid while no weight exceeds them
    let bounded = work.iter().zip(ensemble.pnd()).all(|(w, p)| w <= p);
    let mut h = 0.0;
    for t in elapsed + 1..=scenario.budget() {
        let k = (t - elapsed) as u32;
        let mut best: Option<(u32, u32)> = None;
        let mut best_val = 0.0;
        let order = scenario.detection_order(t).filter(|_| bounded);
        if let Some(order) = order {
            for c in order {
                if c.bound < best_val || c.bound == 0.0 {
                    break;
                }
                if reach[c.cell as usize] > k {
                    continue;
                }
                let mass: f64 = ensemble
                    .slot_members(t, c.slot)
                    .iter()
                    .map(|&p| work[p as usize])
                    .sum();
                let val = sensor.q(c.cell as usize) * mass;
                let better = match best {
                    None => val > best_val,
                    Some((b, _)) => val > best_val || (val == best_val && c.cell < b),
                };
                if better {
                    best_val = val;
                    best = Some((c.cell, c.slot));
                }
            }
        } else {
            // occupied cells come in ascending order, so strict `>` keeps
            // the lowest id among ties
            for (slot, (c, members)) in ensemble.occupied(t).enumerate() {
                if reach[c] > k {
                    continue;
                }
                let mass: f64 = members.iter().map(|&p| work[p as usize]).sum();
                let val = sensor.q(c) * mass;
                if val > best_val {
                    best_val = val;
                    best = Some((c as u32, slot as u32));
                }
            }
        }
        if let Some((c, slot)) = best {
            let q = sensor.q(c as usize);
            for &p in ensemble.slot_members(t, slot) {
                let w = &mut work[p as usize];
                let r = q * *w;
                *w -= r;
                total -= r;
            }
        }
        h += total.max(0.0);
    }
    h
}
