//! Best-first search over (vertex, path, belief) states ordered by
//! `f = g + ε·ĥ`.
//!
//! A goal is any state whose path uses the whole budget. Children are only
//! queued when their `f` is below the best goal objective found so far, and
//! the best goal is updated when a goal child is queued. The search stops
//! when a goal is popped; the returned objective is then at most `ε` times
//! the optimum.
//!
//! States at the same vertex and time generally carry different beliefs, so
//! there is no closed set. Only the parent link, vertex, depth and `g` of a
//! state are kept; its belief is replayed from the path when the state
//! is expanded.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use crate::domain::{BeliefState, Scenario, VertexId};
use crate::error::{Error, Result};
use crate::heuristic::{heuristic_at, DistanceField};
use crate::objective::{objective_to_come, path_objective, ObjectiveTrace, Path};

/// A node of the search graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchState {
    pub vertex: VertexId,
    pub path: Path,
    /// Belief after the search at step `elapsed`.
    pub belief: BeliefState,
    pub elapsed: usize,
    /// Objective-to-come.
    pub g: f64,
    /// Heuristic objective-to-go.
    pub h: f64,
}

impl SearchState {
    pub fn f(&self, epsilon: f64) -> f64 {
        self.g + epsilon * self.h
    }
}

/// Counters gathered while planning.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlanStats {
    pub expansions: usize,
    pub pushes: usize,
    pub peak_queue: usize,
    pub wall_time: Duration,
    /// Suboptimality factor, for planners that have one.
    pub epsilon: Option<f64>,
}

/// A full-budget searcher path with its objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub path: Path,
    pub objective: f64,
    pub trace: ObjectiveTrace,
    pub stats: PlanStats,
}

impl Plan {
    /// Evaluates `path` from scratch and wraps it as a plan.
    pub fn evaluate(scenario: &Scenario, path: Path, stats: PlanStats) -> Result<Plan> {
        let trace = path_objective(scenario, &path)?;
        Ok(Plan {
            path,
            objective: trace.objective,
            trace,
            stats,
        })
    }
}

/// Hooks into the search loop; used for instrumentation and tests.
pub trait SearchObserver {
    /// Whether full [`SearchState`]s should be materialised for the hooks.
    fn wants_states(&self) -> bool {
        false
    }

    /// A child passed the `f < g_best` test and was queued.
    fn on_push(&mut self, _state: &SearchState, _g_best_before: f64) {}

    /// A child failed the `f < g_best` test.
    fn on_prune(&mut self, _state: &SearchState, _g_best: f64) {}
}

/// Observer that does nothing.
pub struct Silent;

impl SearchObserver for Silent {}

#[derive(Debug, Clone, Copy)]
struct Node {
    parent: u32,
    vertex: u32,
    depth: u32,
    g: f64,
}

const ROOT: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Entry {
    f: f64,
    g: f64,
    seq: u64,
    node: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // BinaryHeap pops the greatest: smallest f, then largest g, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.g.total_cmp(&other.g))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn path_of(arena: &[Node], mut idx: u32) -> Vec<VertexId> {
    let mut out = Vec::with_capacity(arena[idx as usize].depth as usize + 1);
    while idx != ROOT {
        let n = &arena[idx as usize];
        out.push(n.vertex as VertexId);
        idx = n.parent;
    }
    out.reverse();
    out
}

fn replay(scenario: &Scenario, path: &[VertexId]) -> Result<BeliefState> {
    let mut state = scenario.initial_state();
    for (t, &v) in path.iter().enumerate().skip(1) {
        state = scenario.step(&state, v, t)?.0;
    }
    Ok(state)
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon >= 1.0) || !epsilon.is_finite() {
        return Err(Error::Input(format!(
            "suboptimality factor must be finite and >= 1, got {epsilon}"
        )));
    }
    Ok(())
}

/// Plans an ε-suboptimal minimum-MTTD path.
pub fn plan_asar(scenario: &Scenario, epsilon: f64) -> Result<Plan> {
    let distances = DistanceField::new(scenario.grid());
    plan_asar_with(scenario, epsilon, &distances, &mut Silent)
}

/// [`plan_asar`] with a shared distance field and an observer.
pub fn plan_asar_with(
    scenario: &Scenario,
    epsilon: f64,
    distances: &DistanceField,
    observer: &mut impl SearchObserver,
) -> Result<Plan> {
    check_epsilon(epsilon)?;
    let clock = Instant::now();
    let budget = scenario.budget();
    let grid = scenario.grid();
    let start = scenario.start();
    let mut stats = PlanStats {
        epsilon: Some(epsilon),
        ..PlanStats::default()
    };
    if budget == 0 {
        stats.wall_time = clock.elapsed();
        return Plan::evaluate(scenario, Path::new(vec![start]), stats);
    }

    let root_belief = scenario.initial_state();
    let root_h = heuristic_at(scenario, distances, start, 0, &root_belief);
    let mut arena = vec![Node {
        parent: ROOT,
        vertex: start as u32,
        depth: 0,
        g: 0.0,
    }];
    let mut queue = BinaryHeap::new();
    let mut seq = 0u64;
    queue.push(Entry {
        f: epsilon * root_h,
        g: 0.0,
        seq,
        node: 0,
    });
    stats.pushes = 1;
    stats.peak_queue = 1;

    let mut g_best = f64::INFINITY;
    let mut best: Option<u32> = None;
    // beliefs of the children queued by the previous expansion
    let mut recent: Vec<(u32, BeliefState)> = Vec::with_capacity(4);
    let mut fresh: Vec<(u32, BeliefState)> = Vec::with_capacity(4);
    let mut neighbors = Vec::with_capacity(4);

    while let Some(top) = queue.pop() {
        let node = arena[top.node as usize];
        if node.depth as usize >= budget {
            break;
        }
        stats.expansions += 1;
        let belief = match recent.iter().position(|(i, _)| *i == top.node) {
            Some(k) => recent.swap_remove(k).1,
            None => replay(scenario, &path_of(&arena, top.node))?,
        };
        let t_new = node.depth as usize + 1;
        neighbors.clear();
        grid.for_each_neighbor(node.vertex as VertexId, |n| neighbors.push(n));
        fresh.clear();
        for &v in &neighbors {
            let (child, _) = scenario.step(&belief, v, t_new)?;
            let g = objective_to_come(node.g, child.survival());
            let h = if t_new == budget {
                0.0
            } else {
                heuristic_at(scenario, distances, v, t_new, &child)
            };
            let f = g + epsilon * h;
            let materialize = |arena: &[Node], child: &BeliefState| {
                let mut path = path_of(arena, top.node);
                path.push(v);
                SearchState {
                    vertex: v,
                    path: Path::new(path),
                    belief: child.clone(),
                    elapsed: t_new,
                    g,
                    h,
                }
            };
            if f < g_best {
                if observer.wants_states() {
                    observer.on_push(&materialize(&arena, &child), g_best);
                }
                let idx = arena.len() as u32;
                arena.push(Node {
                    parent: top.node,
                    vertex: v as u32,
                    depth: t_new as u32,
                    g,
                });
                seq += 1;
                queue.push(Entry {
                    f,
                    g,
                    seq,
                    node: idx,
                });
                stats.pushes += 1;
                if t_new == budget {
                    if g < g_best {
                        g_best = g;
                        best = Some(idx);
                    }
                } else {
                    fresh.push((idx, child));
                }
            } else if observer.wants_states() {
                observer.on_prune(&materialize(&arena, &child), g_best);
            }
        }
        std::mem::swap(&mut recent, &mut fresh);
        stats.peak_queue = stats.peak_queue.max(queue.len());
    }

    let Some(best) = best else {
        return Err(Error::Infeasible(format!(
            "no {budget}-step walk leaves start cell {start}"
        )));
    };
    stats.wall_time = clock.elapsed();
    let plan = Plan::evaluate(scenario, Path::new(path_of(&arena, best)), stats)?;
    debug_assert!((plan.objective - g_best).abs() < 1e-9);
    Ok(plan)
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
    fn forced_single_move() {
        let grid = Grid::with_blocked(3, 1, &[2]).unwrap();
        let s = stationary(grid, Belief::point(3, 0), 0.5, 0, 1);
        let plan = plan_asar(&s, 1.0).unwrap();
        assert_eq!(plan.path.vertices(), &[0, 1]);
    }

    #[test]
    fn isolated_start_is_infeasible() {
        let grid = Grid::with_blocked(3, 1, &[1]).unwrap();
        let s = stationary(grid, Belief::point(3, 0), 0.5, 0, 2);
        assert!(matches!(plan_asar(&s, 1.0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn epsilon_below_one_rejected() {
        let s = stationary(Grid::new(2, 1).unwrap(), Belief::point(2, 1), 0.5, 0, 1);
        assert!(matches!(plan_asar(&s, 0.99), Err(Error::Input(_))));
        assert!(matches!(plan_asar(&s, f64::NAN), Err(Error::Input(_))));
    }

    #[test]
    fn zero_budget_returns_start() {
        let s = stationary(Grid::new(2, 1).unwrap(), Belief::point(2, 1), 0.5, 0, 0);
        let plan = plan_asar(&s, 1.0).unwrap();
        assert_eq!(plan.path.vertices(), &[0]);
        assert_eq!(plan.objective, 0.0);
    }

    #[test]
    fn goes_straight_for_point_mass() {
        let s = stationary(Grid::new(4, 4).unwrap(), Belief::point(16, 15), 1.0, 0, 6);
        let plan = plan_asar(&s, 1.0).unwrap();
        // six steps to reach the far corner: survival 1 for five steps
        assert!((plan.objective - 5.0).abs() < 1e-12);
        assert_eq!(*plan.path.vertices().last().unwrap(), 15);
    }

    #[test]
    fn queue_order_prefers_low_f_then_deep() {
        let a = Entry { f: 1.0, g: 0.2, seq: 1, node: 0 };
        let b = Entry { f: 1.0, g: 0.5, seq: 2, node: 1 };
        let c = Entry { f: 0.9, g: 0.1, seq: 3, node: 2 };
        let d = Entry { f: 1.0, g: 0.5, seq: 4, node: 3 };
        let mut heap = BinaryHeap::from(vec![a, b, c, d]);
        let order: Vec<u32> = std::iter::from_fn(|| heap.pop().map(|e| e.node)).collect();
        assert_eq!(order, vec![2, 1, 3, 0]);
    }
}
