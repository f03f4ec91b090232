//! Simplified max-min ant colony planner.
//!
//! Pheromone lives on (step, cell) pairs. Each ant builds a full-budget
//! walk from the start, choosing among the open neighbours with weights
//! `τ[t][v]^α · (η + η₀)^β`, where `η = q(v)·b̄[v]` is the immediate
//! detection under the ant's own belief. After every generation all trails
//! evaporate and the best walk found so far deposits on its nodes; trails
//! are clamped to `[τ_min, τ_max]`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{BeliefWalker, Scenario, VertexId};
use crate::error::{Error, Result};
use crate::objective::Path;
use crate::planner::{Plan, PlanStats};

/// Floor on the heuristic desirability so cells without mass stay possible.
const ETA_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct AcoParams {
    pub ants_per_generation: usize,
    pub generations: usize,
    /// Fraction of pheromone lost per generation, in (0, 1).
    pub evaporation: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    /// Exponent on the immediate-detection desirability.
    pub heuristic_weight: f64,
    /// Exponent on the pheromone trail.
    pub pheromone_weight: f64,
    pub seed: u64,
}

impl Default for AcoParams {
    fn default() -> Self {
        AcoParams {
            ants_per_generation: 10,
            generations: 200,
            evaporation: 0.1,
            tau_min: 0.01,
            tau_max: 1.0,
            heuristic_weight: 2.0,
            pheromone_weight: 1.0,
            seed: 0,
        }
    }
}

impl AcoParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Input(format!("invalid ACO parameters: {what}")));
        if self.ants_per_generation == 0 {
            return bad("at least one ant per generation");
        }
        if self.generations == 0 {
            return bad("at least one generation");
        }
        if !(self.evaporation > 0.0 && self.evaporation < 1.0) {
            return bad("evaporation must lie in (0, 1)");
        }
        if !(self.tau_min > 0.0 && self.tau_min < self.tau_max && self.tau_max.is_finite()) {
            return bad("need 0 < tau_min < tau_max");
        }
        if !(self.heuristic_weight >= 0.0 && self.pheromone_weight >= 0.0) {
            return bad("exponents must be nonnegative");
        }
        Ok(())
    }
}

/// Best plan of one ACO run and the best-so-far objective after each
/// generation.
#[derive(Debug, Clone, PartialEq)]
pub struct AcoResult {
    pub plan: Plan,
    pub trace: Vec<f64>,
}

pub fn aco_plan(scenario: &Scenario, params: &AcoParams) -> Result<AcoResult> {
    params.validate()?;
    let clock = Instant::now();
    let budget = scenario.budget();
    let grid = scenario.grid();
    let sensor = scenario.sensor();
    let cells = grid.len();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut tau = vec![params.tau_max; budget * cells];

    let mut walker = BeliefWalker::new(scenario);
    let mut best_path: Option<Vec<VertexId>> = None;
    let mut best_j = f64::INFINITY;
    let mut trace = Vec::with_capacity(params.generations);
    let mut path = Vec::with_capacity(budget + 1);
    let mut candidates: Vec<(VertexId, f64)> = Vec::with_capacity(4);
    let mut ants = 0usize;

    for _ in 0..params.generations {
        for _ in 0..params.ants_per_generation {
            ants += 1;
            walker.reset();
            path.clear();
            path.push(scenario.start());
            let mut j = 0.0;
            for t in 1..=budget {
                let here = *path.last().expect("non-empty");
                walker.advance()?;
                candidates.clear();
                let mut total = 0.0;
                grid.for_each_neighbor(here, |n| {
                    let eta = sensor.q(n) * walker.mass(n) + ETA_FLOOR;
                    let w = tau[(t - 1) * cells + n].powf(params.pheromone_weight)
                        * eta.powf(params.heuristic_weight);
                    total += w;
                    candidates.push((n, w));
                });
                let Some(&(fallback, _)) = candidates.last() else {
                    return Err(Error::Infeasible(format!(
                        "cell {here} has no open neighbours"
                    )));
                };
                let mut pick = rng.gen::<f64>() * total;
                let mut next = fallback;
                for &(n, w) in &candidates {
                    if pick < w {
                        next = n;
                        break;
                    }
                    pick -= w;
                }
                j += walker.observe(next);
                path.push(next);
            }
            if j < best_j {
                best_j = j;
                best_path = Some(path.clone());
            }
        }
        for x in tau.iter_mut() {
            *x *= 1.0 - params.evaporation;
        }
        if let Some(best) = &best_path {
            let deposit = params.evaporation * params.tau_max;
            for (t, &v) in best.iter().enumerate().skip(1) {
                tau[(t - 1) * cells + v] += deposit;
            }
        }
        for x in tau.iter_mut() {
            *x = x.clamp(params.tau_min, params.tau_max);
        }
        trace.push(best_j);
    }

    let path = best_path.unwrap_or_else(|| vec![scenario.start()]);
    let stats = PlanStats {
        expansions: ants,
        wall_time: clock.elapsed(),
        ..PlanStats::default()
    };
    let plan = Plan::evaluate(scenario, Path::new(path), stats)?;
    Ok(AcoResult { plan, trace })
}

/// Independent runs; run `k` is seeded with `params.seed + k`.
pub fn aco_trials(scenario: &Scenario, params: &AcoParams, trials: usize) -> Result<Vec<AcoResult>> {
    (0..trials as u64)
        .map(|k| {
            let p = AcoParams {
                seed: params.seed.wrapping_add(k),
                ..params.clone()
            };
            aco_plan(scenario, &p)
        })
        .collect()
}

/// Median best-so-far objective per generation across runs.
pub fn median_trace(runs: &[AcoResult]) -> Vec<f64> {
    let Some(len) = runs.iter().map(|r| r.trace.len()).min() else {
        return Vec::new();
    };
    (0..len)
        .map(|g| median(runs.iter().map(|r| r.trace[g]).collect()))
        .collect()
}

pub(crate) fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}
