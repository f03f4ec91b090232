//! Seeded scenario generators used by the benchmarks and the test suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{
    Belief, Grid, MotionModel, Scenario, SensorModel, TransitionMatrix, TransitionModel,
    TransitionRow, VertexId,
};
use crate::error::Result;
use crate::evaluation::{synth_drift, DriftParams};

/// Glimpse probabilities drawn for small scenarios.
pub const SMALL_Q: [f64; 3] = [0.5, 0.78, 1.0];

/// A small random scenario: grid of at most 4x4 (at least two cells),
/// budget 1..=6, random prior on a random support, random local stochastic
/// motion (sometimes time-varying, sometimes leaking outside), uniform
/// glimpse probability from [`SMALL_Q`].
pub fn small_scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = loop {
        let w = rng.gen_range(1..=4);
        let h = rng.gen_range(1..=4);
        if w * h >= 2 {
            break (w, h);
        }
    };
    let grid = Grid::new(w, h).expect("non-empty");
    let cells = grid.len();
    let budget = rng.gen_range(1..=6);
    let start = rng.gen_range(0..cells);
    let q = *SMALL_Q.choose(&mut rng).expect("non-empty");

    let support = rng.gen_range(1..=cells);
    let mut ids: Vec<VertexId> = (0..cells).collect();
    ids.shuffle(&mut rng);
    let mut prior = Belief::zeros(cells);
    for &v in &ids[..support] {
        prior.mass[v] = rng.gen::<f64>() + 0.01;
    }
    let total: f64 = prior.mass.iter().sum();
    prior.mass.iter_mut().for_each(|m| *m /= total);

    let motion = match rng.gen_range(0..4) {
        0 => MotionModel::Identity,
        1 => {
            let steps = (0..budget).map(|_| random_matrix(&grid, &mut rng)).collect();
            MotionModel::Transition(TransitionModel::new(steps).expect("budget >= 1"))
        }
        _ => MotionModel::Transition(TransitionModel::homogeneous(random_matrix(&grid, &mut rng))),
    };
    Scenario::new(
        grid,
        prior,
        motion,
        SensorModel::uniform(cells, q).expect("q in [0, 1]"),
        start,
        budget,
    )
    .expect("generated scenario is valid")
}

/// Random weights over each cell, its neighbours and, for some cells, the
/// outside bucket.
fn random_matrix(grid: &Grid, rng: &mut ChaCha8Rng) -> TransitionMatrix {
    let leaky = rng.gen_bool(0.3);
    let rows = (0..grid.len())
        .map(|v| {
            let mut to = vec![(v, rng.gen::<f64>())];
            grid.for_each_neighbor(v, |n| {
                // sparse rows: drop some moves entirely
                if rng.gen_bool(0.7) {
                    to.push((n, rng.gen::<f64>()));
                }
            });
            let out = if leaky && rng.gen_bool(0.3) { 0.2 * rng.gen::<f64>() } else { 0.0 };
            let total: f64 = to.iter().map(|&(_, p)| p).sum::<f64>() + out;
            to.sort_unstable_by_key(|&(n, _)| n);
            let mut to: Vec<(VertexId, f64)> = to.into_iter().map(|(n, p)| (n, p / total)).collect();
            let out = out / total;
            // push rounding residue onto the first entry so rows sum to 1
            let sum: f64 = to.iter().map(|&(_, p)| p).sum::<f64>() + out;
            to[0].1 += 1.0 - sum;
            TransitionRow { to, out }
        })
        .collect();
    TransitionMatrix::new(rows)
}

/// `count` small scenarios from consecutive seeds.
pub fn small_corpus(seed: u64, count: usize) -> Vec<Scenario> {
    (0..count as u64).map(|k| small_scenario(seed.wrapping_add(k))).collect()
}

/// Settings for synthetic drift scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftCorpusParams {
    pub width: usize,
    pub height: usize,
    pub budget_min: usize,
    pub budget_max: usize,
    pub n_particles: usize,
    pub q: f64,
    /// Drift steps before the search starts, drawn from `lead_min..=lead_max`.
    pub lead_min: usize,
    pub lead_max: usize,
    /// Per-step diffusion, drawn from `diffusion_min..diffusion_max`.
    pub diffusion_min: f64,
    pub diffusion_max: f64,
}

impl Default for DriftCorpusParams {
    fn default() -> Self {
        DriftCorpusParams {
            width: 30,
            height: 30,
            budget_min: 30,
            budget_max: 50,
            n_particles: 400,
            q: 0.78,
            lead_min: 2,
            lead_max: 8,
            diffusion_min: 0.15,
            diffusion_max: 0.35,
        }
    }
}

/// A drift scenario: particles released near the middle of the grid drift
/// for a while before the search starts, and the searcher starts at the
/// release cell.
pub fn drift_scenario(params: &DriftCorpusParams, seed: u64) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = rng.gen_range(params.budget_min..=params.budget_max);
    let lead = rng.gen_range(params.lead_min..=params.lead_max);
    let angle = rng.gen::<f64>() * std::f64::consts::TAU;
    let speed = rng.gen_range(0.05..0.3);
    let (w, h) = (params.width, params.height);
    let x = rng.gen_range(w / 3..=(2 * w) / 3);
    let y = rng.gen_range(h / 3..=(2 * h) / 3);
    let drift = DriftParams {
        width: w,
        height: h,
        release_cell: y * w + x,
        n_particles: params.n_particles,
        advection: (speed * angle.cos(), speed * angle.sin()),
        diffusion: rng.gen_range(params.diffusion_min..params.diffusion_max),
        horizon: lead + budget,
        seed: rng.gen(),
    };
    let ensemble = synth_drift(&drift)?.time_shift(lead)?;
    let grid = drift.grid()?;
    let cells = grid.len();
    Scenario::from_particles(
        grid,
        ensemble,
        SensorModel::uniform(cells, params.q)?,
        drift.release_cell,
        budget,
    )
}

pub fn drift_corpus(params: &DriftCorpusParams, seed: u64, count: usize) -> Result<Vec<Scenario>> {
    (0..count as u64)
        .map(|k| drift_scenario(params, seed.wrapping_add(k)))
        .collect()
}
