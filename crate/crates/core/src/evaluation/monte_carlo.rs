use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{MotionModel, Scenario, TransitionRow, VertexId};
use crate::error::Result;
use crate::objective::{detection_probability, path_objective, Path};

/// Outcome of simulating a path against sampled targets.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub n_trials: usize,
    pub detected_count: usize,
    /// Mean over trials of the number of steps `t` in `1..=T` at which the
    /// target was still undetected. Estimates the planner objective.
    pub empirical_mttd: f64,
    /// Standard error of `empirical_mttd`.
    pub mttd_se: f64,
    pub detected_fraction: f64,
    pub detected_fraction_se: f64,
    /// Analytic objective of the path.
    pub objective: f64,
    /// Analytic probability of detection within the budget.
    pub detection_probability: f64,
}

impl EvalReport {
    /// `|empirical - analytic|` in standard errors for the objective and for
    /// the detected fraction.
    pub fn z_scores(&self) -> (f64, f64) {
        let z = |diff: f64, se: f64| if se > 0.0 { diff.abs() / se } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
        (
            z(self.empirical_mttd - self.objective, self.mttd_se),
            z(self.detected_fraction - self.detection_probability, self.detected_fraction_se),
        )
    }
}

/// Draws target positions at steps `0..=T`; `None` is outside the grid.
pub fn sample_trajectory(scenario: &Scenario, seed: u64) -> Vec<Option<VertexId>> {
    let sampler = Sampler::new(scenario);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(scenario.budget() + 1);
    sampler.draw(&mut rng, &mut out);
    out
}

/// Simulates `path` against `n_trials` sampled targets. Trial `k` draws
/// from stream `k` of a generator seeded with `seed`, so the report does
/// not depend on the order trials are run in.
pub fn monte_carlo_mttd(
    scenario: &Scenario,
    path: &Path,
    n_trials: usize,
    seed: u64,
) -> Result<EvalReport> {
    let trace = path_objective(scenario, path)?;
    let pd = detection_probability(scenario, path)?;
    let sampler = Sampler::new(scenario);
    let sensor = scenario.sensor();
    let budget = scenario.budget();
    let mut target = Vec::with_capacity(budget + 1);

    let mut detected_count = 0usize;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for k in 0..n_trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        target.clear();
        sampler.draw(&mut rng, &mut target);
        let mut undetected_steps = budget;
        for t in 1..=budget {
            let v = path.at(t);
            if target[t] == Some(v) {
                let q = sensor.q(v);
                // one draw per co-located step keeps q=0 and q=1 exact
                if rng.gen::<f64>() < q {
                    undetected_steps = t - 1;
                    detected_count += 1;
                    break;
                }
            }
        }
        let x = undetected_steps as f64;
        sum += x;
        sum_sq += x * x;
    }

    let n = n_trials.max(1) as f64;
    let mean = sum / n;
    let var = if n_trials > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let frac = detected_count as f64 / n;
    let frac_var = if n_trials > 1 { frac * (1.0 - frac) * n / (n - 1.0) } else { 0.0 };
    Ok(EvalReport {
        n_trials,
        detected_count,
        empirical_mttd: mean,
        mttd_se: (var / n).sqrt(),
        detected_fraction: frac,
        detected_fraction_se: (frac_var / n).sqrt(),
        objective: trace.objective,
        detection_probability: pd,
    })
}

/// Ground-truth sampler for a scenario.
struct Sampler<'a> {
    scenario: &'a Scenario,
    /// Cumulative prior over cells, then the outside bucket last.
    prior_cdf: Vec<f64>,
}

impl<'a> Sampler<'a> {
    fn new(scenario: &'a Scenario) -> Self {
        let weights: Vec<f64> = match scenario.motion() {
            MotionModel::Particles(e) => e.pnd().to_vec(),
            _ => {
                let p = scenario.prior();
                p.mass.iter().copied().chain([p.outside]).collect()
            }
        };
        let mut acc = 0.0;
        let prior_cdf = weights
            .into_iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Sampler {
            scenario,
            prior_cdf,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, out: &mut Vec<Option<VertexId>>) {
        let budget = self.scenario.budget();
        let k = pick_cdf(&self.prior_cdf, rng.gen::<f64>());
        match self.scenario.motion() {
            MotionModel::Particles(e) => {
                out.extend((0..=budget).map(|t| e.position(k, t)));
            }
            MotionModel::Identity => {
                let cell = (k < self.scenario.grid().len()).then_some(k);
                out.extend(std::iter::repeat(cell).take(budget + 1));
            }
            MotionModel::Transition(model) => {
                let mut cell = (k < self.scenario.grid().len()).then_some(k);
                out.push(cell);
                for t in 1..=budget {
                    let m = model.at(t).expect("validated horizon");
                    let row = match cell {
                        Some(v) => &m.rows()[v],
                        None => m.outside_row(),
                    };
                    cell = pick_row(row, rng.gen::<f64>());
                    out.push(cell);
                }
            }
        }
    }
}

/// Index of the first cumulative weight above `u * total`.
fn pick_cdf(cdf: &[f64], u: f64) -> usize {
    let total = *cdf.last().expect("non-empty");
    let x = u * total;
    let mut i = cdf.partition_point(|&c| c <= x);
    if i == cdf.len() {
        // rounding put x at the very top; take the last entry with weight
        i -= 1;
        while i > 0 && cdf[i] == cdf[i - 1] {
            i -= 1;
        }
    }
    i
}

fn pick_row(row: &TransitionRow, u: f64) -> Option<VertexId> {
    let mut x = u * row.sum();
    let mut last = None;
    for &(v, p) in &row.to {
        if p <= 0.0 {
            continue;
        }
        if x < p {
            return Some(v);
        }
        x -= p;
        last = Some(v);
    }
    if row.out > 0.0 {
        None
    } else {
        last
    }
}
