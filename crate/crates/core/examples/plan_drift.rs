//! Plan a search for a drifting target with the ε-weighted planner.
//!
//! `cargo run --release --example plan_drift -- [epsilon] [seed]`

use sarplan::baselines::greedy_plan;
use sarplan::evaluation::{synth_drift, DriftParams};
use sarplan::{plan_asar, Scenario, SensorModel};

fn main() -> sarplan::Result<()> {
    let mut args = std::env::args().skip(1);
    let epsilon: f64 = args.next().map_or(1.1, |a| a.parse().expect("epsilon"));
    let seed: u64 = args.next().map_or(3, |a| a.parse().expect("seed"));

    let params = DriftParams {
        width: 30,
        height: 30,
        release_cell: 15 * 30 + 15,
        n_particles: 400,
        advection: (0.15, -0.1),
        diffusion: 0.25,
        horizon: 5 + 40,
        seed,
    };
    let ensemble = synth_drift(&params)?.time_shift(5)?;
    let grid = params.grid()?;
    let cells = grid.len();
    let s = Scenario::from_particles(grid, ensemble, SensorModel::uniform(cells, 0.78)?, params.release_cell, 40)?;

    let plan = plan_asar(&s, epsilon)?;
    let greedy = greedy_plan(&s)?;
    println!("epsilon {epsilon}: J = {:.4} in {:?}", plan.objective, plan.stats.wall_time);
    println!("  expansions {}, pushes {}, peak queue {}", plan.stats.expansions, plan.stats.pushes, plan.stats.peak_queue);
    println!("greedy: J = {:.4}", greedy.objective);
    println!("path: {}", plan.path);
    Ok(())
}
