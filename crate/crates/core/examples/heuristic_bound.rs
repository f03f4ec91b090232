//! The relaxed greedy bound next to the exact cost-to-go along a path.

use sarplan::baselines::{optimal_completion, OracleOptions};
use sarplan::corpus::small_scenario;
use sarplan::heuristic::{heuristic_at, DistanceField};
use sarplan::plan_asar;

fn main() -> sarplan::Result<()> {
    let s = small_scenario(5);
    let d = DistanceField::new(s.grid());
    let path = plan_asar(&s, 1.0)?.path;
    let mut state = s.initial_state();
    println!("{} motion, T = {}", s.motion().kind(), s.budget());
    for t in 0..=s.budget() {
        if t > 0 {
            state = s.step(&state, path.at(t), t)?.0;
        }
        let h = heuristic_at(&s, &d, path.at(t), t, &state);
        let exact = optimal_completion(&s, &path.vertices()[..=t], OracleOptions::default())?
            .map_or(f64::NAN, |c| c.cost_to_go);
        println!("t={t} at {:>2}: bound {h:.5}  exact {exact:.5}", path.at(t));
    }
    Ok(())
}
