//! Parallel track, greedy and ant colony paths next to the planner on a
//! synthetic drift scenario.

use sarplan::baselines::{aco_trials, greedy_plan, median_trace, nearest_corner, parallel_track, AcoParams, Orientation};
use sarplan::corpus::{drift_scenario, DriftCorpusParams};
use sarplan::plan_asar;

fn main() -> sarplan::Result<()> {
    let s = drift_scenario(&DriftCorpusParams::default(), 12)?;
    let best = plan_asar(&s, 1.0)?.objective;
    println!("T = {}, planner (eps 1): J = {best:.4}", s.budget());

    let corner = nearest_corner(&s).expect("prior has mass on the grid");
    for o in [Orientation::Horizontal, Orientation::Vertical] {
        let pt = parallel_track(&s, o, corner)?;
        println!("parallel track {o:?} from {corner}: J = {:.4} ({:.0}%)", pt.objective, 100.0 * pt.objective / best);
    }
    let g = greedy_plan(&s)?;
    println!("greedy: J = {:.4} ({:.0}%)", g.objective, 100.0 * g.objective / best);

    let runs = aco_trials(&s, &AcoParams::default(), 20)?;
    let trace = median_trace(&runs);
    for gen in [1, 10, 50, 100, 200] {
        println!("aco median after {gen:>3} generations: J = {:.4}", trace[gen - 1]);
    }
    Ok(())
}
