//! Read a scenario document, plan, and write the plan artifacts.

use sarplan::io::{parse_scenario, save_plan, SaveOptions};
use sarplan::plan_asar;

const DOC: &str = r#"
budget = 6
start = 0

[grid]
width = 3
height = 3
blocked = [4]

[prior]
kind = "cells"
cells = [[2, 0.3], [8, 0.5], [6, 0.2]]

[motion]
kind = "transition"

[[motion.steps]]
rows = [{ from = 8, to = [[8, 0.7], [7, 0.3]] }]

[sensor]
q = 0.78
"#;

fn main() -> sarplan::Result<()> {
    let dir = std::env::temp_dir().join("sarplan-scenario-files");
    let s = parse_scenario(DOC, "inline.toml".as_ref(), &dir)?;
    let plan = plan_asar(&s, 1.0)?;
    save_plan(&s, &plan, &dir, SaveOptions { heatmaps: true, timing: false })?;
    println!("J = {:.4}, path {}", plan.objective, plan.path);
    println!("artifacts in {}", dir.display());
    Ok(())
}
