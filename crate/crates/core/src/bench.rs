//! Corpus benchmark: every planner on every scenario, reported relative to
//! the best known objective.
//!
//! Report columns: `scenario,method,param,J,ratio_to_oracle,wall_time`.
//! The reference for `ratio_to_oracle` is the exhaustive optimum when the
//! walk count is under the cap, else the `ε = 1` search when it was run,
//! else the column is empty. `wall_time` (seconds) is only filled when
//! timing is requested.

use std::fmt::Write as _;
use std::fs;
use std::path::Path as FsPath;
use std::time::Instant;

use crate::baselines::{
    aco_trials, brute_force_with, count_walks, greedy_plan, median, nearest_corner,
    parallel_track, AcoParams, OracleOptions, Orientation, DEFAULT_WALK_CAP,
};
use crate::domain::Scenario;
use crate::error::{Error, Result};
use crate::heuristic::DistanceField;
use crate::io::load_scenario;
use crate::planner::{plan_asar_with, Silent};

pub const REPORT_HEADER: &str = "scenario,method,param,J,ratio_to_oracle,wall_time";

/// Suboptimality factors of the timing table.
pub const TABLE_EPSILONS: [f64; 8] = [1.1, 1.08, 1.06, 1.04, 1.02, 1.01, 1.005, 1.0];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    pub epsilons: Vec<f64>,
    /// Independent ACO runs per scenario; 0 skips ACO.
    pub aco_trials: usize,
    pub aco: AcoParams,
    /// Generations at which the median ACO objective is reported.
    pub aco_checkpoints: Vec<usize>,
    pub oracle_cap: u128,
    pub timing: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            epsilons: TABLE_EPSILONS.to_vec(),
            aco_trials: 100,
            aco: AcoParams::default(),
            aco_checkpoints: vec![1, 10, 50, 100, 200],
            oracle_cap: DEFAULT_WALK_CAP,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub scenario: String,
    pub method: String,
    pub param: String,
    pub objective: f64,
    pub ratio: Option<f64>,
    pub wall_time: Option<f64>,
}

pub fn bench_scenario(name: &str, scenario: &Scenario, options: &BenchOptions) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    let mut push = |method: &str, param: String, objective: f64, secs: f64| {
        rows.push(BenchRow {
            scenario: name.to_string(),
            method: method.to_string(),
            param,
            objective,
            ratio: None,
            wall_time: options.timing.then_some(secs),
        });
    };

    let mut reference = None;
    let walks = count_walks(scenario, scenario.start(), scenario.budget());
    if walks <= options.oracle_cap {
        let clock = Instant::now();
        let plan = brute_force_with(
            scenario,
            OracleOptions {
                cap: options.oracle_cap,
                prune: false,
            },
        )?;
        reference = Some(plan.objective);
        push("oracle", String::new(), plan.objective, clock.elapsed().as_secs_f64());
    }

    let distances = DistanceField::new(scenario.grid());
    for &eps in &options.epsilons {
        let clock = Instant::now();
        let plan = plan_asar_with(scenario, eps, &distances, &mut Silent)?;
        if eps == 1.0 && reference.is_none() {
            reference = Some(plan.objective);
        }
        push("asar", eps.to_string(), plan.objective, clock.elapsed().as_secs_f64());
    }

    if let Some(corner) = nearest_corner(scenario) {
        for (label, o) in [("horizontal", Orientation::Horizontal), ("vertical", Orientation::Vertical)] {
            let clock = Instant::now();
            let plan = parallel_track(scenario, o, corner)?;
            push("parallel-track", label.into(), plan.objective, clock.elapsed().as_secs_f64());
        }
    }

    let clock = Instant::now();
    let plan = greedy_plan(scenario)?;
    push("greedy", String::new(), plan.objective, clock.elapsed().as_secs_f64());

    if options.aco_trials > 0 {
        let clock = Instant::now();
        let runs = aco_trials(scenario, &options.aco, options.aco_trials)?;
        let secs = clock.elapsed().as_secs_f64();
        for &g in &options.aco_checkpoints {
            if g == 0 || g > options.aco.generations {
                continue;
            }
            let j = median(runs.iter().map(|r| r.trace[g - 1]).collect());
            push("aco-median", g.to_string(), j, secs);
        }
    }

    for row in &mut rows {
        row.ratio = reference.map(|r| if r > 0.0 { row.objective / r } else { 1.0 });
    }
    Ok(rows)
}

/// Benchmarks every `*.toml` scenario in `dir`, in file-name order.
pub fn run_bench(dir: &FsPath, options: &BenchOptions) -> Result<Vec<BenchRow>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == "toml") {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Error::Input(format!("no .toml scenarios in {}", dir.display())));
    }
    let mut rows = Vec::new();
    for f in files {
        let scenario = load_scenario(&f)?;
        let name = f
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        rows.extend(bench_scenario(&name, &scenario, options)?);
    }
    Ok(rows)
}

pub fn format_rows(rows: &[BenchRow]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        let ratio = r.ratio.map(|x| x.to_string()).unwrap_or_default();
        let wall = r.wall_time.map(|x| format!("{x:.6}")).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{ratio},{wall}",
            r.scenario, r.method, r.param, r.objective
        )
        .expect("string write");
    }
    out
}
