//! Plan and report files.
//!
//! `save_plan` writes into a directory:
//!
//! - `path.csv`: `step,cell`, steps `0..=T`
//! - `trace.csv`: `step,survival`, steps `1..=T`
//! - `stats.txt`: `key=value` lines
//! - `heatmaps/belief_tNNN.csv` (optional): the undetected-target belief
//!   after the search at step `NNN`, one grid row per line

use std::fmt::Write as _;
use std::fs;
use std::path::Path as FsPath;

use crate::domain::{Scenario, VertexId};
use crate::error::{Error, Result};
use crate::evaluation::EvalReport;
use crate::objective::{detection_probability, Path};
use crate::planner::Plan;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SaveOptions {
    pub heatmaps: bool,
    /// Include wall-clock time in `stats.txt`; off keeps output reproducible.
    pub timing: bool,
}

pub fn save_plan(scenario: &Scenario, plan: &Plan, dir: &FsPath, options: SaveOptions) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut path_csv = String::from("step,cell\n");
    for (t, v) in plan.path.vertices().iter().enumerate() {
        writeln!(path_csv, "{t},{v}").expect("string write");
    }
    write(&dir.join("path.csv"), &path_csv)?;

    let mut trace_csv = String::from("step,survival\n");
    for (i, s) in plan.trace.survival.iter().enumerate() {
        writeln!(trace_csv, "{},{s}", i + 1).expect("string write");
    }
    write(&dir.join("trace.csv"), &trace_csv)?;

    write(&dir.join("stats.txt"), &plan_stats(scenario, plan, options)?)?;

    if options.heatmaps {
        let maps = dir.join("heatmaps");
        fs::create_dir_all(&maps).map_err(|e| Error::io(&maps, e))?;
        let grid = scenario.grid();
        let mut state = scenario.initial_state();
        for t in 0..=plan.path.steps() {
            if t > 0 {
                state = scenario.step(&state, plan.path.at(t), t)?.0;
            }
            let b = scenario.cell_belief(&state, t);
            let mut text = String::new();
            for y in 0..grid.height() {
                let row: Vec<String> = (0..grid.width())
                    .map(|x| b.mass[grid.vertex(x, y)].to_string())
                    .collect();
                text.push_str(&row.join(","));
                text.push('\n');
            }
            write(&maps.join(format!("belief_t{t:03}.csv")), &text)?;
        }
    }
    Ok(())
}

fn plan_stats(scenario: &Scenario, plan: &Plan, options: SaveOptions) -> Result<String> {
    let s = &plan.stats;
    let mut out = String::new();
    let mut kv = |k: &str, v: String| writeln!(out, "{k}={v}").expect("string write");
    kv("objective", plan.objective.to_string());
    kv("steps", plan.path.steps().to_string());
    kv(
        "detection_probability",
        detection_probability(scenario, &plan.path)?.to_string(),
    );
    if let Some(eps) = s.epsilon {
        kv("epsilon", eps.to_string());
    }
    kv("expansions", s.expansions.to_string());
    kv("pushes", s.pushes.to_string());
    kv("peak_queue", s.peak_queue.to_string());
    if options.timing {
        kv("wall_time_s", s.wall_time.as_secs_f64().to_string());
    }
    Ok(out)
}

/// Reads a `step,cell` path file back.
pub fn load_path(file: &FsPath) -> Result<Path> {
    let text = fs::read_to_string(file).map_err(|e| Error::io(file, e))?;
    let parse = |line: usize, message: String| Error::Parse {
        file: file.to_path_buf(),
        line: Some(line),
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "step,cell" => {}
        _ => return Err(parse(1, "expected header `step,cell`".into())),
    }
    let mut cells: Vec<VertexId> = Vec::new();
    for (i, l) in lines {
        let l = l.trim();
        if l.is_empty() {
            continue;
        }
        let (step, cell) = l
            .split_once(',')
            .ok_or_else(|| parse(i + 1, format!("expected `step,cell`, got `{l}`")))?;
        let step: usize = step
            .trim()
            .parse()
            .map_err(|_| parse(i + 1, format!("bad step `{step}`")))?;
        if step != cells.len() {
            return Err(parse(i + 1, format!("expected step {}, got {step}", cells.len())));
        }
        cells.push(
            cell.trim()
                .parse()
                .map_err(|_| parse(i + 1, format!("bad cell `{cell}`")))?,
        );
    }
    Ok(Path::new(cells))
}

pub fn format_report(r: &EvalReport) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| writeln!(out, "{k}={v}").expect("string write");
    kv("n_trials", r.n_trials.to_string());
    kv("detected_count", r.detected_count.to_string());
    kv("empirical_mttd", r.empirical_mttd.to_string());
    kv("mttd_se", r.mttd_se.to_string());
    kv("objective", r.objective.to_string());
    kv("detected_fraction", r.detected_fraction.to_string());
    kv("detected_fraction_se", r.detected_fraction_se.to_string());
    kv("detection_probability", r.detection_probability.to_string());
    out
}

fn write(path: &FsPath, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
