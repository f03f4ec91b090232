//! TOML scenario documents.
//!
//! ```toml
//! budget = 6
//! start = 0
//! normalize = false          # rescale the prior to total 1
//!
//! [grid]
//! width = 4
//! height = 4
//! blocked = [5, 6]
//!
//! [prior]
//! kind = "cells"             # uniform | cells | particles
//! cells = [[3, 0.4], [12, 0.6]]
//! outside = 0.0
//!
//! [motion]
//! kind = "transition"        # identity | transition | particles
//! # file = "drift.csv"       # particles only, relative to this file
//!
//! [[motion.steps]]           # one entry: same matrix every step
//! rows = [{ from = 3, to = [[2, 0.5], [3, 0.5]], out = 0.0 }]
//! # outside = { to = [[0, 0.1]], out = 0.9 }
//!
//! [sensor]
//! q = 0.78
//! overrides = [[12, 0.5]]
//! ```
//!
//! Transition rows that are not listed keep the target in place. The
//! outside bucket is absorbing unless a step gives an `outside` row.

use std::fs;
use std::path::{Path as FsPath, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domain::{
    Belief, Grid, MotionModel, Scenario, SensorModel, TransitionMatrix, TransitionModel,
    TransitionRow, VertexId,
};
use crate::error::{Error, Result};
use crate::io::particles::{load_particles, save_particles};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    budget: usize,
    start: VertexId,
    #[serde(default, skip_serializing_if = "is_false")]
    normalize: bool,
    grid: GridDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prior: Option<PriorDoc>,
    motion: MotionDoc,
    sensor: SensorDoc,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridDoc {
    width: usize,
    height: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    blocked: Vec<VertexId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PriorKind {
    Uniform,
    Cells,
    Particles,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PriorDoc {
    kind: PriorKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    cells: Vec<(VertexId, f64)>,
    #[serde(default)]
    outside: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum MotionKind {
    Identity,
    Transition,
    Particles,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MotionDoc {
    kind: MotionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    file: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    steps: Vec<StepDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepDoc {
    #[serde(default)]
    rows: Vec<RowDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outside: Option<OutsideDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowDoc {
    from: VertexId,
    #[serde(default)]
    to: Vec<(VertexId, f64)>,
    #[serde(default)]
    out: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutsideDoc {
    #[serde(default)]
    to: Vec<(VertexId, f64)>,
    #[serde(default)]
    out: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SensorDoc {
    q: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    overrides: Vec<(VertexId, f64)>,
}

/// Reads and validates a scenario document.
pub fn load_scenario(path: &FsPath) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().map(FsPath::to_path_buf).unwrap_or_default();
    parse_scenario(&text, path, &base)
}

/// Parses scenario text; `file` labels diagnostics and `base` resolves a
/// particle file reference.
pub fn parse_scenario(text: &str, file: &FsPath, base: &FsPath) -> Result<Scenario> {
    let doc: ScenarioDoc = toml::from_str(text).map_err(|e| Error::Parse {
        file: file.to_path_buf(),
        line: e.span().map(|s| line_of_offset(text, s.start)),
        message: e.message().to_string(),
    })?;
    let at = |section: &str, err: Error| Error::Parse {
        file: file.to_path_buf(),
        line: find_line(text, section),
        message: err.to_string(),
    };

    let grid = Grid::with_blocked(doc.grid.width, doc.grid.height, &doc.grid.blocked)
        .map_err(|e| at("[grid]", e))?;
    let cells = grid.len();
    let sensor = build_sensor(&doc.sensor, cells).map_err(|e| at("[sensor]", e))?;

    let scenario = match doc.motion.kind {
        MotionKind::Particles => {
            if doc.prior.as_ref().is_some_and(|p| p.kind != PriorKind::Particles) {
                return Err(at(
                    "[prior]",
                    Error::Input("particle motion takes its prior from the particles".into()),
                ));
            }
            let rel = doc.motion.file.as_deref().ok_or_else(|| {
                at("[motion]", Error::Input("particle motion needs `file`".into()))
            })?;
            let ensemble = load_particles(&base.join(rel))?;
            let ensemble = if doc.normalize {
                let total: f64 = ensemble.pnd().iter().sum();
                let scaled = ensemble.pnd().iter().map(|w| w / total).collect();
                ensemble.with_pnd(scaled).map_err(|e| at("[motion]", e))?
            } else {
                ensemble
            };
            Scenario::from_particles(grid, ensemble, sensor, doc.start, doc.budget)
        }
        kind => {
            let prior_doc = doc
                .prior
                .as_ref()
                .ok_or_else(|| at("budget", Error::Input("missing [prior] section".into())))?;
            let prior = build_prior(prior_doc, &grid, doc.normalize).map_err(|e| at("[prior]", e))?;
            let motion = if kind == MotionKind::Identity {
                MotionModel::Identity
            } else {
                build_transition(&doc.motion.steps, cells).map_err(|e| at("[motion]", e))?
            };
            Scenario::new(grid, prior, motion, sensor, doc.start, doc.budget)
        }
    };
    scenario.map_err(|e| {
        let section = match &e {
            Error::Invariant { invariant, .. } if invariant.contains("prior") => "[prior]",
            Error::Invariant { invariant, .. } if invariant.contains("sensor") => "[sensor]",
            Error::Invariant { invariant, .. } if invariant.contains("start") => "start",
            Error::Invariant { invariant, .. } if invariant.contains("budget") => "budget",
            Error::Parse { .. } | Error::Io { .. } => return e,
            _ => "[motion]",
        };
        at(section, e)
    })
}

fn build_sensor(doc: &SensorDoc, cells: usize) -> Result<SensorModel> {
    let mut q = vec![doc.q; cells];
    for &(v, value) in &doc.overrides {
        *q.get_mut(v)
            .ok_or_else(|| Error::Input(format!("sensor override for unknown cell {v}")))? = value;
    }
    SensorModel::new(q)
}

fn build_prior(doc: &PriorDoc, grid: &Grid, normalize: bool) -> Result<Belief> {
    let cells = grid.len();
    let mut b = match doc.kind {
        PriorKind::Uniform => {
            let open: Vec<VertexId> = (0..cells).filter(|&v| grid.is_open(v)).collect();
            let mut b = Belief::uniform_over(cells, &open);
            let scale = 1.0 - doc.outside;
            b.mass.iter_mut().for_each(|m| *m *= scale);
            b.outside = doc.outside;
            b
        }
        PriorKind::Cells => {
            let mut b = Belief::zeros(cells);
            for &(v, m) in &doc.cells {
                *b.mass
                    .get_mut(v)
                    .ok_or_else(|| Error::Input(format!("prior mass on unknown cell {v}")))? += m;
            }
            b.outside = doc.outside;
            b
        }
        PriorKind::Particles => {
            return Err(Error::Input(
                "a particle prior needs particle motion".into(),
            ))
        }
    };
    if normalize {
        let total = b.total();
        if total <= 0.0 {
            return Err(Error::Input("cannot normalize a prior with no mass".into()));
        }
        b.mass.iter_mut().for_each(|m| *m /= total);
        b.outside /= total;
    }
    Ok(b)
}

fn build_transition(steps: &[StepDoc], cells: usize) -> Result<MotionModel> {
    let mut matrices = Vec::with_capacity(steps.len());
    for step in steps {
        let mut rows: Vec<TransitionRow> = (0..cells).map(TransitionRow::stay).collect();
        for r in &step.rows {
            let slot = rows
                .get_mut(r.from)
                .ok_or_else(|| Error::Input(format!("transition row for unknown cell {}", r.from)))?;
            *slot = TransitionRow {
                to: r.to.clone(),
                out: r.out,
            };
        }
        matrices.push(match &step.outside {
            Some(o) => TransitionMatrix::with_outside_row(
                rows,
                TransitionRow {
                    to: o.to.clone(),
                    out: o.out,
                },
            ),
            None => TransitionMatrix::new(rows),
        });
    }
    Ok(MotionModel::Transition(TransitionModel::new(matrices)?))
}

/// Writes `scenario` as a document at `path`. Particle motion also writes
/// the trajectories next to it as `<stem>.particles.csv`.
pub fn save_scenario(scenario: &Scenario, path: &FsPath) -> Result<()> {
    let grid = scenario.grid();
    let sensor = scenario.sensor();
    let base_q = sensor.as_slice().first().copied().unwrap_or(0.0);
    let overrides = sensor
        .as_slice()
        .iter()
        .enumerate()
        .filter(|&(_, &q)| q != base_q)
        .map(|(v, &q)| (v, q))
        .collect();

    let (prior, motion) = match scenario.motion() {
        MotionModel::Particles(e) => {
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scenario".into());
            let name = format!("{stem}.particles.csv");
            let target: PathBuf = path.with_file_name(&name);
            save_particles(e, &target)?;
            (
                None,
                MotionDoc {
                    kind: MotionKind::Particles,
                    file: Some(name),
                    steps: Vec::new(),
                },
            )
        }
        other => {
            let p = scenario.prior();
            let prior = PriorDoc {
                kind: PriorKind::Cells,
                cells: p
                    .mass
                    .iter()
                    .enumerate()
                    .filter(|&(_, &m)| m != 0.0)
                    .map(|(v, &m)| (v, m))
                    .collect(),
                outside: p.outside,
            };
            let motion = match other {
                MotionModel::Transition(model) => MotionDoc {
                    kind: MotionKind::Transition,
                    file: None,
                    steps: model.steps().iter().map(step_doc).collect(),
                },
                _ => MotionDoc {
                    kind: MotionKind::Identity,
                    file: None,
                    steps: Vec::new(),
                },
            };
            (Some(prior), motion)
        }
    };
    let doc = ScenarioDoc {
        budget: scenario.budget(),
        start: scenario.start(),
        normalize: false,
        grid: GridDoc {
            width: grid.width(),
            height: grid.height(),
            blocked: grid.blocked_cells(),
        },
        prior,
        motion,
        sensor: SensorDoc {
            q: base_q,
            overrides,
        },
    };
    let text = toml::to_string(&doc)
        .map_err(|e| Error::Input(format!("cannot serialise scenario: {e}")))?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn step_doc(m: &TransitionMatrix) -> StepDoc {
    let rows = m
        .rows()
        .iter()
        .enumerate()
        .filter(|(v, row)| **row != TransitionRow::stay(*v))
        .map(|(v, row)| RowDoc {
            from: v,
            to: row.to.clone(),
            out: row.out,
        })
        .collect();
    let o = m.outside_row();
    let outside = (*o != TransitionRow::absorbing_outside()).then(|| OutsideDoc {
        to: o.to.clone(),
        out: o.out,
    });
    StepDoc { rows, outside }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of the first line starting with `needle`, ignoring indentation.
fn find_line(text: &str, needle: &str) -> Option<usize> {
    text.lines()
        .position(|l| l.trim_start().starts_with(needle))
        .map(|i| i + 1)
}
