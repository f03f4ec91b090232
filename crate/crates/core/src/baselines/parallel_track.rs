use std::str::FromStr;
use std::time::Instant;

use crate::domain::{Grid, Scenario, VertexId};
use crate::error::{Error, Result};
use crate::objective::Path;
use crate::planner::{Plan, PlanStats};

/// Direction of the sweep legs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Legs run east-west, the pattern advances north-south.
    Horizontal,
    /// Legs run north-south, the pattern advances east-west.
    Vertical,
}

impl FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "horizontal" | "h" => Ok(Orientation::Horizontal),
            "vertical" | "v" => Ok(Orientation::Vertical),
            other => Err(Error::Input(format!("unknown orientation `{other}`"))),
        }
    }
}

/// Inclusive cell bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl BoundingBox {
    pub fn corners(&self, grid: &Grid) -> [VertexId; 4] {
        [
            grid.vertex(self.x0, self.y0),
            grid.vertex(self.x1, self.y0),
            grid.vertex(self.x0, self.y1),
            grid.vertex(self.x1, self.y1),
        ]
    }
}

/// Bounds of the cells holding prior mass.
pub fn prior_bounding_box(scenario: &Scenario) -> Option<BoundingBox> {
    let grid = scenario.grid();
    let mut bbox: Option<BoundingBox> = None;
    for (v, &m) in scenario.prior().mass.iter().enumerate() {
        if m <= 0.0 {
            continue;
        }
        let (x, y) = grid.coords(v);
        bbox = Some(match bbox {
            None => BoundingBox {
                x0: x,
                y0: y,
                x1: x,
                y1: y,
            },
            Some(b) => BoundingBox {
                x0: b.x0.min(x),
                y0: b.y0.min(y),
                x1: b.x1.max(x),
                y1: b.y1.max(y),
            },
        });
    }
    bbox
}

/// The box corner closest (in hops) to the start cell; lowest id on ties.
pub fn nearest_corner(scenario: &Scenario) -> Option<VertexId> {
    let grid = scenario.grid();
    let bbox = prior_bounding_box(scenario)?;
    let (sx, sy) = grid.coords(scenario.start());
    let mut corners = bbox.corners(grid);
    corners.sort_unstable();
    corners.into_iter().min_by_key(|&c| {
        let (x, y) = grid.coords(c);
        x.abs_diff(sx) + y.abs_diff(sy)
    })
}

/// Boustrophedon sweep of the prior's bounding box with one-cell leg
/// spacing, entered at `corner`. The searcher first takes a shortest path
/// from the start to the corner. Sweeps shorter than the budget are padded
/// by shuttling back and forth along the final leg; longer ones are cut.
pub fn parallel_track(
    scenario: &Scenario,
    orientation: Orientation,
    corner: VertexId,
) -> Result<Plan> {
    let clock = Instant::now();
    let grid = scenario.grid();
    let bbox = prior_bounding_box(scenario)
        .ok_or_else(|| Error::Input("prior has no mass on the grid".into()))?;
    if !bbox.corners(grid).contains(&corner) {
        return Err(Error::Input(format!(
            "cell {corner} is not a corner of the prior box {bbox:?}"
        )));
    }
    let (legs, final_leg) = sweep_targets(grid, bbox, orientation, corner);
    let budget = scenario.budget();

    let mut walk = vec![scenario.start()];
    for &target in &legs {
        if walk.len() > budget {
            break;
        }
        let here = *walk.last().expect("non-empty");
        if here == target {
            continue;
        }
        // unreachable pattern cells are skipped
        if let Some(route) = grid.shortest_path(here, target) {
            walk.extend_from_slice(&route[1..]);
        }
    }
    walk.truncate(budget + 1);
    if walk.len() < budget + 1 {
        pad_by_shuttling(grid, &mut walk, final_leg.max(2), budget + 1)?;
    }
    let stats = PlanStats {
        wall_time: clock.elapsed(),
        ..PlanStats::default()
    };
    Plan::evaluate(scenario, Path::new(walk), stats)
}

/// Open box cells in sweep order and the number of cells on the last leg.
fn sweep_targets(
    grid: &Grid,
    bbox: BoundingBox,
    orientation: Orientation,
    corner: VertexId,
) -> (Vec<VertexId>, usize) {
    let (cx, cy) = grid.coords(corner);
    let xs: Vec<usize> = if cx == bbox.x0 {
        (bbox.x0..=bbox.x1).collect()
    } else {
        (bbox.x0..=bbox.x1).rev().collect()
    };
    let ys: Vec<usize> = if cy == bbox.y0 {
        (bbox.y0..=bbox.y1).collect()
    } else {
        (bbox.y0..=bbox.y1).rev().collect()
    };
    let (outer, inner) = match orientation {
        Orientation::Horizontal => (&ys, &xs),
        Orientation::Vertical => (&xs, &ys),
    };
    let mut cells = Vec::with_capacity(xs.len() * ys.len());
    let mut last_leg = 0;
    for (k, &o) in outer.iter().enumerate() {
        let leg: Box<dyn Iterator<Item = &usize>> = if k % 2 == 0 {
            Box::new(inner.iter())
        } else {
            Box::new(inner.iter().rev())
        };
        let before = cells.len();
        for &i in leg {
            let v = match orientation {
                Orientation::Horizontal => grid.vertex(i, o),
                Orientation::Vertical => grid.vertex(o, i),
            };
            if grid.is_open(v) {
                cells.push(v);
            }
        }
        if cells.len() > before {
            last_leg = cells.len() - before;
        }
    }
    (cells, last_leg)
}

/// Extends `walk` to `len` vertices by bouncing over its last `leg` cells.
fn pad_by_shuttling(grid: &Grid, walk: &mut Vec<VertexId>, leg: usize, len: usize) -> Result<()> {
    if walk.len() == 1 {
        let v = walk[0];
        let n = grid.neighbors(v)?;
        let Some(&n) = n.first() else {
            return Err(Error::Infeasible(format!("start cell {v} has no neighbours")));
        };
        walk.push(n);
    }
    let tail_len = leg.min(walk.len());
    let tail: Vec<VertexId> = walk[walk.len() - tail_len..].to_vec();
    // bounce: tail reversed, then forward, and so on
    let mut forward = false;
    while walk.len() < len {
        let seq: Vec<VertexId> = if forward {
            tail[1..].to_vec()
        } else {
            tail[..tail.len() - 1].iter().rev().copied().collect()
        };
        for v in seq {
            if walk.len() == len {
                break;
            }
            walk.push(v);
        }
        forward = !forward;
    }
    Ok(())
}
