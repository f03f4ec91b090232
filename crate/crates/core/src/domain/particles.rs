use std::sync::Arc;

use crate::domain::{Belief, Grid, SensorModel, VertexId};
use crate::error::{Error, Result};

const OUTSIDE: u32 = u32::MAX;

/// A Monte Carlo drift ensemble. Each particle follows a fixed trajectory
/// and carries its probability of not having been detected (PND); the
/// belief of a cell is the summed PND of the particles in it.
#[derive(Debug, Clone)]
pub struct ParticleEnsemble {
    n: usize,
    steps: usize,
    /// Row-major `[particle][time]`, `OUTSIDE` off the grid.
    positions: Vec<u32>,
    pnd: Vec<f64>,
    index: Arc<OccupancyIndex>,
}

impl PartialEq for ParticleEnsemble {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.steps == other.steps
            && self.positions == other.positions
            && self.pnd == other.pnd
    }
}

/// An occupied cell with an upper bound on its immediate detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Candidate {
    pub cell: u32,
    pub slot: u32,
    pub bound: f64,
}

/// Per time step, which particles sit in which cell.
#[derive(Debug)]
struct OccupancyIndex {
    frames: Vec<Frame>,
}

#[derive(Debug, Default)]
struct Frame {
    /// Occupied cells, ascending.
    cells: Vec<u32>,
    /// `members[offsets[k]..offsets[k + 1]]` are the particles in `cells[k]`.
    offsets: Vec<u32>,
    members: Vec<u32>,
    outside: Vec<u32>,
}

impl OccupancyIndex {
    fn build(n: usize, steps: usize, positions: &[u32]) -> Self {
        let frames = (0..steps)
            .map(|t| {
                let mut occupied: Vec<(u32, u32)> = Vec::with_capacity(n);
                let mut outside = Vec::new();
                for p in 0..n {
                    match positions[p * steps + t] {
                        OUTSIDE => outside.push(p as u32),
                        c => occupied.push((c, p as u32)),
                    }
                }
                occupied.sort_unstable();
                let mut frame = Frame {
                    outside,
                    ..Frame::default()
                };
                for (c, p) in occupied {
                    if frame.cells.last() != Some(&c) {
                        frame.cells.push(c);
                        frame.offsets.push(frame.members.len() as u32);
                    }
                    frame.members.push(p);
                }
                frame.offsets.push(frame.members.len() as u32);
                frame
            })
            .collect();
        OccupancyIndex { frames }
    }
}

impl ParticleEnsemble {
    /// Builds an ensemble from per-particle trajectories (`None` = outside).
    /// Without explicit weights every particle starts with PND `1/n`.
    pub fn new(trajectories: Vec<Vec<Option<VertexId>>>, pnd: Option<Vec<f64>>) -> Result<Self> {
        let n = trajectories.len();
        if n == 0 {
            return Err(Error::invariant("ensemble has particles", "no trajectories"));
        }
        let steps = trajectories[0].len();
        if steps == 0 {
            return Err(Error::invariant("trajectories cover time 0", "empty trajectory"));
        }
        let mut positions = Vec::with_capacity(n * steps);
        for (p, traj) in trajectories.iter().enumerate() {
            if traj.len() != steps {
                return Err(Error::invariant(
                    "trajectories share one time range",
                    format!("particle {p} has {} steps, expected {steps}", traj.len()),
                ));
            }
            positions.extend(traj.iter().map(|c| c.map_or(OUTSIDE, |c| c as u32)));
        }
        let pnd = pnd.unwrap_or_else(|| vec![1.0 / n as f64; n]);
        Self::from_parts(n, steps, positions, pnd)
    }

    fn from_parts(n: usize, steps: usize, positions: Vec<u32>, pnd: Vec<f64>) -> Result<Self> {
        check_weights(n, &pnd)?;
        let index = Arc::new(OccupancyIndex::build(n, steps, &positions));
        Ok(ParticleEnsemble {
            n,
            steps,
            positions,
            pnd,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Last time index covered by every trajectory.
    pub fn horizon(&self) -> usize {
        self.steps - 1
    }

    pub fn pnd(&self) -> &[f64] {
        &self.pnd
    }

    pub fn position(&self, particle: usize, t: usize) -> Option<VertexId> {
        match self.positions[particle * self.steps + t] {
            OUTSIDE => None,
            c => Some(c as VertexId),
        }
    }

    pub fn trajectory(&self, particle: usize) -> Vec<Option<VertexId>> {
        (0..self.steps).map(|t| self.position(particle, t)).collect()
    }

    /// Same particles with replaced weights.
    pub fn with_pnd(&self, pnd: Vec<f64>) -> Result<Self> {
        check_weights(self.n, &pnd)?;
        let mut out = self.clone();
        out.pnd = pnd;
        Ok(out)
    }

    /// Drops the first `offset` time steps so that time `offset` becomes 0.
    pub fn time_shift(&self, offset: usize) -> Result<Self> {
        if offset >= self.steps {
            return Err(Error::Input(format!(
                "cannot shift by {offset}: horizon is {}",
                self.horizon()
            )));
        }
        let steps = self.steps - offset;
        let positions = (0..self.n)
            .flat_map(|p| {
                let row = &self.positions[p * self.steps..(p + 1) * self.steps];
                row[offset..].iter().copied()
            })
            .collect();
        Self::from_parts(self.n, steps, positions, self.pnd.clone())
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        for (i, &c) in self.positions.iter().enumerate() {
            if c != OUTSIDE && !grid.is_open(c as usize) {
                return Err(Error::invariant(
                    "particles on open cells",
                    format!(
                        "particle {} at time {} sits on cell {c}",
                        i / self.steps,
                        i % self.steps
                    ),
                ));
            }
        }
        Ok(())
    }

    fn check_time(&self, t: usize) -> Result<()> {
        if t >= self.steps {
            return Err(Error::Input(format!(
                "time {t} beyond ensemble horizon {}",
                self.horizon()
            )));
        }
        Ok(())
    }

    /// Particles located in `cell` at time `t`.
    #[inline]
    pub(crate) fn members(&self, cell: VertexId, t: usize) -> &[u32] {
        let frame = &self.index.frames[t];
        match frame.cells.binary_search(&(cell as u32)) {
            Ok(k) => {
                &frame.members[frame.offsets[k] as usize..frame.offsets[k + 1] as usize]
            }
            Err(_) => &[],
        }
    }

    /// Occupied cells at time `t` in ascending order, with their particles.
    pub(crate) fn occupied(&self, t: usize) -> impl Iterator<Item = (VertexId, &[u32])> + '_ {
        let frame = &self.index.frames[t];
        frame.cells.iter().enumerate().map(move |(k, &c)| {
            let range = frame.offsets[k] as usize..frame.offsets[k + 1] as usize;
            (c as VertexId, &frame.members[range])
        })
    }

    /// Particles in the `slot`-th occupied cell at time `t`.
    #[inline]
    pub(crate) fn slot_members(&self, t: usize, slot: u32) -> &[u32] {
        let frame = &self.index.frames[t];
        let k = slot as usize;
        &frame.members[frame.offsets[k] as usize..frame.offsets[k + 1] as usize]
    }

    /// Per time step, the occupied cells sorted by `q(c)` times their mass
    /// under the ensemble's own weights, largest first, lowest id on ties.
    pub(crate) fn detection_order(&self, sensor: &SensorModel) -> Vec<Vec<Candidate>> {
        (0..self.steps)
            .map(|t| {
                let mut sorted: Vec<Candidate> = self
                    .occupied(t)
                    .enumerate()
                    .map(|(slot, (c, members))| Candidate {
                        cell: c as u32,
                        slot: slot as u32,
                        bound: sensor.q(c) * members.iter().map(|&p| self.pnd[p as usize]).sum::<f64>(),
                    })
                    .collect();
                sorted.sort_by(|a, b| b.bound.total_cmp(&a.bound).then(a.cell.cmp(&b.cell)));
                sorted
            })
            .collect()
    }

    pub(crate) fn outside_members(&self, t: usize) -> &[u32] {
        &self.index.frames[t].outside
    }

    /// Cell belief at time `t` for arbitrary particle weights.
    pub(crate) fn belief_for(&self, weights: &[f64], cells: usize, t: usize) -> Belief {
        let mut b = Belief::zeros(cells);
        for (c, members) in self.occupied(t) {
            b.mass[c] = members.iter().map(|&p| weights[p as usize]).sum();
        }
        b.outside = self
            .outside_members(t)
            .iter()
            .map(|&p| weights[p as usize])
            .sum();
        b
    }

    /// Sums the PND of the particles in each cell at time `t`.
    pub fn particles_to_belief(&self, grid: &Grid, t: usize) -> Result<Belief> {
        self.check_time(t)?;
        Ok(self.belief_for(&self.pnd, grid.len(), t))
    }

    /// Searches `cell` at time `t`: every particle there has its PND scaled
    /// by `1 - q(cell)`.
    pub fn particle_glimpse(&self, sensor: &SensorModel, cell: VertexId, t: usize) -> Result<Self> {
        self.check_time(t)?;
        let mut pnd = self.pnd.clone();
        glimpse_weights(self, &mut pnd, sensor.q(cell), cell, t);
        let mut out = self.clone();
        out.pnd = pnd;
        Ok(out)
    }
}

fn check_weights(n: usize, pnd: &[f64]) -> Result<()> {
    if pnd.len() != n {
        return Err(Error::invariant(
            "one PND per particle",
            format!("{} weights for {n} particles", pnd.len()),
        ));
    }
    if let Some((p, w)) = pnd
        .iter()
        .enumerate()
        .find(|(_, w)| !(0.0..=1.0).contains(*w))
    {
        return Err(Error::invariant("PND in [0,1]", format!("particle {p}: {w}")));
    }
    let total: f64 = pnd.iter().sum();
    if total > 1.0 + 1e-9 {
        return Err(Error::invariant("PND total at most 1", format!("sum {total}")));
    }
    Ok(())
}

/// Scales the weights of the particles in `cell` at `t` by `1 - q` and
/// returns the removed mass.
#[inline]
pub(crate) fn glimpse_weights(
    ensemble: &ParticleEnsemble,
    weights: &mut [f64],
    q: f64,
    cell: VertexId,
    t: usize,
) -> f64 {
    let mut removed = 0.0;
    for &p in ensemble.members(cell, t) {
        let w = &mut weights[p as usize];
        let r = q * *w;
        *w -= r;
        removed += r;
    }
    removed
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(3, 3).unwrap()
    }

    #[test]
    fn belief_sums_pnd_per_cell() {
        let e = ParticleEnsemble::new(vec![vec![Some(3)], vec![Some(3)]], None).unwrap();
        let b = e.particles_to_belief(&grid(), 0).unwrap();
        assert_eq!(b.mass[3], 1.0);
        assert_eq!(b.total(), 1.0);
    }

    #[test]
    fn escaped_particle_counts_outside() {
        let e = ParticleEnsemble::new(vec![vec![Some(0), None]], None).unwrap();
        let b = e.particles_to_belief(&grid(), 1).unwrap();
        assert_eq!(b.outside, 1.0);
        assert_eq!(b.grid_mass(), 0.0);
    }

    #[test]
    fn distinct_cells_share_uniformly() {
        let traj = [0, 2, 6, 8].map(|c| vec![Some(c)]).to_vec();
        let e = ParticleEnsemble::new(traj, None).unwrap();
        let b = e.particles_to_belief(&grid(), 0).unwrap();
        for c in [0, 2, 6, 8] {
            assert_eq!(b.mass[c], 0.25);
        }
        assert_eq!(b.grid_mass(), 1.0);
    }

    #[test]
    fn time_out_of_range() {
        let e = ParticleEnsemble::new(vec![vec![Some(0), Some(1)]], None).unwrap();
        assert!(matches!(e.particles_to_belief(&grid(), 2), Err(Error::Input(_))));
    }

    #[test]
    fn glimpse_scales_only_particles_in_cell() {
        let e = ParticleEnsemble::new(vec![vec![Some(4)], vec![Some(5)]], Some(vec![1.0, 0.0]))
            .unwrap();
        let s = SensorModel::uniform(9, 0.78).unwrap();
        let after = e.particle_glimpse(&s, 4, 0).unwrap();
        assert!((after.pnd()[0] - 0.22).abs() < 1e-15);
        assert_eq!(after.pnd()[1], 0.0);
        let untouched = e.particle_glimpse(&s, 0, 0).unwrap();
        assert_eq!(untouched.pnd(), e.pnd());
    }

    #[test]
    fn repeated_glimpses_multiply() {
        let e = ParticleEnsemble::new(vec![vec![Some(1)]], None).unwrap();
        let s = SensorModel::uniform(9, 0.5).unwrap();
        let twice = e
            .particle_glimpse(&s, 1, 0)
            .unwrap()
            .particle_glimpse(&s, 1, 0)
            .unwrap();
        assert_eq!(twice.pnd()[0], 0.25);
    }

    #[test]
    fn time_shift_rebases_trajectories() {
        let e = ParticleEnsemble::new(vec![vec![Some(0), Some(1), Some(2)]], None).unwrap();
        let s = e.time_shift(1).unwrap();
        assert_eq!(s.horizon(), 1);
        assert_eq!(s.trajectory(0), vec![Some(1), Some(2)]);
    }
}
