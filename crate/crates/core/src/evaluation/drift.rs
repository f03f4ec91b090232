use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::domain::{Grid, ParticleEnsemble, VertexId};
use crate::error::{Error, Result};

/// Advect-and-diffuse random walk standing in for an ocean drift model.
///
/// Every particle starts on the centre of `release_cell` and moves by
/// `advection + diffusion · N(0, I)` cells per step. A particle whose
/// position rounds to a cell off the grid is outside from then on.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftParams {
    pub width: usize,
    pub height: usize,
    pub release_cell: VertexId,
    pub n_particles: usize,
    /// Mean displacement per step, `(east, south)` in cells.
    pub advection: (f64, f64),
    /// Standard deviation of the per-step displacement on each axis.
    pub diffusion: f64,
    pub horizon: usize,
    pub seed: u64,
}

impl DriftParams {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Input("drift grid must be non-empty".into()));
        }
        if self.release_cell >= self.width * self.height {
            return Err(Error::Input(format!(
                "release cell {} is off the {}x{} grid",
                self.release_cell, self.width, self.height
            )));
        }
        if self.n_particles == 0 {
            return Err(Error::Input("need at least one particle".into()));
        }
        if !(self.diffusion >= 0.0 && self.diffusion.is_finite()) {
            return Err(Error::Input(format!("bad diffusion {}", self.diffusion)));
        }
        if !(self.advection.0.is_finite() && self.advection.1.is_finite()) {
            return Err(Error::Input("advection must be finite".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.width, self.height)
    }
}

pub fn synth_drift(params: &DriftParams) -> Result<ParticleEnsemble> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let (w, h) = (params.width as f64, params.height as f64);
    let rx = (params.release_cell % params.width) as f64;
    let ry = (params.release_cell / params.width) as f64;

    let mut trajectories = Vec::with_capacity(params.n_particles);
    for _ in 0..params.n_particles {
        let (mut x, mut y) = (rx, ry);
        let mut traj = Vec::with_capacity(params.horizon + 1);
        traj.push(Some(params.release_cell));
        let mut gone = false;
        for _ in 0..params.horizon {
            // draw even when outside so every particle consumes the same stream
            let (dx, dy) = (noise.sample(&mut rng), noise.sample(&mut rng));
            x += params.advection.0 + params.diffusion * dx;
            y += params.advection.1 + params.diffusion * dy;
            let (cx, cy) = (x.round(), y.round());
            if gone || cx < 0.0 || cy < 0.0 || cx >= w || cy >= h {
                gone = true;
                traj.push(None);
            } else {
                traj.push(Some(cy as usize * params.width + cx as usize));
            }
        }
        trajectories.push(traj);
    }
    ParticleEnsemble::new(trajectories, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> DriftParams {
        DriftParams {
            width: 5,
            height: 4,
            release_cell: 6,
            n_particles: 8,
            advection: (0.0, 0.0),
            diffusion: 0.0,
            horizon: 3,
            seed: 1,
        }
    }

    #[test]
    fn still_water_keeps_particles_home() {
        let e = synth_drift(&params()).unwrap();
        for p in 0..8 {
            assert_eq!(e.trajectory(p), vec![Some(6); 4]);
        }
    }

    #[test]
    fn eastward_current_shifts_one_cell_per_step() {
        let p = DriftParams {
            advection: (1.0, 0.0),
            ..params()
        };
        let e = synth_drift(&p).unwrap();
        assert_eq!(e.trajectory(3), vec![Some(6), Some(7), Some(8), Some(9)]);
    }

    #[test]
    fn leaving_the_grid_is_final() {
        let p = DriftParams {
            advection: (-1.0, 0.0),
            horizon: 4,
            ..params()
        };
        let e = synth_drift(&p).unwrap();
        assert_eq!(e.trajectory(0), vec![Some(6), Some(5), None, None, None]);
    }

    #[test]
    fn same_seed_same_ensemble() {
        let p = DriftParams {
            diffusion: 0.8,
            advection: (0.3, 0.2),
            ..params()
        };
        assert_eq!(synth_drift(&p).unwrap(), synth_drift(&p).unwrap());
        let other = DriftParams { seed: 2, ..p.clone() };
        assert_ne!(synth_drift(&p).unwrap(), synth_drift(&other).unwrap());
    }
}
