//! Grid geometry, belief representations, target motion and sensing.
//!
//! Time convention: the prior is the belief at step 0 with the searcher on
//! the start cell. Step `t >= 1` first moves the target with the motion
//! model for `t`, then searches the cell the searcher has just entered.

mod belief;
mod grid;
mod motion;
mod particles;
mod scenario;
mod sensor;

pub use belief::{Belief, PROB_TOL};
pub use grid::{Grid, VertexId};
pub use motion::{
    propagate, MotionModel, TransitionMatrix, TransitionModel, TransitionRow, STOCHASTIC_TOL,
};
pub use particles::ParticleEnsemble;
pub use scenario::{BeliefState, Scenario};
pub(crate) use scenario::BeliefWalker;
pub use sensor::SensorModel;

/// Searches `v` once on a cell belief.
pub fn apply_glimpse(belief: &Belief, sensor: &SensorModel, v: VertexId) -> Belief {
    belief.apply_glimpse(sensor, v)
}

/// Cell belief of an ensemble at time `t`.
pub fn particles_to_belief(
    ensemble: &ParticleEnsemble,
    grid: &Grid,
    t: usize,
) -> crate::Result<Belief> {
    ensemble.particles_to_belief(grid, t)
}

/// Searches `cell` at time `t` on a particle ensemble.
pub fn particle_glimpse(
    ensemble: &ParticleEnsemble,
    sensor: &SensorModel,
    cell: VertexId,
    t: usize,
) -> crate::Result<ParticleEnsemble> {
    ensemble.particle_glimpse(sensor, cell, t)
}
