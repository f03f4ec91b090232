//! Motion, search and particle beliefs on a tiny grid.

use sarplan::domain::{
    apply_glimpse, particle_glimpse, particles_to_belief, propagate, TransitionMatrix,
    TransitionModel, TransitionRow,
};
use sarplan::{Belief, Grid, MotionModel, ParticleEnsemble, SensorModel};

fn main() -> sarplan::Result<()> {
    let grid = Grid::new(3, 1)?;
    let sensor = SensorModel::uniform(3, 0.78)?;

    // drift one cell east per step, leaking 10% off the map from the last cell
    let rows = vec![
        TransitionRow { to: vec![(1, 1.0)], out: 0.0 },
        TransitionRow { to: vec![(2, 1.0)], out: 0.0 },
        TransitionRow { to: vec![(2, 0.9)], out: 0.1 },
    ];
    let motion = MotionModel::Transition(TransitionModel::homogeneous(TransitionMatrix::new(rows)));

    let mut b = Belief::new(vec![0.5, 0.5, 0.0], 0.0)?;
    for t in 1..=3 {
        b = propagate(&b, &motion, t)?;
        b = apply_glimpse(&b, &sensor, 2);
        println!("t={t} belief={:?} outside={:.4} total={:.4}", b.mass, b.outside, b.total());
    }

    // the same kind of update on particles
    let e = ParticleEnsemble::new(
        vec![vec![Some(0), Some(1)], vec![Some(1), Some(2)], vec![Some(2), None]],
        None,
    )?;
    let searched = particle_glimpse(&e, &sensor, 2, 1)?;
    println!("particle weights after searching cell 2 at t=1: {:?}", searched.pnd());
    println!("as a cell belief: {:?}", particles_to_belief(&searched, &grid, 1)?);
    Ok(())
}
