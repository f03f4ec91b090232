use std::fmt;
use std::sync::Arc;

use crate::domain::particles::{glimpse_weights, Candidate};
use crate::domain::{
    propagate, Belief, Grid, MotionModel, ParticleEnsemble, SensorModel, VertexId, PROB_TOL,
};
use crate::error::{Error, Result};

/// Everything a planner needs: where the target may be, how it moves, how
/// well the searcher sees, where the searcher starts and how many steps it
/// may take. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    grid: Grid,
    prior: Belief,
    motion: MotionModel,
    sensor: SensorModel,
    start: VertexId,
    budget: usize,
    order: DetectionOrder,
}

/// Cached [`ParticleEnsemble::detection_order`] for particle scenarios.
#[derive(Clone, Default)]
pub(crate) struct DetectionOrder(Option<Arc<Vec<Vec<Candidate>>>>);

impl fmt::Debug for DetectionOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("DetectionOrder(..)")
    }
}

// derived from the other scenario fields
impl PartialEq for DetectionOrder {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

/// The undetected-target belief carried by a search state, in whichever
/// representation the motion model uses.
#[derive(Debug, Clone, PartialEq)]
pub enum BeliefState {
    Cells(Belief),
    /// Per-particle PND; positions come from the scenario's ensemble.
    Particles(Vec<f64>),
}

impl BeliefState {
    /// Total undetected mass, P(D > t).
    pub fn survival(&self) -> f64 {
        match self {
            BeliefState::Cells(b) => b.total(),
            BeliefState::Particles(w) => w.iter().sum(),
        }
    }
}

impl Scenario {
    pub fn new(
        grid: Grid,
        prior: Belief,
        motion: MotionModel,
        sensor: SensorModel,
        start: VertexId,
        budget: usize,
    ) -> Result<Self> {
        let s = Scenario {
            grid,
            prior,
            motion,
            sensor,
            start,
            budget,
            order: DetectionOrder::default(),
        };
        s.validate()?;
        let mut s = s;
        if let MotionModel::Particles(e) = &s.motion {
            s.order = DetectionOrder(Some(Arc::new(e.detection_order(&s.sensor))));
        }
        Ok(s)
    }

    /// Builds a particle-backed scenario whose prior is the ensemble's
    /// occupancy at time 0.
    pub fn from_particles(
        grid: Grid,
        ensemble: ParticleEnsemble,
        sensor: SensorModel,
        start: VertexId,
        budget: usize,
    ) -> Result<Self> {
        ensemble.validate(&grid)?;
        let prior = ensemble.particles_to_belief(&grid, 0)?;
        Scenario::new(grid, prior, MotionModel::Particles(ensemble), sensor, start, budget)
    }

    fn validate(&self) -> Result<()> {
        let cells = self.grid.len();
        if self.prior.len() != cells {
            return Err(Error::invariant(
                "prior covers the grid",
                format!("{} entries for {cells} cells", self.prior.len()),
            ));
        }
        self.prior.validate()?;
        let total = self.prior.total();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::invariant(
                "prior sums to 1",
                format!("prior mass is {total}"),
            ));
        }
        if let Some(v) = (0..cells).find(|&v| self.grid.is_blocked(v) && self.prior.mass[v] > 0.0)
        {
            return Err(Error::invariant(
                "no prior mass on blocked cells",
                format!("cell {v} holds {}", self.prior.mass[v]),
            ));
        }
        if self.sensor.len() != cells {
            return Err(Error::invariant(
                "sensor covers the grid",
                format!("{} entries for {cells} cells", self.sensor.len()),
            ));
        }
        if !self.grid.is_open(self.start) {
            return Err(Error::invariant(
                "start is an open cell",
                format!("start {}", self.start),
            ));
        }
        match &self.motion {
            MotionModel::Identity => {}
            MotionModel::Transition(model) => {
                for m in model.steps() {
                    m.validate(&self.grid)?;
                }
            }
            MotionModel::Particles(e) => {
                e.validate(&self.grid)?;
                let derived = e.particles_to_belief(&self.grid, 0)?;
                let gap = derived
                    .mass
                    .iter()
                    .zip(&self.prior.mass)
                    .map(|(a, b)| (a - b).abs())
                    .fold((derived.outside - self.prior.outside).abs(), f64::max);
                if gap > PROB_TOL {
                    return Err(Error::invariant(
                        "prior matches particle occupancy at time 0",
                        format!("largest difference {gap}"),
                    ));
                }
            }
        }
        if let Some(h) = self.motion.horizon() {
            if h < self.budget {
                return Err(Error::invariant(
                    "motion horizon covers the budget",
                    format!("motion defined up to step {h}, budget {}", self.budget),
                ));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn prior(&self) -> &Belief {
        &self.prior
    }

    pub fn motion(&self) -> &MotionModel {
        &self.motion
    }

    pub fn sensor(&self) -> &SensorModel {
        &self.sensor
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Same scenario with a different budget.
    pub fn with_budget(&self, budget: usize) -> Result<Self> {
        let mut s = self.clone();
        s.budget = budget;
        s.validate()?;
        Ok(s)
    }

    /// Same scenario with a different start cell.
    pub fn with_start(&self, start: VertexId) -> Result<Self> {
        let mut s = self.clone();
        s.start = start;
        s.validate()?;
        Ok(s)
    }

    /// Occupied cells at step `t` by decreasing detection bound; particle
    /// scenarios only.
    pub(crate) fn detection_order(&self, t: usize) -> Option<&[Candidate]> {
        match &self.order.0 {
            Some(order) => order.get(t).map(Vec::as_slice),
            None => None,
        }
    }

    pub fn particles(&self) -> Option<&ParticleEnsemble> {
        match &self.motion {
            MotionModel::Particles(e) => Some(e),
            _ => None,
        }
    }

    /// Belief before the first step: the prior, searcher at the start cell.
    pub fn initial_state(&self) -> BeliefState {
        match &self.motion {
            MotionModel::Particles(e) => BeliefState::Particles(e.pnd().to_vec()),
            _ => BeliefState::Cells(self.prior.clone()),
        }
    }

    /// A priori belief at step `t` from the belief at `t - 1`.
    pub fn predict(&self, state: &BeliefState, t: usize) -> Result<BeliefState> {
        match (state, &self.motion) {
            (BeliefState::Cells(b), motion) => Ok(BeliefState::Cells(propagate(b, motion, t)?)),
            (BeliefState::Particles(w), MotionModel::Particles(e)) => {
                if t > e.horizon() {
                    return Err(Error::Config(format!(
                        "particle trajectories end at step {}, step {t} requested",
                        e.horizon()
                    )));
                }
                Ok(BeliefState::Particles(w.clone()))
            }
            (BeliefState::Particles(_), _) => Err(Error::Config(
                "particle weights require a particle motion model".into(),
            )),
        }
    }

    /// A priori mass on `v` at step `t`.
    #[inline]
    pub fn mass_at(&self, state: &BeliefState, v: VertexId, t: usize) -> f64 {
        match (state, &self.motion) {
            (BeliefState::Cells(b), _) => b.mass[v],
            (BeliefState::Particles(w), MotionModel::Particles(e)) => {
                e.members(v, t).iter().map(|&p| w[p as usize]).sum()
            }
            (BeliefState::Particles(_), _) => 0.0,
        }
    }

    /// Searches `v` at step `t` in place; returns the detected mass.
    #[inline]
    pub fn observe(&self, state: &mut BeliefState, v: VertexId, t: usize) -> f64 {
        match (state, &self.motion) {
            (BeliefState::Cells(b), _) => b.glimpse_in_place(&self.sensor, v),
            (BeliefState::Particles(w), MotionModel::Particles(e)) => {
                glimpse_weights(e, w, self.sensor.q(v), v, t)
            }
            (BeliefState::Particles(_), _) => 0.0,
        }
    }

    /// Moves to step `t` and searches `v`. Returns the new belief and the
    /// detection probability of this step, `q(v) * b̄[v]`.
    pub fn step(&self, state: &BeliefState, v: VertexId, t: usize) -> Result<(BeliefState, f64)> {
        let mut next = self.predict(state, t)?;
        let detected = self.observe(&mut next, v, t);
        Ok((next, detected))
    }

    /// Cell view of a belief state at step `t`.
    pub fn cell_belief(&self, state: &BeliefState, t: usize) -> Belief {
        match (state, &self.motion) {
            (BeliefState::Cells(b), _) => b.clone(),
            (BeliefState::Particles(w), MotionModel::Particles(e)) => {
                e.belief_for(w, self.grid.len(), t)
            }
            (BeliefState::Particles(_), _) => Belief::zeros(self.grid.len()),
        }
    }
}

/// Incremental rollout of one walk through a scenario, cheaper than
/// [`Scenario::step`] for particle beliefs because weights are modified in
/// place and restored on [`BeliefWalker::reset`].
pub(crate) struct BeliefWalker<'a> {
    scenario: &'a Scenario,
    state: BeliefState,
    t: usize,
    survival: f64,
    touched: Vec<(u32, f64)>,
}

impl<'a> BeliefWalker<'a> {
    pub(crate) fn new(scenario: &'a Scenario) -> Self {
        let state = scenario.initial_state();
        let survival = state.survival();
        BeliefWalker {
            scenario,
            state,
            t: 0,
            survival,
            touched: Vec::new(),
        }
    }

    pub(crate) fn reset(&mut self) {
        match &mut self.state {
            BeliefState::Particles(w) => {
                for &(p, old) in self.touched.iter().rev() {
                    w[p as usize] = old;
                }
            }
            BeliefState::Cells(b) => *b = self.scenario.prior.clone(),
        }
        self.touched.clear();
        self.t = 0;
        self.survival = self.state.survival();
    }

    /// Applies the motion for the next step; masses are then a priori.
    pub(crate) fn advance(&mut self) -> Result<()> {
        self.t += 1;
        if let BeliefState::Cells(b) = &self.state {
            let next = propagate(b, &self.scenario.motion, self.t)?;
            self.state = BeliefState::Cells(next);
        } else if let MotionModel::Particles(e) = &self.scenario.motion {
            if self.t > e.horizon() {
                return Err(Error::Config(format!(
                    "particle trajectories end at step {}, step {} requested",
                    e.horizon(),
                    self.t
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn mass(&self, v: VertexId) -> f64 {
        self.scenario.mass_at(&self.state, v, self.t)
    }

    /// Searches `v` at the current step; returns the survival afterwards.
    pub(crate) fn observe(&mut self, v: VertexId) -> f64 {
        let removed = match (&mut self.state, &self.scenario.motion) {
            (BeliefState::Particles(w), MotionModel::Particles(e)) => {
                let q = self.scenario.sensor.q(v);
                let mut removed = 0.0;
                for &p in e.members(v, self.t) {
                    let w = &mut w[p as usize];
                    self.touched.push((p, *w));
                    let r = q * *w;
                    *w -= r;
                    removed += r;
                }
                removed
            }
            (state, _) => self.scenario.observe(state, v, self.t),
        };
        self.survival -= removed;
        self.survival
    }
}
