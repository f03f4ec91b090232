//! Budgeted probabilistic search planning.
//!
//! Given a prior over a (possibly drifting) target's cell, a motion model,
//! an imperfect sensor, a start cell and a step budget, [`plan_asar`] finds
//! a searcher walk whose truncated mean time to detection is within a
//! chosen factor `ε >= 1` of the best possible walk.
//!
//! Modules:
//! - [`domain`]: grid, beliefs, motion and sensor models, scenarios
//! - [`objective`]: the truncated MTTD objective and detection statistics
//! - [`heuristic`]: hop distances and the relaxed greedy lower bound
//! - [`planner`]: the ε-weighted best-first planner
//! - [`baselines`]: exhaustive oracle, parallel track, greedy, ant colony
//! - [`evaluation`]: synthetic drift ensembles and Monte Carlo validation
//! - [`io`]: scenario, particle and plan file formats
//! - [`bench`]: comparison reports over a scenario corpus
//! - [`corpus`]: seeded random scenario generators

pub mod baselines;
pub mod bench;
pub mod corpus;
pub mod domain;
pub mod error;
pub mod evaluation;
pub mod heuristic;
pub mod io;
pub mod objective;
pub mod planner;

pub use domain::{Belief, BeliefState, Grid, MotionModel, ParticleEnsemble, Scenario, SensorModel, VertexId};
pub use error::{Error, Result};
pub use objective::{path_objective, ObjectiveTrace, Path};
pub use planner::{plan_asar, Plan, PlanStats};
