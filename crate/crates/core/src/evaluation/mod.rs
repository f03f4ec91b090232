//! Synthetic drift ensembles and Monte Carlo checks of planned objectives.

mod drift;
mod monte_carlo;

pub use drift::{synth_drift, DriftParams};
pub use monte_carlo::{monte_carlo_mttd, sample_trajectory, EvalReport};
