//! Scenario documents, particle files and plan artifacts.

mod artifacts;
mod particles;
mod scenario_file;

pub use artifacts::{format_report, load_path, save_plan, SaveOptions};
pub use particles::{load_particles, save_particles, PARTICLE_HEADER};
pub use scenario_file::{load_scenario, parse_scenario, save_scenario};
