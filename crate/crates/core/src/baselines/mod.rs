//! Reference planners: exhaustive search, parallel-track sweeps, myopic
//! greedy and an ant colony optimiser.

mod aco;
mod greedy;
mod oracle;
mod parallel_track;

pub use aco::{aco_plan, aco_trials, median_trace, AcoParams, AcoResult};
pub(crate) use aco::median;
pub use greedy::greedy_plan;
pub use oracle::{
    brute_force_optimal, brute_force_with, count_walks, optimal_completion, Completion,
    OracleOptions, DEFAULT_WALK_CAP,
};
pub use parallel_track::{
    nearest_corner, parallel_track, prior_bounding_box, BoundingBox, Orientation,
};
