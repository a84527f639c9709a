//! Grid-world navigation with a learning classifier system.
//!
//! * [`gridworld`]: static occupancy grids, kinematics, vision, map files.
//! * [`pathfind`]: turn-aware shortest paths and the naive replanning policy.
//! * [`predicates`]: the fuzzy predicate basis and condition convolution.
//! * [`lcs`]: genes, fusion rules, genetic operators and selection.
//! * [`learning`]: potential-based rewards, episodes and generations.
//! * [`policy`]: the trained-policy text format.
//! * [`harness`]: experiment configuration and the CLI commands.

pub mod gridworld;
pub mod harness;
pub mod lcs;
pub mod learning;
pub mod pathfind;
pub mod policy;
pub mod predicates;

pub use gridworld::{
    accumulate, generate_office_map, load_map, save_map, step, visible_patch, Action, Dir, DomainEnsemble,
    FullObservation, GridDomain, ObservationMap, OfficeParams, Pos, RobotState, VisionConfig,
};
pub use lcs::{FusionRule, Gene, GeneSet, LcsConfig};
pub use learning::{CostReport, EpisodeResult, LearningConfig, Potential, Trainer};
pub use pathfind::{distance_bounds, naive_policy, shortest_path, GridView, PathResult, UnknownMode};
pub use predicates::{build_registry, convolve, PredicateRegistry, PredicateVector, RegistryConfig};
