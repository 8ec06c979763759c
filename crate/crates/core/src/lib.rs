//! Solvers for the broadcast mobile assignment problem: pick a serving base
//! station for every mobile so that the summed per-station power (the largest
//! power any of its mobiles needs, operational cost included) is minimal.
//! Stations left without mobiles are switched off and cost nothing.

pub mod assignment;
pub mod collection;
pub mod distributed;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod game;
pub mod heuristics;
pub mod matrix;
pub mod power;
pub mod propagation;

pub use assignment::{cluster_cost, total_cost, Assignment, OpStats, SolveResult};
pub use collection::{reduce_collection, CandidateSet};
pub use error::{MapError, Result};
pub use matrix::{FeasibilityReport, PowerCostMatrix};
pub use power::ExtendedPower;
