//! Analysis engine for the networked power allocation game.
//!
//! Countries split their total power between reserve, support for friends and
//! offense against adversaries. A country is safe, precarious or unsafe as its
//! support exceeds, equals or falls short of the threat against it. This crate
//! evaluates allocations exactly, verifies pure Nash equilibria, builds the
//! equilibria known to exist for complete and bipartite adversary graphs, checks
//! the structural survival conditions, and enumerates grid equilibria on small
//! instances for cross-validation.

pub mod analysis;
pub mod cli;
pub mod constructors;
pub mod equilibrium;
pub mod fixtures;
pub mod model;
pub mod oracle;
pub mod power;
pub mod preference;
pub mod scenario;

pub use equilibrium::{
    best_deviation, is_nash, same_equilibrium_class, DeviationOutcome, NashReport,
};
pub use model::{
    validate_allocation, validate_environment, AllocationMatrix, Environment, EnvironmentSpec,
    StateVector, SurvivalState,
};
pub use power::Power;
pub use preference::DeviationRule;
