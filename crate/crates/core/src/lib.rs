//! Many-objective grid pathfinding benchmark toolkit.
//!
//! The crate generates named lattice routing instances, evaluates paths
//! under five minimization objectives, computes exact Pareto fronts by
//! exhaustive search, runs evolutionary many-objective solvers against
//! those fronts and scores the results with the IGD+ indicator and
//! rank-based significance tests.
//!
//! Instances are addressed by compact names such as
//! `ASLETISMAC_CH_X10_Y10_P1_K2_BF`; see [`instance`] for the grammar. The
//! typical pipeline is name -> [`instance::LatticeWorld`] ->
//! [`graph::RoutingGraph`] -> [`enumerate::true_front`] or [`evolve::run`].

pub mod enumerate;
pub mod evolve;
pub mod graph;
pub mod instance;
pub mod io;
pub mod metrics;
pub mod objectives;
pub mod pareto;

pub use graph::{NodeId, RoutingGraph};
pub use instance::{InstanceSpec, LatticeWorld};
pub use objectives::{ObjectiveVector, PathGenome};
pub use pareto::ParetoArchive;
