//! Underspecified graph queries over in-memory property graphs.
//!
//! The pipeline: author a [`query::QueryRepresentation`] (directly or via
//! the [`dsl`]), expand it into an [`instantiate::InstantiationLattice`],
//! run lattice steps progressively with [`execute`], and emit Cypher for
//! any instance with [`translate`].

pub mod diagnostics;
pub mod dsl;
pub mod execute;
pub mod fixtures;
pub mod graph;
pub mod instantiate;
pub mod matcher;
pub mod motif;
pub mod pattern;
pub mod query;
pub mod testkit;
pub mod translate;
