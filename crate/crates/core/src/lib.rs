//! Local hidden-variable models for two-party detector experiments.
//!
//! An experiment class fixes how many detectors each party reads out and how
//! many measurement settings each can choose. Deterministic strategies map
//! to 0/1 vertices; their convex hull is the local polytope. This crate
//! enumerates the vertices, converts them to facet inequalities exactly, and
//! decides membership of measured tables with an exact LP.

pub mod error;
mod exec;
pub mod locality;
pub mod geometry;
pub mod lp;
pub mod model;
pub mod strategies;
pub mod workbench;

pub use error::{Error, Result};
pub use locality::{test_locality, verify_local_model, LocalityVerdict};
pub use model::{ExperimentClass, OutcomePattern, ProbabilityTable, SettingsSelection};
pub use strategies::{enumerate_vertices, DeterministicStrategy, Vertex, VertexSet};

/// Exact rational used for every probability and coefficient.
pub type Rational = num_rational::BigRational;
