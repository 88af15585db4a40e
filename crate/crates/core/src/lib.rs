//! Simulation library for studying how tie strength shapes the structure and
//! the information flow of undirected social graphs.
//!
//! The crate has four analysis layers on top of a compact immutable graph
//! store:
//!
//! * [`graph`] — edge-list ingestion, synthetic generators, components, BFS.
//! * [`strength`] — neighborhood-overlap strength per edge, its CDF, and the
//!   degree/strength rank correlation.
//! * [`percolation`] — strength-ordered edge removal with the mean-square
//!   cluster statistic and giant-component tracking.
//! * [`diffusion`] — a push/republish cascade model whose republisher choice
//!   is biased by tie strength.
//!
//! [`runner`] wires the layers into reproducible, seedable experiments that
//! emit CSV files plus a run manifest.

pub mod diffusion;
pub mod error;
pub mod graph;
pub mod percolation;
pub mod runner;
pub mod seeding;
pub mod strength;

pub use error::{Error, Result};
pub use graph::{Graph, NodeId};
pub use strength::StrengthTable;
