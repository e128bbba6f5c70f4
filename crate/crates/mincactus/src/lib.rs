//! Maximal isolating mincuts, Steiner cactus and Steiner hypercactus
//! representations of weighted graphs and hypergraphs, with brute-force
//! oracles and two downstream applications (connectivity-augmentation value
//! and an incremental hypergraph mincut maintainer).
//!
//! The library is organized around a divide-and-conquer construction driven
//! by maximal isolating mincuts: per terminal set, per-terminal mincuts that
//! are inclusion-maximal rather than minimal, computed with polylogarithmic
//! batches of max-flow calls. The cactus pipeline uses them to find split
//! collections whose induced decompositions shrink geometrically.
//!
//! See the crate examples for runnable entry points into each capability,
//! and the `mincactus` binary for the file-based CLI.

pub mod apps;
pub mod cactus;
pub mod config;
pub mod error;
pub mod graph;
pub mod hyper;
pub mod io;
pub mod isolating;
pub mod maxflow;
pub mod oracle;
pub mod steiner;
mod system;

pub use config::Config;
pub use error::{Error, Result};
pub use graph::{Cut, Weight, WeightedGraph, WeightedHypergraph};
