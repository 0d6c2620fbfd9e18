//! Pareto-optimal shortest paths in multimodal networks modelled as weighted
//! coloured-edge graphs.
//!
//! * [`graph`]: coloured multigraphs, weight vectors and the dominance order.
//! * [`solver`]: the label-setting multimodal Dijkstra search.
//! * [`oracle`]: brute-force enumeration used as ground truth.
//! * [`generator`]: seeded random instances.
//! * [`analysis`]: cost re-evaluation, crossover breakpoints, scaling experiments.
//! * [`ingest`]: clustering per-mode junction layers into one graph.
//! * [`cli`]: the `mmpareto` command line.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod format;
pub mod generator;
pub mod graph;
pub mod ingest;
pub mod oracle;
pub mod solver;

pub use error::{Error, Result};
pub use graph::{
    ColourId, ColouredGraph, Dominance, Edge, EdgeId, GraphBuilder, PathLabel, VertexId, Weight,
    WeightVector,
};
pub use solver::{solve, ParetoSet, SolveOptions, SolveStats, Solution};
