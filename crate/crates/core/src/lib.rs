//! Dimensionality reduction as graph drawing.
//!
//! A run has three stages. [`relate`] turns a data matrix into a weighted
//! relationship graph (distances, k-NN, shared neighbors, t-SNE or UMAP
//! affinities). [`embed`] maps a graph to a 2D or 3D layout with analytic,
//! gradient or force-directed methods. [`quality`] scores the result against
//! its source. [`pipeline`] chains the three from a TOML config and [`io`]
//! handles files.

pub mod embed;
pub mod error;
pub mod graphalg;
pub mod io;
pub mod pipeline;
pub mod quality;
pub mod relate;
mod types;

pub use error::{Error, ErrorKind, Result};
pub use types::{
    distance_matrix, graph_from_matrix, matrix_from_graph, Adjacency, DataMatrix, DistanceMatrix, Edge, Layout,
    Metric, QualityReport, RelationGraph, Semantics,
};
