//! Constructive embeddings of partial edge-colourings of λK_m^h into
//! (connected) r-factorizations of λK_n^h.
//!
//! The pipeline amalgamates the `n − m` new vertices into one vertex alpha,
//! colours the amalgam in phases and then detaches alpha one vertex at a
//! time with a min-cost flow per split.

pub mod amalgam;
pub mod arithmetic;
pub mod connectivity;
pub mod detachment;
pub mod error;
pub mod io;
pub mod model;
pub mod pipelines;
pub mod verification;

pub use error::{Error, Result};
pub use model::{
    ALPHA, Color, Coloring, EdgeCopy, Instance, MultiEdge, MultiHypergraph, Vertex, complete_hypergraph,
};
