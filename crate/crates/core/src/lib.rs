//! Structural graph algorithms at desk scale: multigraphs with parallel
//! edges and loops, blocks and block trees, disjoint path systems,
//! separations with the pointedness calculus, rooted tree-decompositions and
//! their refinement, topological-minor search (plain, labelled and rooted),
//! strips and pseudo-edge-cuts, decorated trees, and assemblage encodings
//! with the simulation order.
//!
//! Everything is exact and exhaustive where it has to be; size guards keep
//! the exponential pieces honest.

pub mod blocks;
pub mod corpus;
pub mod decomp;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod assemblage;
pub mod decorated;
pub mod paths;
pub mod quasiorder;
pub mod realize;
pub mod refine;
pub mod separation;
pub mod strips;
pub mod suites;
pub mod topo;

pub use error::{Error, Result};
pub use graph::{Multigraph, VertexSet};
pub use separation::Separation;
