//! Round-accounted simulation of CONGEST minimum cut algorithms: sparse
//! connectivity certificates, tripartition decomposition, cluster contraction
//! and 2-respecting tree cuts, with sequential oracles for checking.

pub mod certificate;
pub mod decomposition;
pub mod charge;
pub mod config;
pub mod contraction;
pub mod error;
pub mod graph;
pub mod mst;
pub mod oracle;
pub mod pipeline;
pub mod rng;
pub mod scalar;
pub mod sim;
pub mod tree;
pub mod treecut;

pub use config::Config;
pub use error::{Error, Result};
pub use graph::{CutResult, Edge, Graph, VertexSet};
pub use scalar::Weight;
pub use tree::RootedTree;

/// Unit-weight graphs.
pub type UnitGraph = Graph<u32>;
/// Weighted graphs with weights up to `n^4` and sums up to `u64::MAX`.
pub type WeightedGraph = Graph<u64>;
pub type WeightedCut = CutResult<u64>;
