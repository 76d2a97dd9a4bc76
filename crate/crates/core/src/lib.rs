//! Global congestion avoidance routing.
//!
//! A load-annotated network is filtered to its congested core (links whose
//! relative load exceeds a threshold). Dense subgraphs of that core, under a
//! pluggable density measure, are treated as congested subnetworks; routes
//! are found that avoid every one of them, not merely individual hot links.
//!
//! The [`oracle`] module recomputes every claim by exhaustive enumeration on
//! small graphs.

pub mod dense;
pub mod density;
pub mod error;
pub mod flow;
pub mod graph;
pub mod io;
pub mod mincut;
pub mod oracle;
pub mod routing;
pub mod sim;

pub mod cli;

pub use dense::{
    core_decomposition, degeneracy, dense_cover, densest_edge_density_subgraph, k_core, max_density, maximal_k_edge_connected,
    CoreDecomposition, DenseCover, DensestSubgraph, Exactness,
};
pub use density::{
    edge_connectivity, edge_density, eval_measure, k_clique_density, min_degree, squared_degree_density, DensityValue, Measure, MeasureExpr,
};
pub use error::{Error, Result};
pub use graph::{congested_core, CongestedCore, Graph, LoadedGraph, NodeId, SubgraphRef};
pub use io::{parse_graph, GraphFormat};
pub use routing::{
    cap_route, density_index, dijkstra, route_with_density_index, DensityIndexResult, NoPathReason, Path, RouteOutcome, RouteResult,
    WeightPolicy,
};
