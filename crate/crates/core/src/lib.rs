//! Temporal multi-layer graphs with structural analytics, network
//! optimization, spectral partitioning, seeded scenario generators and a
//! cross-domain resource-allocation optimizer.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph_core`]: event-sourced `M(t) = (G_1(t), ..., G_k(t))` container,
//!   snapshots, layer projections and the JSON/DOT interchange formats.
//! - [`analytics`]: centralities, clustering, components and BFS.
//! - [`netopt`]: shortest paths, max-flow/min-cut, MST, redundancy
//!   augmentation, load balancing, DAG scheduling and M/M/1 latency.
//! - [`partition`]: Laplacian construction and spectral bisection.
//! - [`crossdomain_opt`]: sigmoid utilities, shared-link and energy models,
//!   interaction terms and the isolated-vs-coupled optimizer.
//! - [`scenario`]: seeded generators and replica/consensus simulations.

pub mod analytics;
pub mod crossdomain_opt;
pub mod graph_core;
pub mod netopt;
pub mod partition;
pub mod scenario;

pub use graph_core::{
    AttrValue, Direction, EdgeId, EdgeRecord, GraphError, GraphView, Layer, LayerId, Role,
    SnapshotView, TemporalMultiLayerGraph, Timestamp, VertexId, VertexRecord, ViewEdge,
};
