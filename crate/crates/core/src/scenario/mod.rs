//! Seeded generators for metaverse-shaped multilayer graphs, content version
//! histories, and the CDN, replica-consistency, consensus, trust and anomaly
//! procedures run on top of them.

mod generators;
mod sims;
mod versions;

use thiserror::Error;

use crate::graph_core::{GraphError, VertexId};

pub use generators::{
    add_cms_layer, add_network_layer, add_social_layer, gen_cms_bipartite, gen_metaverse,
    gen_network_layer, gen_social_layer, generate, uniform_demand, CmsParts, GeneratorConfig,
    NetworkParts, SCENARIOS,
};
pub use sims::{
    anomaly_scores, cdn_place_caches, consensus_sim, consistency_sim, placement_cost,
    replicate_items, trust_path, AnomalyReport, CachePlacement, ConsensusReport,
    ConsistencyReport, ItemConsistency, ReplicaPlacement, Update, DEFAULT_MAX_ROUNDS,
};
pub use versions::{Version, VersionDag};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("network generator needs at least one router")]
    ZeroRouters,
    #[error("{name} must lie in [0, 1], got {value}")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("content items need at least one admin")]
    ItemsWithoutAdmins,
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("unknown parent version {0}")]
    UnknownParent(usize),
    #[error("topology is disconnected")]
    Disconnected,
    #[error("k = {k} is outside 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("demand of {vertex} must be finite and >= 0, got {value}")]
    InvalidDemand { vertex: VertexId, value: f64 },
    #[error("replication factor {r} exceeds {nodes} storage nodes")]
    ReplicationTooHigh { r: usize, nodes: usize },
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("no initial value for {0}")]
    MissingValue(VertexId),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("no consensus after {rounds} rounds (spread {spread:e})")]
    NonConvergence { rounds: usize, spread: f64 },
    #[error("need at least {need} vertices, got {got}")]
    TooFewVertices { need: usize, got: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}
