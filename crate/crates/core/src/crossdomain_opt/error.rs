use thiserror::Error;

use super::model::{DomainId, LinkId, NodeId};
use crate::graph_core::VertexId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptError {
    #[error("scenario parse error: {0}")]
    Parse(String),
    #[error("scenario declares no domains")]
    NoDomains,
    #[error("duplicate {kind} id {id}")]
    DuplicateId { kind: &'static str, id: u64 },
    #[error("domain {id}: {reason}")]
    InvalidDomain { id: DomainId, reason: String },
    #[error("link {id}: {reason}")]
    InvalidLink { id: LinkId, reason: String },
    #[error("node {id}: {reason}")]
    InvalidNode { id: NodeId, reason: String },
    #[error("node {node} references unknown link {link}")]
    UnknownLink { node: NodeId, link: LinkId },
    #[error("unknown domain {0}")]
    UnknownDomain(DomainId),
    #[error("interaction terms need two distinct domains, got {0} twice")]
    SameDomain(DomainId),
    #[error("coupling edge ({m}, {n}): {reason}")]
    InvalidCoupling {
        m: DomainId,
        n: DomainId,
        reason: String,
    },
    #[error("allocation has {got} entries, scenario has {expected} domains")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("infeasible scenario: lower-bound allocation exceeds capacity of link {link} by {excess}")]
    Infeasible { link: LinkId, excess: f64 },
    #[error("domain map references unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("vertex {vertex} is not a shared resource but belongs to domains {m} and {n}")]
    OverlappingDomains {
        vertex: VertexId,
        m: DomainId,
        n: DomainId,
    },
}
