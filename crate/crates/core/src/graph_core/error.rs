use thiserror::Error;

use super::types::{EdgeId, LayerId, Timestamp, VertexId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("layer name {0:?} is already registered")]
    DuplicateLayer(String),
    #[error("layer id {0} is already registered")]
    DuplicateLayerId(u16),
    #[error("unknown {0}")]
    UnknownLayer(LayerId),
    #[error("unknown layer name {0:?}")]
    UnknownLayerName(String),
    #[error("vertex must belong to at least one layer")]
    EmptyLayerSet,
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("vertex {vertex} is not active at {at}")]
    VertexNotActive { vertex: VertexId, at: Timestamp },
    #[error("edge {edge}: endpoint {vertex} is not a member of {layer}")]
    LayerMembership {
        edge: EdgeId,
        vertex: VertexId,
        layer: LayerId,
    },
    #[error("edge {edge}: weight {weight} must be finite and non-negative")]
    InvalidWeight { edge: EdgeId, weight: f64 },
    #[error("{entity} is already retired")]
    AlreadyRetired { entity: String },
    #[error("{entity} cannot be retired at {at}: it starts at {start}")]
    RetireBeforeStart {
        entity: String,
        at: Timestamp,
        start: Timestamp,
    },
    #[error("vertex {vertex} cannot be retired at {at}: incident edge {edge} is active after that tick")]
    EdgeOutlivesVertex {
        vertex: VertexId,
        edge: EdgeId,
        at: Timestamp,
    },
    #[error("role sets overlap on {0}")]
    OverlappingRoles(String),
    #[error("edge {edge} references missing endpoint {vertex}")]
    DanglingEdge { edge: EdgeId, vertex: VertexId },
    #[error("unsupported interchange version {0}")]
    UnsupportedVersion(u32),
    #[error("invalid interchange document: {0}")]
    Parse(String),
}
