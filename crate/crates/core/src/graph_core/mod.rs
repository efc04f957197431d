//! Event-sourced temporal multi-layer graph.
//!
//! `M(t) = (G_1(t), ..., G_k(t))`: each layer holds a set of interactions;
//! vertices may belong to several layers; edges are intra-layer (both
//! endpoints in one layer) or inter-layer (`src` in `layer_src`, `dst` in
//! `layer_dst`). Every record carries a half-open validity interval
//! `[t_start, t_end)` and [`TemporalMultiLayerGraph::snapshot_at`] returns
//! the records covering one tick.

mod error;
pub mod io;
mod snapshot;
mod temporal;
mod types;
mod view;

pub use error::GraphError;
pub use io::{
    export_json, import_json, layer_to_dot, snapshot_to_dot, DotStyle, GraphDocument,
    INTERCHANGE_VERSION,
};
pub use snapshot::{BipartiteCheck, Direction, SnapshotView};
pub use temporal::{EntityRef, GraphEvent, NewEdge, TemporalMultiLayerGraph};
pub use types::{
    AttrValue, EdgeId, EdgeRecord, Layer, LayerId, Role, Timestamp, VertexId, VertexRecord,
};
pub use view::{GraphView, ViewEdge};
