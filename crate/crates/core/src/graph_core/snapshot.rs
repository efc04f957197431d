use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::error::GraphError;
use super::types::{EdgeId, EdgeRecord, Layer, LayerId, Role, Timestamp, VertexId, VertexRecord};
use super::view::{GraphView, ViewEdge};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
    Both,
}

/// Outcome of [`SnapshotView::validate_bipartite`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BipartiteCheck {
    pub is_bipartite: bool,
    pub violations: Vec<EdgeId>,
}

/// Immutable picture of `M(t)`: every layer, vertex and edge active at one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotView {
    time: Timestamp,
    layers: Vec<Layer>,
    vertices: BTreeMap<VertexId, VertexRecord>,
    edges: Vec<EdgeRecord>,
}

impl SnapshotView {
    pub(crate) fn new(
        time: Timestamp,
        layers: Vec<Layer>,
        vertices: BTreeMap<VertexId, VertexRecord>,
        mut edges: Vec<EdgeRecord>,
    ) -> Self {
        edges.sort_by_key(|e| e.id);
        SnapshotView {
            time,
            layers,
            vertices,
            edges,
        }
    }

    pub fn time(&self) -> Timestamp {
        self.time
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer_by_name(&self, name: &str) -> Result<LayerId, GraphError> {
        self.layers
            .iter()
            .find(|l| l.name == name)
            .map(|l| l.id)
            .ok_or_else(|| GraphError::UnknownLayerName(name.to_string()))
    }

    fn check_layer(&self, layer: LayerId) -> Result<(), GraphError> {
        if self.layers.iter().any(|l| l.id == layer) {
            Ok(())
        } else {
            Err(GraphError::UnknownLayer(layer))
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexRecord> {
        self.vertices.values()
    }

    pub fn vertex(&self, id: VertexId) -> Option<&VertexRecord> {
        self.vertices.get(&id)
    }

    pub fn contains_vertex(&self, id: VertexId) -> bool {
        self.vertices.contains_key(&id)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// All active edges, ascending by id.
    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    /// `V_i(t)`, ascending by id.
    pub fn layer_vertices(&self, layer: LayerId) -> impl Iterator<Item = &VertexRecord> {
        self.vertices
            .values()
            .filter(move |v| v.layers.contains(&layer))
    }

    pub fn intra_layer_edges(&self, layer: LayerId) -> impl Iterator<Item = &EdgeRecord> {
        self.edges
            .iter()
            .filter(move |e| e.layer_src == layer && e.layer_dst == layer)
    }

    pub fn inter_layer_edges(&self) -> impl Iterator<Item = &EdgeRecord> {
        self.edges.iter().filter(|e| !e.is_intra_layer())
    }

    /// `G_i(V_i, E_i)`: members of `layer` and its intra-layer edges only.
    pub fn layer_subgraph(&self, layer: LayerId) -> Result<GraphView, GraphError> {
        self.check_layer(layer)?;
        let vertices = self.layer_vertices(layer).map(|v| v.id).collect();
        let edges = self.intra_layer_edges(layer).map(ViewEdge::from).collect();
        Ok(GraphView::from_sorted_unchecked(vertices, edges))
    }

    /// Single graph over `V(t)` carrying every intra- and inter-layer edge.
    pub fn flatten(&self) -> GraphView {
        let vertices = self.vertices.keys().copied().collect();
        let edges = self.edges.iter().map(ViewEdge::from).collect();
        GraphView::from_sorted_unchecked(vertices, edges)
    }

    /// Deduplicated neighbors of `v`, ascending by id. With a layer filter only
    /// intra-layer edges of that layer are followed.
    pub fn neighbors(
        &self,
        v: VertexId,
        direction: Direction,
        layer: Option<LayerId>,
    ) -> Result<Vec<VertexId>, GraphError> {
        if !self.contains_vertex(v) {
            return Err(GraphError::UnknownVertex(v));
        }
        if let Some(layer) = layer {
            self.check_layer(layer)?;
        }
        let mut out = BTreeSet::new();
        for e in &self.edges {
            if let Some(layer) = layer {
                if e.layer_src != layer || e.layer_dst != layer {
                    continue;
                }
            }
            let forward = e.src == v;
            let backward = e.dst == v;
            let take_out = !e.directed || matches!(direction, Direction::Out | Direction::Both);
            let take_in = !e.directed || matches!(direction, Direction::In | Direction::Both);
            if forward && take_out {
                out.insert(e.dst);
            }
            if backward && take_in {
                out.insert(e.src);
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Checks that every intra-layer edge of `layer` joins a `part_a` vertex
    /// to a `part_b` vertex (in either orientation).
    pub fn validate_bipartite(
        &self,
        layer: LayerId,
        part_a: &BTreeSet<Role>,
        part_b: &BTreeSet<Role>,
    ) -> Result<BipartiteCheck, GraphError> {
        self.check_layer(layer)?;
        let overlap: Vec<_> = part_a.intersection(part_b).map(|r| r.as_str()).collect();
        if !overlap.is_empty() {
            return Err(GraphError::OverlappingRoles(overlap.join(",")));
        }
        let in_a = |v: VertexId| self.vertices[&v].has_any_role(part_a);
        let in_b = |v: VertexId| self.vertices[&v].has_any_role(part_b);
        let violations: Vec<EdgeId> = self
            .intra_layer_edges(layer)
            .filter(|e| !((in_a(e.src) && in_b(e.dst)) || (in_b(e.src) && in_a(e.dst))))
            .map(|e| e.id)
            .collect();
        Ok(BipartiteCheck {
            is_bipartite: violations.is_empty(),
            violations,
        })
    }
}
