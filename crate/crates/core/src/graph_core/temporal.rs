use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::error::GraphError;
use super::snapshot::SnapshotView;
use super::types::{
    AttrValue, EdgeId, EdgeRecord, Layer, LayerId, Role, Timestamp, VertexId, VertexRecord,
};

/// Entity addressed by [`TemporalMultiLayerGraph::retire`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityRef {
    Vertex(VertexId),
    Edge(EdgeId),
}

/// One entry of the append-only log.
///
/// Retiring a vertex logs one `EdgeRetired` for every cascaded edge before
/// the `VertexRetired` entry, so a replay through the public API reproduces
/// the same tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphEvent {
    VertexAdded { record: VertexRecord },
    EdgeAdded { record: EdgeRecord },
    VertexRetired { id: VertexId, at: Timestamp },
    EdgeRetired { id: EdgeId, at: Timestamp },
}

impl GraphEvent {
    pub fn stamp(&self) -> Timestamp {
        match self {
            GraphEvent::VertexAdded { record } => record.t_start,
            GraphEvent::EdgeAdded { record } => record.t_start,
            GraphEvent::VertexRetired { at, .. } | GraphEvent::EdgeRetired { at, .. } => *at,
        }
    }
}

/// Parameters for a new intra- or inter-layer edge.
#[derive(Debug, Clone, PartialEq)]
pub struct NewEdge {
    pub src: VertexId,
    pub dst: VertexId,
    pub layer_src: LayerId,
    pub layer_dst: LayerId,
    pub directed: bool,
    pub weight: f64,
    pub relation: String,
    pub t_start: Timestamp,
}

impl NewEdge {
    /// Undirected edge inside one layer.
    pub fn intra(
        src: VertexId,
        dst: VertexId,
        layer: LayerId,
        weight: f64,
        relation: &str,
        t: Timestamp,
    ) -> Self {
        NewEdge {
            src,
            dst,
            layer_src: layer,
            layer_dst: layer,
            directed: false,
            weight,
            relation: relation.to_string(),
            t_start: t,
        }
    }

    pub fn directed(mut self) -> Self {
        self.directed = true;
        self
    }
}

/// Event-sourced container for a temporal multi-layer graph.
///
/// The record tables are a materialization of the log; every mutation goes
/// through validation first, then appends to the log, then updates the
/// tables. Single writer; analytics run on [`SnapshotView`]s.
#[derive(Debug, Clone, Default)]
pub struct TemporalMultiLayerGraph {
    layers: Vec<Layer>,
    log: Vec<GraphEvent>,
    vertices: BTreeMap<VertexId, VertexRecord>,
    edges: BTreeMap<EdgeId, EdgeRecord>,
    incident: BTreeMap<VertexId, BTreeSet<EdgeId>>,
    next_vertex: u64,
    next_edge: u64,
}

impl TemporalMultiLayerGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn create_layer(&mut self, name: &str) -> Result<LayerId, GraphError> {
        let next = self.layers.iter().map(|l| l.id.0 + 1).max().unwrap_or(0);
        self.create_layer_with_id(LayerId(next), name)
    }

    pub(crate) fn create_layer_with_id(
        &mut self,
        id: LayerId,
        name: &str,
    ) -> Result<LayerId, GraphError> {
        if self.layers.iter().any(|l| l.name == name) {
            return Err(GraphError::DuplicateLayer(name.to_string()));
        }
        if self.layers.iter().any(|l| l.id == id) {
            return Err(GraphError::DuplicateLayerId(id.0));
        }
        self.layers.push(Layer {
            id,
            name: name.to_string(),
        });
        self.layers.sort_by_key(|l| l.id);
        Ok(id)
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

    fn check_layer(&self, id: LayerId) -> Result<(), GraphError> {
        if self.layers.iter().any(|l| l.id == id) {
            Ok(())
        } else {
            Err(GraphError::UnknownLayer(id))
        }
    }

    pub fn add_vertex(
        &mut self,
        roles: BTreeSet<Role>,
        layers: BTreeSet<LayerId>,
        attrs: BTreeMap<String, AttrValue>,
        t_start: Timestamp,
    ) -> Result<VertexId, GraphError> {
        let id = VertexId(self.next_vertex);
        self.insert_vertex(VertexRecord {
            id,
            roles,
            layers,
            attrs,
            t_start,
            t_end: None,
        })?;
        Ok(id)
    }

    /// Shorthand for a vertex with one role in one layer and no attributes.
    pub fn add_simple_vertex(
        &mut self,
        role: Role,
        layer: LayerId,
        t_start: Timestamp,
    ) -> Result<VertexId, GraphError> {
        self.add_vertex(
            BTreeSet::from([role]),
            BTreeSet::from([layer]),
            BTreeMap::new(),
            t_start,
        )
    }

    /// Inserts a record carrying its own id; `t_end` must be `None`.
    pub(crate) fn insert_vertex(&mut self, record: VertexRecord) -> Result<(), GraphError> {
        if record.layers.is_empty() {
            return Err(GraphError::EmptyLayerSet);
        }
        for layer in &record.layers {
            self.check_layer(*layer)?;
        }
        if self.vertices.contains_key(&record.id) || record.id.0 < self.next_vertex {
            return Err(GraphError::DuplicateVertex(record.id));
        }
        debug_assert!(record.t_end.is_none());
        self.next_vertex = record.id.0 + 1;
        self.log.push(GraphEvent::VertexAdded {
            record: record.clone(),
        });
        self.incident.insert(record.id, BTreeSet::new());
        self.vertices.insert(record.id, record);
        Ok(())
    }

    pub fn add_edge(&mut self, edge: NewEdge) -> Result<EdgeId, GraphError> {
        let id = EdgeId(self.next_edge);
        self.insert_edge(EdgeRecord {
            id,
            src: edge.src,
            dst: edge.dst,
            layer_src: edge.layer_src,
            layer_dst: edge.layer_dst,
            directed: edge.directed,
            weight: edge.weight,
            relation: edge.relation,
            t_start: edge.t_start,
            t_end: None,
        })?;
        Ok(id)
    }

    pub(crate) fn insert_edge(&mut self, record: EdgeRecord) -> Result<(), GraphError> {
        if self.edges.contains_key(&record.id) || record.id.0 < self.next_edge {
            return Err(GraphError::DuplicateEdge(record.id));
        }
        if !record.weight.is_finite() || record.weight < 0.0 {
            return Err(GraphError::InvalidWeight {
                edge: record.id,
                weight: record.weight,
            });
        }
        self.check_layer(record.layer_src)?;
        self.check_layer(record.layer_dst)?;
        for (vertex, layer) in [
            (record.src, record.layer_src),
            (record.dst, record.layer_dst),
        ] {
            let v = self
                .vertices
                .get(&vertex)
                .ok_or(GraphError::DanglingEdge {
                    edge: record.id,
                    vertex,
                })?;
            // a retired endpoint would leave the open-ended edge dangling
            if !v.active_at(record.t_start) || v.t_end.is_some() {
                return Err(GraphError::VertexNotActive {
                    vertex,
                    at: record.t_start,
                });
            }
            if !v.layers.contains(&layer) {
                return Err(GraphError::LayerMembership {
                    edge: record.id,
                    vertex,
                    layer,
                });
            }
        }
        self.next_edge = record.id.0 + 1;
        self.log.push(GraphEvent::EdgeAdded {
            record: record.clone(),
        });
        self.incident.entry(record.src).or_default().insert(record.id);
        self.incident.entry(record.dst).or_default().insert(record.id);
        self.edges.insert(record.id, record);
        Ok(())
    }

    /// Ends the validity of a vertex or edge at `t` (exclusive). Retiring a
    /// vertex retires every still-open incident edge at the same tick.
    pub fn retire(&mut self, entity: EntityRef, t: Timestamp) -> Result<(), GraphError> {
        match entity {
            EntityRef::Edge(id) => {
                self.check_edge_retirable(id, t)?;
                self.apply_edge_retirement(id, t);
                Ok(())
            }
            EntityRef::Vertex(id) => {
                let v = self.vertices.get(&id).ok_or(GraphError::UnknownVertex(id))?;
                if v.t_end.is_some() {
                    return Err(GraphError::AlreadyRetired {
                        entity: id.to_string(),
                    });
                }
                if t <= v.t_start {
                    return Err(GraphError::RetireBeforeStart {
                        entity: id.to_string(),
                        at: t,
                        start: v.t_start,
                    });
                }
                let mut cascade = Vec::new();
                for eid in &self.incident[&id] {
                    let e = &self.edges[eid];
                    match e.t_end {
                        Some(end) if end <= t => {}
                        Some(_) => {
                            return Err(GraphError::EdgeOutlivesVertex {
                                vertex: id,
                                edge: *eid,
                                at: t,
                            })
                        }
                        None if e.t_start >= t => {
                            return Err(GraphError::EdgeOutlivesVertex {
                                vertex: id,
                                edge: *eid,
                                at: t,
                            })
                        }
                        None => cascade.push(*eid),
                    }
                }
                for eid in cascade {
                    self.apply_edge_retirement(eid, t);
                }
                self.log.push(GraphEvent::VertexRetired { id, at: t });
                self.vertices.get_mut(&id).expect("checked above").t_end = Some(t);
                Ok(())
            }
        }
    }

    fn check_edge_retirable(&self, id: EdgeId, t: Timestamp) -> Result<(), GraphError> {
        let e = self.edges.get(&id).ok_or(GraphError::UnknownEdge(id))?;
        if e.t_end.is_some() {
            return Err(GraphError::AlreadyRetired {
                entity: id.to_string(),
            });
        }
        if t <= e.t_start {
            return Err(GraphError::RetireBeforeStart {
                entity: id.to_string(),
                at: t,
                start: e.t_start,
            });
        }
        Ok(())
    }

    fn apply_edge_retirement(&mut self, id: EdgeId, t: Timestamp) {
        self.log.push(GraphEvent::EdgeRetired { id, at: t });
        self.edges.get_mut(&id).expect("edge exists").t_end = Some(t);
    }

    /// Materializes every record whose validity interval covers `t`.
    pub fn snapshot_at(&self, t: Timestamp) -> SnapshotView {
        let vertices = self
            .vertices
            .values()
            .filter(|v| v.active_at(t))
            .map(|v| (v.id, v.clone()))
            .collect();
        let edges = self
            .edges
            .values()
            .filter(|e| e.active_at(t))
            .cloned()
            .collect();
        SnapshotView::new(t, self.layers.clone(), vertices, edges)
    }

    pub fn events(&self) -> &[GraphEvent] {
        &self.log
    }

    /// Rebuilds a graph by applying `events` in order through the validating API.
    pub fn replay(layers: &[Layer], events: &[GraphEvent]) -> Result<Self, GraphError> {
        let mut g = TemporalMultiLayerGraph::new();
        for layer in layers {
            g.create_layer_with_id(layer.id, &layer.name)?;
        }
        for event in events {
            match event {
                GraphEvent::VertexAdded { record } => g.insert_vertex(record.clone())?,
                GraphEvent::EdgeAdded { record } => g.insert_edge(record.clone())?,
                GraphEvent::VertexRetired { id, at } => g.retire(EntityRef::Vertex(*id), *at)?,
                GraphEvent::EdgeRetired { id, at } => {
                    // cascaded retirements were logged ahead of their vertex
                    g.retire(EntityRef::Edge(*id), *at)?
                }
            }
        }
        Ok(g)
    }

    pub fn vertex(&self, id: VertexId) -> Option<&VertexRecord> {
        self.vertices.get(&id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&EdgeRecord> {
        self.edges.get(&id)
    }

    /// All vertex records ever created, ascending by id.
    pub fn vertex_records(&self) -> impl Iterator<Item = &VertexRecord> {
        self.vertices.values()
    }

    pub fn edge_records(&self) -> impl Iterator<Item = &EdgeRecord> {
        self.edges.values()
    }

    /// Latest stamp in the log, or `Timestamp(0)` for an empty log.
    pub fn latest_stamp(&self) -> Timestamp {
        self.log
            .iter()
            .map(GraphEvent::stamp)
            .max()
            .unwrap_or_default()
    }

    /// Same layers and same record tables, regardless of log ordering.
    pub fn same_state(&self, other: &Self) -> bool {
        self.layers == other.layers && self.vertices == other.vertices && self.edges == other.edges
    }
}
