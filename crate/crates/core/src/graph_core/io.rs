//! JSON interchange document and Graphviz DOT rendering.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::error::GraphError;
use super::snapshot::SnapshotView;
use super::temporal::{EntityRef, TemporalMultiLayerGraph};
use super::types::{EdgeId, EdgeRecord, Layer, LayerId, VertexRecord};

pub const INTERCHANGE_VERSION: u32 = 1;

/// Top-level interchange document. Open-ended validity is an absent `t_end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub version: u32,
    pub layers: Vec<Layer>,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
}

impl GraphDocument {
    pub fn from_graph(g: &TemporalMultiLayerGraph) -> Self {
        GraphDocument {
            version: INTERCHANGE_VERSION,
            layers: g.layers().to_vec(),
            vertices: g.vertex_records().cloned().collect(),
            edges: g.edge_records().cloned().collect(),
        }
    }

    /// Document holding exactly the records of one snapshot.
    pub fn from_snapshot(s: &SnapshotView) -> Self {
        GraphDocument {
            version: INTERCHANGE_VERSION,
            layers: s.layers().to_vec(),
            vertices: s.vertices().cloned().collect(),
            edges: s.edges().to_vec(),
        }
    }

    /// Rebuilds the graph through the validating API: additions in id order,
    /// then edge retirements, then vertex retirements, each by (tick, id).
    pub fn into_graph(self) -> Result<TemporalMultiLayerGraph, GraphError> {
        if self.version != INTERCHANGE_VERSION {
            return Err(GraphError::UnsupportedVersion(self.version));
        }
        let mut g = TemporalMultiLayerGraph::new();
        let mut layers = self.layers;
        layers.sort_by_key(|l| l.id);
        for layer in &layers {
            g.create_layer_with_id(layer.id, &layer.name)?;
        }

        let mut vertices = self.vertices;
        vertices.sort_by_key(|v| v.id);
        let mut vertex_ends = Vec::new();
        for mut v in vertices {
            if let Some(end) = v.t_end.take() {
                vertex_ends.push((end, v.id));
            }
            g.insert_vertex(v)?;
        }

        let mut edges = self.edges;
        edges.sort_by_key(|e| e.id);
        let mut edge_ends = Vec::new();
        for mut e in edges {
            match e.t_end.take() {
                Some(end) => edge_ends.push((end, e.id)),
                None => {
                    // an open edge on a retired endpoint would dangle
                    for endpoint in [e.src, e.dst] {
                        if let Some(&(at, _)) = vertex_ends.iter().find(|&&(_, id)| id == endpoint) {
                            return Err(GraphError::EdgeOutlivesVertex {
                                vertex: endpoint,
                                edge: e.id,
                                at,
                            });
                        }
                    }
                }
            }
            g.insert_edge(e)?;
        }

        edge_ends.sort();
        for (t, id) in edge_ends {
            g.retire(EntityRef::Edge(id), t)?;
        }
        vertex_ends.sort();
        for (t, id) in vertex_ends {
            g.retire(EntityRef::Vertex(id), t)?;
        }
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))
    }
}

pub fn export_json(g: &TemporalMultiLayerGraph) -> String {
    GraphDocument::from_graph(g).to_json()
}

pub fn import_json(text: &str) -> Result<TemporalMultiLayerGraph, GraphError> {
    GraphDocument::from_json(text)?.into_graph()
}

/// Per-edge DOT attributes, e.g. to highlight min-cut or backup edges.
#[derive(Debug, Clone, Default)]
pub struct DotStyle {
    pub edge_colors: BTreeMap<EdgeId, String>,
}

impl DotStyle {
    pub fn highlight(mut self, edges: impl IntoIterator<Item = EdgeId>, color: &str) -> Self {
        for e in edges {
            self.edge_colors.insert(e, color.to_string());
        }
        self
    }
}

/// Renders a snapshot, one DOT cluster per layer. A vertex shared by several
/// layers is drawn in the cluster of its lowest layer and lists the others
/// in its label.
pub fn snapshot_to_dot(s: &SnapshotView, style: &DotStyle) -> String {
    render_dot(s, None, style)
}

/// Renders a single layer subgraph as one cluster.
pub fn layer_to_dot(
    s: &SnapshotView,
    layer: LayerId,
    style: &DotStyle,
) -> Result<String, GraphError> {
    if !s.layers().iter().any(|l| l.id == layer) {
        return Err(GraphError::UnknownLayer(layer));
    }
    Ok(render_dot(s, Some(layer), style))
}

fn render_dot(s: &SnapshotView, only: Option<LayerId>, style: &DotStyle) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph snapshot_t{} {{", s.time().0);
    let _ = writeln!(out, "  compound=true;");
    let names: BTreeMap<LayerId, &str> =
        s.layers().iter().map(|l| (l.id, l.name.as_str())).collect();
    for layer in s.layers() {
        if only.is_some_and(|o| o != layer.id) {
            continue;
        }
        let members: Vec<&VertexRecord> = s
            .layer_vertices(layer.id)
            .filter(|v| only.is_some() || v.layers.iter().next() == Some(&layer.id))
            .collect();
        let _ = writeln!(out, "  subgraph cluster_{} {{", layer.id.0);
        let _ = writeln!(out, "    label=\"{}\";", escape(&layer.name));
        for v in members {
            let roles: Vec<&str> = v.roles.iter().map(|r| r.as_str()).collect();
            let mut label = format!("{}\\n{}", v.id.0, roles.join(","));
            let others: Vec<&str> = v
                .layers
                .iter()
                .filter(|l| **l != layer.id)
                .filter_map(|l| names.get(l).copied())
                .collect();
            if !others.is_empty() {
                let _ = write!(label, "\\nalso: {}", others.join(","));
            }
            let _ = writeln!(out, "    v{} [label=\"{}\"];", v.id.0, escape(&label));
        }
        let _ = writeln!(out, "  }}");
    }
    let drawn: BTreeSet<_> = match only {
        Some(layer) => s.intra_layer_edges(layer).map(|e| e.id).collect(),
        None => s.edges().iter().map(|e| e.id).collect(),
    };
    for e in s.edges().iter().filter(|e| drawn.contains(&e.id)) {
        let mut attrs = vec![format!(
            "label=\"{}:{}\"",
            escape(&e.relation),
            e.weight
        )];
        if !e.directed {
            attrs.push("dir=none".to_string());
        }
        if !e.is_intra_layer() {
            attrs.push("style=dashed".to_string());
        }
        if let Some(color) = style.edge_colors.get(&e.id) {
            attrs.push(format!("color=\"{}\"", escape(color)));
            attrs.push("penwidth=2".to_string());
        }
        let _ = writeln!(
            out,
            "  v{} -> v{} [{}];",
            e.src.0,
            e.dst.0,
            attrs.join(", ")
        );
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('"', "\\\"")
}
