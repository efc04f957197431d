use std::collections::BTreeSet;

use super::error::GraphError;
use super::types::{EdgeId, EdgeRecord, VertexId};

/// Edge as seen by the analysis routines: endpoints, orientation and one
/// scalar weight whose meaning (latency, cost, capacity) the caller picks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewEdge {
    pub id: EdgeId,
    pub src: VertexId,
    pub dst: VertexId,
    pub directed: bool,
    pub weight: f64,
}

impl From<&EdgeRecord> for ViewEdge {
    fn from(e: &EdgeRecord) -> Self {
        ViewEdge {
            id: e.id,
            src: e.src,
            dst: e.dst,
            directed: e.directed,
            weight: e.weight,
        }
    }
}

/// Single-layer (or flattened) multigraph over sorted vertex ids.
///
/// Vertex positions in [`GraphView::vertices`] are the dense indices used by
/// the adjacency helpers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GraphView {
    vertices: Vec<VertexId>,
    edges: Vec<ViewEdge>,
}

impl GraphView {
    pub(crate) fn from_sorted_unchecked(vertices: Vec<VertexId>, edges: Vec<ViewEdge>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        GraphView { vertices, edges }
    }

    /// Builds a view, rejecting edges whose endpoints are not listed.
    pub fn from_parts(
        mut vertices: Vec<VertexId>,
        mut edges: Vec<ViewEdge>,
    ) -> Result<Self, GraphError> {
        vertices.sort_unstable();
        vertices.dedup();
        edges.sort_by_key(|e| e.id);
        for w in edges.windows(2) {
            if w[0].id == w[1].id {
                return Err(GraphError::DuplicateEdge(w[0].id));
            }
        }
        for e in &edges {
            for v in [e.src, e.dst] {
                if vertices.binary_search(&v).is_err() {
                    return Err(GraphError::DanglingEdge { edge: e.id, vertex: v });
                }
            }
        }
        Ok(GraphView { vertices, edges })
    }

    /// Vertices `0..n`, edge ids in list order.
    pub fn from_edge_list(n: u64, edges: &[(u64, u64, f64)], directed: bool) -> Self {
        let vertices = (0..n).map(VertexId).collect();
        let edges = edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v, w))| ViewEdge {
                id: EdgeId(i as u64),
                src: VertexId(u),
                dst: VertexId(v),
                directed,
                weight: w,
            })
            .collect();
        GraphView::from_parts(vertices, edges).expect("edge endpoints must be below n")
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[ViewEdge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index_of(v).is_some()
    }

    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&ViewEdge> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|i| &self.edges[i])
    }

    /// True when at least one edge is directed.
    pub fn is_directed(&self) -> bool {
        self.edges.iter().any(|e| e.directed)
    }

    /// Simple undirected adjacency (parallel edges and self-loops dropped),
    /// neighbor lists ascending.
    pub fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.vertices.len()];
        for e in &self.edges {
            let (u, v) = self.endpoints(e);
            if u != v {
                adj[u].insert(v);
                adj[v].insert(u);
            }
        }
        adj.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Simple out-adjacency: directed edges one way, undirected both ways.
    pub fn out_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.vertices.len()];
        for e in &self.edges {
            let (u, v) = self.endpoints(e);
            if u != v {
                adj[u].insert(v);
                if !e.directed {
                    adj[v].insert(u);
                }
            }
        }
        adj.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Dense endpoint indices of an edge belonging to this view.
    pub fn endpoints(&self, e: &ViewEdge) -> (usize, usize) {
        (
            self.index_of(e.src).expect("edge endpoint in view"),
            self.index_of(e.dst).expect("edge endpoint in view"),
        )
    }

    /// Subgraph induced by `keep` (vertices outside the view are ignored).
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> GraphView {
        let vertices = self
            .vertices
            .iter()
            .copied()
            .filter(|v| keep.contains(v))
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| keep.contains(&e.src) && keep.contains(&e.dst))
            .copied()
            .collect();
        GraphView { vertices, edges }
    }

    pub fn with_unit_weights(&self) -> GraphView {
        let edges = self
            .edges
            .iter()
            .map(|e| ViewEdge { weight: 1.0, ..*e })
            .collect();
        GraphView {
            vertices: self.vertices.clone(),
            edges,
        }
    }

    /// Same vertices and edges with every edge treated as undirected.
    pub fn as_undirected(&self) -> GraphView {
        let edges = self
            .edges
            .iter()
            .map(|e| ViewEdge {
                directed: false,
                ..*e
            })
            .collect();
        GraphView {
            vertices: self.vertices.clone(),
            edges,
        }
    }
}
