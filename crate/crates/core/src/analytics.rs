//! Structural metrics for communication layers and component analysis for
//! replica/storage layers.
//!
//! Centralities and clustering collapse parallel edges to simple adjacency
//! and ignore self-loops. Betweenness uses hop counts.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::graph_core::{GraphView, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyticsError {
    #[error("{metric} needs at least {need} vertices, view has {got}")]
    TooFewVertices {
        metric: &'static str,
        need: usize,
        got: usize,
    },
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityReport {
    pub metric: String,
    pub scores: BTreeMap<VertexId, f64>,
}

impl CentralityReport {
    pub fn score(&self, v: VertexId) -> Option<f64> {
        self.scores.get(&v).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentLabeling {
    /// Component id of each vertex: the smallest vertex id in its component.
    pub labels: BTreeMap<VertexId, VertexId>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BfsResult {
    pub order: Vec<VertexId>,
    pub distances: Vec<usize>,
}

/// `deg(v) / (n - 1)` with direction-agnostic, neighbor-deduplicated degree.
pub fn degree_centrality(g: &GraphView) -> Result<CentralityReport, AnalyticsError> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(AnalyticsError::TooFewVertices {
            metric: "degree centrality",
            need: 2,
            got: n,
        });
    }
    let adj = g.undirected_adjacency();
    let scores = g
        .vertices()
        .iter()
        .zip(&adj)
        .map(|(&v, nbrs)| (v, nbrs.len() as f64 / (n - 1) as f64))
        .collect();
    Ok(CentralityReport {
        metric: "degree".into(),
        scores,
    })
}

/// Exact normalized betweenness by dependency accumulation over one BFS per
/// source. Directed views follow edge orientation (undirected edges both ways).
pub fn betweenness_centrality(g: &GraphView) -> Result<CentralityReport, AnalyticsError> {
    let n = g.vertex_count();
    if n < 3 {
        return Err(AnalyticsError::TooFewVertices {
            metric: "betweenness centrality",
            need: 3,
            got: n,
        });
    }
    let adj = g.out_adjacency();
    let mut raw = vec![0.0f64; n];

    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut stack = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        sigma.fill(0.0);
        dist.fill(usize::MAX);
        delta.fill(0.0);
        preds.iter_mut().for_each(Vec::clear);
        stack.clear();

        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                raw[w] += delta[w];
            }
        }
    }

    // Ordered-pair accumulation. For undirected views each unordered pair is
    // counted twice, which cancels the factor 2 in (n-1)(n-2)/2.
    let norm = ((n - 1) * (n - 2)) as f64;
    let scores = g
        .vertices()
        .iter()
        .zip(raw)
        .map(|(&v, b)| (v, b / norm))
        .collect();
    Ok(CentralityReport {
        metric: "betweenness".into(),
        scores,
    })
}

/// Local clustering coefficient of `v` under the undirected interpretation.
pub fn clustering_coefficient(g: &GraphView, v: VertexId) -> Result<f64, AnalyticsError> {
    let idx = g.index_of(v).ok_or(AnalyticsError::UnknownVertex(v))?;
    let adj = g.undirected_adjacency();
    Ok(local_clustering(&adj, idx))
}

/// Clustering coefficient of every vertex.
pub fn clustering_report(g: &GraphView) -> CentralityReport {
    let adj = g.undirected_adjacency();
    let scores = g
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, local_clustering(&adj, i)))
        .collect();
    CentralityReport {
        metric: "clustering".into(),
        scores,
    }
}

fn local_clustering(adj: &[Vec<usize>], v: usize) -> f64 {
    let nbrs = &adj[v];
    let k = nbrs.len();
    if k < 2 {
        return 0.0;
    }
    let mut links = 0usize;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if adj[a].binary_search(&b).is_ok() {
                links += 1;
            }
        }
    }
    links as f64 / (k * (k - 1) / 2) as f64
}

/// Weakly connected components via BFS over the undirected adjacency.
pub fn weakly_connected_components(g: &GraphView) -> ComponentLabeling {
    let adj = g.undirected_adjacency();
    let n = g.vertex_count();
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    // vertices are sorted, so the first unvisited index is its component's minimum
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        count += 1;
        comp[start] = start;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = start;
                    queue.push_back(w);
                }
            }
        }
    }
    let vs = g.vertices();
    ComponentLabeling {
        labels: (0..n).map(|i| (vs[i], vs[comp[i]])).collect(),
        count,
    }
}

/// Breadth-first order from `root`, following edge orientation. Neighbors are
/// expanded in ascending id order; unreachable vertices are omitted.
pub fn bfs_order(g: &GraphView, root: VertexId) -> Result<BfsResult, AnalyticsError> {
    let r = g.index_of(root).ok_or(AnalyticsError::UnknownVertex(root))?;
    let adj = g.out_adjacency();
    let mut dist = vec![usize::MAX; g.vertex_count()];
    let mut order = Vec::new();
    let mut distances = Vec::new();
    let mut queue = VecDeque::from([r]);
    dist[r] = 0;
    while let Some(v) = queue.pop_front() {
        order.push(g.vertices()[v]);
        distances.push(dist[v]);
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    Ok(BfsResult { order, distances })
}

/// `metric,vertex_id,score` rows, one block per report, each sorted by vertex id.
pub fn reports_to_csv(reports: &[CentralityReport]) -> String {
    let mut out = String::from("metric,vertex_id,score\n");
    for r in reports {
        for (v, s) in &r.scores {
            let _ = writeln!(out, "{},{},{}", r.metric, v.0, s);
        }
    }
    out
}

impl ComponentLabeling {
    /// Labels as a report so they can share the CSV layout.
    pub fn as_report(&self) -> CentralityReport {
        CentralityReport {
            metric: "component".into(),
            scores: self
                .labels
                .iter()
                .map(|(v, c)| (*v, c.0 as f64))
                .collect(),
        }
    }

    pub fn same_component(&self, a: VertexId, b: VertexId) -> bool {
        match (self.labels.get(&a), self.labels.get(&b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }
}
