use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::analytics::weakly_connected_components;
use crate::graph_core::{GraphView, VertexId};

/// Hop distances from `src` (index) over the undirected adjacency;
/// `usize::MAX` marks unreachable vertices.
fn hops_from(adj: &[Vec<usize>], src: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

fn require_connected(g: &GraphView) -> Result<(), ScenarioError> {
    if g.vertex_count() > 0 && weakly_connected_components(g).count != 1 {
        return Err(ScenarioError::Disconnected);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachePlacement {
    /// In the order the greedy rule picked them.
    pub caches: Vec<VertexId>,
    pub expected_hops: f64,
    /// Expected hops after each pick.
    pub cost_by_step: Vec<f64>,
}

fn demand_vector(
    g: &GraphView,
    demand: &BTreeMap<VertexId, f64>,
) -> Result<Vec<f64>, ScenarioError> {
    for (&v, &d) in demand {
        if !g.contains(v) {
            return Err(ScenarioError::UnknownVertex(v));
        }
        if !(d >= 0.0) || !d.is_finite() {
            return Err(ScenarioError::InvalidDemand { vertex: v, value: d });
        }
    }
    Ok(g
        .vertices()
        .iter()
        .map(|v| demand.get(v).copied().unwrap_or(0.0))
        .collect())
}

fn expected(weighted: f64, total: f64) -> f64 {
    if total > 0.0 {
        weighted / total
    } else {
        0.0
    }
}

/// Demand-weighted mean hop distance to the nearest cache. Vertices without
/// a demand entry weigh 0.
pub fn placement_cost(
    g: &GraphView,
    caches: &[VertexId],
    demand: &BTreeMap<VertexId, f64>,
) -> Result<f64, ScenarioError> {
    require_connected(g)?;
    let d = demand_vector(g, demand)?;
    let adj = g.undirected_adjacency();
    let mut nearest = vec![usize::MAX; g.vertex_count()];
    for &c in caches {
        let ci = g.index_of(c).ok_or(ScenarioError::UnknownVertex(c))?;
        for (n, h) in nearest.iter_mut().zip(hops_from(&adj, ci)) {
            *n = (*n).min(h);
        }
    }
    if caches.is_empty() {
        return Err(ScenarioError::KOutOfRange {
            k: 0,
            n: g.vertex_count(),
        });
    }
    let weighted: f64 = d.iter().zip(&nearest).map(|(w, &h)| w * h as f64).sum();
    Ok(expected(weighted, d.iter().sum()))
}

/// Greedy k-median on hop distance: each step adds the vertex that most
/// lowers the demand-weighted distance to the nearest cache (ties: smallest
/// id).
pub fn cdn_place_caches(
    g: &GraphView,
    k: usize,
    demand: &BTreeMap<VertexId, f64>,
) -> Result<CachePlacement, ScenarioError> {
    let n = g.vertex_count();
    if k == 0 || k > n {
        return Err(ScenarioError::KOutOfRange { k, n });
    }
    require_connected(g)?;
    let d = demand_vector(g, demand)?;
    let total: f64 = d.iter().sum();
    let adj = g.undirected_adjacency();
    let dist: Vec<Vec<usize>> = (0..n).map(|s| hops_from(&adj, s)).collect();
    let mut nearest = vec![usize::MAX; n];
    let mut chosen = vec![false; n];
    let mut caches = Vec::with_capacity(k);
    let mut cost_by_step = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(f64, usize)> = None;
        for c in (0..n).filter(|&c| !chosen[c]) {
            let cost: f64 = (0..n)
                .map(|v| d[v] * nearest[v].min(dist[c][v]) as f64)
                .sum();
            if best.map_or(true, |(b, _)| cost < b) {
                best = Some((cost, c));
            }
        }
        let (cost, c) = best.expect("k <= n leaves a candidate");
        chosen[c] = true;
        for v in 0..n {
            nearest[v] = nearest[v].min(dist[c][v]);
        }
        caches.push(g.vertices()[c]);
        cost_by_step.push(expected(cost, total));
    }
    Ok(CachePlacement {
        caches,
        expected_hops: *cost_by_step.last().expect("k >= 1"),
        cost_by_step,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicaPlacement {
    pub factor: usize,
    pub replicas: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

impl ReplicaPlacement {
    pub fn load(&self) -> BTreeMap<VertexId, usize> {
        let mut out = BTreeMap::new();
        for nodes in self.replicas.values() {
            for &n in nodes {
                *out.entry(n).or_insert(0) += 1;
            }
        }
        out
    }
}

/// Slots are dealt round-robin: item `i` goes to nodes `(i*r + j) mod N`,
/// `j < r`, over nodes sorted by id, so per-node load differs by at most one.
pub fn replicate_items(
    items: &[VertexId],
    nodes: &[VertexId],
    r: usize,
) -> Result<ReplicaPlacement, ScenarioError> {
    let mut sorted: Vec<VertexId> = nodes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if r > sorted.len() {
        return Err(ScenarioError::ReplicationTooHigh {
            r,
            nodes: sorted.len(),
        });
    }
    let replicas = items
        .iter()
        .enumerate()
        .map(|(i, &item)| {
            let set = (0..r).map(|j| sorted[(i * r + j) % sorted.len()]).collect();
            (item, set)
        })
        .collect();
    Ok(ReplicaPlacement {
        factor: r,
        replicas,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Update {
    pub item: VertexId,
    pub node: VertexId,
    pub version: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ItemConsistency {
    Converged { rounds: usize, version: u64 },
    Divergent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub items: BTreeMap<VertexId, ItemConsistency>,
    /// Number of rounds simulated until no value changed.
    pub rounds: usize,
    /// Items whose replicas agree after each round, starting at round 0.
    pub agreeing_by_round: Vec<usize>,
}

/// Max-version propagation. Every topology vertex relays versions; in each
/// synchronous round a vertex adopts the largest version among itself and
/// its neighbors. Replicas start at version 0 before the updates apply.
pub fn consistency_sim(
    placement: &ReplicaPlacement,
    topology: &GraphView,
    updates: &[Update],
) -> Result<ConsistencyReport, ScenarioError> {
    let n = topology.vertex_count();
    let idx = |v: VertexId| topology.index_of(v).ok_or(ScenarioError::UnknownVertex(v));
    let items: Vec<VertexId> = placement.replicas.keys().copied().collect();
    let mut replica_idx = Vec::with_capacity(items.len());
    for item in &items {
        let set: Vec<usize> = placement.replicas[item]
            .iter()
            .map(|&v| idx(v))
            .collect::<Result<_, _>>()?;
        replica_idx.push(set);
    }
    // state[i][v]: version of item i held at vertex v
    let mut state = vec![vec![0u64; n]; items.len()];
    for u in updates {
        let i = items
            .binary_search(&u.item)
            .map_err(|_| ScenarioError::UnknownVertex(u.item))?;
        let v = idx(u.node)?;
        state[i][v] = state[i][v].max(u.version);
    }
    let adj = topology.undirected_adjacency();
    let agree = |state: &[Vec<u64>], i: usize| {
        let r = &replica_idx[i];
        r.iter().all(|&v| state[i][v] == state[i][r[0]])
    };
    let mut settled: Vec<Option<usize>> = (0..items.len())
        .map(|i| agree(&state, i).then_some(0))
        .collect();
    let mut agreeing_by_round = vec![settled.iter().filter(|s| s.is_some()).count()];
    let mut rounds = 0;
    loop {
        let mut changed = false;
        let mut next = state.clone();
        for i in 0..items.len() {
            for v in 0..n {
                let best = adj[v].iter().map(|&w| state[i][w]).fold(state[i][v], u64::max);
                if best != state[i][v] {
                    next[i][v] = best;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
        state = next;
        rounds += 1;
        let mut count = 0;
        for i in 0..items.len() {
            let ok = agree(&state, i);
            if !ok {
                settled[i] = None;
            } else if settled[i].is_none() {
                settled[i] = Some(rounds);
            }
            count += usize::from(ok);
        }
        agreeing_by_round.push(count);
    }
    let report = items
        .iter()
        .enumerate()
        .map(|(i, &item)| {
            let status = match settled[i] {
                Some(r) if agree(&state, i) => ItemConsistency::Converged {
                    rounds: r,
                    version: replica_idx[i].first().map_or(0, |&v| state[i][v]),
                },
                _ => ItemConsistency::Divergent,
            };
            (item, status)
        })
        .collect();
    Ok(ConsistencyReport {
        items: report,
        rounds,
        agreeing_by_round,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsensusReport {
    pub rounds: usize,
    /// Mean of the final values.
    pub value: f64,
    pub values: BTreeMap<VertexId, f64>,
    /// Max minus min after each round, starting at round 0.
    pub spread_by_round: Vec<f64>,
}

pub const DEFAULT_MAX_ROUNDS: usize = 1_000_000;

fn spread(x: &[f64]) -> f64 {
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    hi - lo
}

/// Synchronous averaging with `w_uv = 1 / (1 + max(deg u, deg v))` and the
/// remaining mass on the self-loop, until max - min <= `tol`.
pub fn consensus_sim(
    values: &BTreeMap<VertexId, f64>,
    topology: &GraphView,
    tol: f64,
    max_rounds: usize,
) -> Result<ConsensusReport, ScenarioError> {
    if !(tol > 0.0) {
        return Err(ScenarioError::InvalidTolerance(tol));
    }
    require_connected(topology)?;
    let mut x: Vec<f64> = Vec::with_capacity(topology.vertex_count());
    for &v in topology.vertices() {
        x.push(*values.get(&v).ok_or(ScenarioError::MissingValue(v))?);
    }
    if let Some(&v) = values.keys().find(|v| !topology.contains(**v)) {
        return Err(ScenarioError::UnknownVertex(v));
    }
    let adj = topology.undirected_adjacency();
    let weights: Vec<Vec<(usize, f64)>> = adj
        .iter()
        .enumerate()
        .map(|(u, nbrs)| {
            nbrs.iter()
                .map(|&w| (w, 1.0 / (1.0 + adj[u].len().max(adj[w].len()) as f64)))
                .collect()
        })
        .collect();
    let mut spread_by_round = vec![spread(&x)];
    let mut rounds = 0;
    while *spread_by_round.last().expect("non-empty") > tol {
        if rounds == max_rounds {
            return Err(ScenarioError::NonConvergence {
                rounds,
                spread: *spread_by_round.last().expect("non-empty"),
            });
        }
        let next: Vec<f64> = (0..x.len())
            .map(|u| {
                let mut self_w = 1.0;
                let mut acc = 0.0;
                for &(w, wt) in &weights[u] {
                    self_w -= wt;
                    acc += wt * x[w];
                }
                acc + self_w * x[u]
            })
            .collect();
        x = next;
        rounds += 1;
        spread_by_round.push(spread(&x));
    }
    let value = if x.is_empty() {
        0.0
    } else {
        x.iter().sum::<f64>() / x.len() as f64
    };
    Ok(ConsensusReport {
        rounds,
        value,
        values: topology.vertices().iter().copied().zip(x).collect(),
        spread_by_round,
    })
}

/// Shortest directed trust chain `a -> b` (BFS, neighbors in ascending id
/// order). `None` when `b` is unreachable.
pub fn trust_path(
    g: &GraphView,
    a: VertexId,
    b: VertexId,
) -> Result<Option<Vec<VertexId>>, ScenarioError> {
    let ai = g.index_of(a).ok_or(ScenarioError::UnknownVertex(a))?;
    let bi = g.index_of(b).ok_or(ScenarioError::UnknownVertex(b))?;
    let adj = g.out_adjacency();
    let mut prev = vec![usize::MAX; g.vertex_count()];
    prev[ai] = ai;
    let mut queue = VecDeque::from([ai]);
    while let Some(u) = queue.pop_front() {
        if u == bi {
            break;
        }
        for &w in &adj[u] {
            if prev[w] == usize::MAX {
                prev[w] = u;
                queue.push_back(w);
            }
        }
    }
    if prev[bi] == usize::MAX {
        return Ok(None);
    }
    let mut chain = vec![g.vertices()[bi]];
    let mut cur = bi;
    while cur != ai {
        cur = prev[cur];
        chain.push(g.vertices()[cur]);
    }
    chain.reverse();
    Ok(Some(chain))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyReport {
    pub scores: BTreeMap<VertexId, f64>,
    pub flagged: BTreeSet<VertexId>,
}

/// Degree z-scores against the population mean and standard deviation;
/// `|z| > threshold` is flagged.
pub fn anomaly_scores(g: &GraphView, threshold: f64) -> Result<AnomalyReport, ScenarioError> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(ScenarioError::TooFewVertices { need: 2, got: n });
    }
    let deg: Vec<f64> = g
        .undirected_adjacency()
        .iter()
        .map(|a| a.len() as f64)
        .collect();
    let mean = deg.iter().sum::<f64>() / n as f64;
    let var = deg.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n as f64;
    let sd = var.sqrt();
    let scores: BTreeMap<VertexId, f64> = g
        .vertices()
        .iter()
        .zip(&deg)
        .map(|(&v, d)| (v, if sd > 0.0 { (d - mean) / sd } else { 0.0 }))
        .collect();
    let flagged = scores
        .iter()
        .filter(|(_, z)| z.abs() > threshold)
        .map(|(&v, _)| v)
        .collect();
    Ok(AnomalyReport { scores, flagged })
}
