//! Routing, flow, spanning-tree, scheduling, load-balancing and queuing
//! operations over [`GraphView`]s.
//!
//! Edge weights are read as latency/cost by [`shortest_path`] and
//! [`minimum_spanning_tree`], and as capacity by [`max_flow_min_cut`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph_core::{EdgeId, GraphView, VertexId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetOptError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("edge {edge} has negative weight {weight}")]
    NegativeWeight { edge: EdgeId, weight: f64 },
    #[error("{target} is unreachable from {from}")]
    Unreachable { from: VertexId, target: VertexId },
    #[error("source and sink must differ")]
    SameTerminals,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("tree is not a spanning tree of the graph: {0}")]
    InvalidTree(String),
    #[error("at least one server is required")]
    NoServers,
    #[error("total demand {demand} exceeds total capacity {capacity}")]
    DemandExceedsCapacity { demand: f64, capacity: f64 },
    #[error("demand {index} of size {demand} fits no server (largest remaining capacity {remaining})")]
    InfeasibleItem {
        index: usize,
        demand: f64,
        remaining: f64,
    },
    #[error("dependency cycle: {0:?}")]
    Cycle(Vec<TaskId>),
    #[error("unknown task {0:?}")]
    UnknownTask(TaskId),
    #[error("unstable queue: arrival rate {arrival} >= service rate {service}")]
    UnstableQueue { arrival: f64, service: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathResult {
    pub weight: f64,
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, vertex)
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn check_weights(g: &GraphView) -> Result<(), NetOptError> {
    for e in g.edges() {
        if e.weight < 0.0 || e.weight.is_nan() {
            return Err(NetOptError::NegativeWeight {
                edge: e.id,
                weight: e.weight,
            });
        }
    }
    Ok(())
}

/// Arcs `(to, weight, edge id)` per vertex index; undirected edges yield two.
fn weighted_arcs(g: &GraphView) -> Vec<Vec<(usize, f64, EdgeId)>> {
    let mut arcs = vec![Vec::new(); g.vertex_count()];
    for e in g.edges() {
        let (u, v) = g.endpoints(e);
        arcs[u].push((v, e.weight, e.id));
        if !e.directed && u != v {
            arcs[v].push((u, e.weight, e.id));
        }
    }
    arcs
}

/// Dijkstra over a multigraph. Equal-cost alternatives resolve to the
/// smallest predecessor id, then the smallest edge id.
pub fn shortest_path(g: &GraphView, s: VertexId, t: VertexId) -> Result<PathResult, NetOptError> {
    let si = g.index_of(s).ok_or(NetOptError::UnknownVertex(s))?;
    let ti = g.index_of(t).ok_or(NetOptError::UnknownVertex(t))?;
    check_weights(g)?;
    let arcs = weighted_arcs(g);
    let n = g.vertex_count();
    let ids = g.vertices();

    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<(usize, EdgeId)>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[si] = 0.0;
    heap.push(HeapEntry {
        dist: 0.0,
        vertex: si,
    });
    while let Some(HeapEntry { dist: d, vertex: u }) = heap.pop() {
        if done[u] || d > dist[u] {
            continue;
        }
        done[u] = true;
        if u == ti {
            break;
        }
        for &(v, w, eid) in &arcs[u] {
            if done[v] {
                continue;
            }
            let nd = d + w;
            let better = match nd.total_cmp(&dist[v]) {
                Ordering::Less => true,
                Ordering::Equal => match pred[v] {
                    Some((pu, pe)) => (ids[u], eid) < (ids[pu], pe),
                    None => false,
                },
                Ordering::Greater => false,
            };
            if better {
                dist[v] = nd;
                pred[v] = Some((u, eid));
                heap.push(HeapEntry {
                    dist: nd,
                    vertex: v,
                });
            }
        }
    }
    if !dist[ti].is_finite() {
        return Err(NetOptError::Unreachable {
            from: s,
            target: t,
        });
    }
    let mut vertices = vec![t];
    let mut edges = Vec::new();
    let mut cur = ti;
    while let Some((p, e)) = pred[cur] {
        edges.push(e);
        vertices.push(ids[p]);
        cur = p;
    }
    vertices.reverse();
    edges.reverse();
    let weight = edges
        .iter()
        .map(|e| g.edge(*e).expect("path edge").weight)
        .sum();
    Ok(PathResult {
        weight,
        vertices,
        edges,
    })
}

/// Flow carried by one edge, in the orientation it is actually used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeFlow {
    pub from: VertexId,
    pub to: VertexId,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowCutResult {
    pub value: f64,
    pub flows: BTreeMap<EdgeId, EdgeFlow>,
    /// Edges leaving the source side of the minimum cut: the congestion points.
    pub cut: BTreeSet<EdgeId>,
    pub cut_capacity: f64,
    pub source_side: BTreeSet<VertexId>,
}

struct Residual {
    to: Vec<usize>,
    cap: Vec<f64>,
    flow: Vec<f64>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn residual(&self, arc: usize) -> f64 {
        self.cap[arc] - self.flow[arc]
    }
}

/// Edmonds-Karp max-flow. Directed edges are arcs of their weight's capacity;
/// undirected edges carry up to their weight in either direction.
pub fn max_flow_min_cut(
    g: &GraphView,
    s: VertexId,
    t: VertexId,
) -> Result<FlowCutResult, NetOptError> {
    let si = g.index_of(s).ok_or(NetOptError::UnknownVertex(s))?;
    let ti = g.index_of(t).ok_or(NetOptError::UnknownVertex(t))?;
    if si == ti {
        return Err(NetOptError::SameTerminals);
    }
    check_weights(g)?;
    let n = g.vertex_count();
    let mut net = Residual {
        to: Vec::new(),
        cap: Vec::new(),
        flow: Vec::new(),
        adj: vec![Vec::new(); n],
    };
    // arc 2k is the forward arc of edge_of[k], 2k+1 its pair
    let mut edge_of = Vec::new();
    for e in g.edges() {
        let (u, v) = g.endpoints(e);
        if u == v {
            continue;
        }
        let back = if e.directed { 0.0 } else { e.weight };
        for (from, to, cap) in [(u, v, e.weight), (v, u, back)] {
            net.adj[from].push(net.to.len());
            net.to.push(to);
            net.cap.push(cap);
            net.flow.push(0.0);
        }
        edge_of.push(*e);
    }
    let max_cap = g.edges().iter().map(|e| e.weight).fold(0.0, f64::max);
    let eps = 1e-12 * max_cap.max(1.0);

    let mut value = 0.0;
    let mut parent_arc = vec![usize::MAX; n];
    loop {
        parent_arc.fill(usize::MAX);
        let mut seen = vec![false; n];
        seen[si] = true;
        let mut queue = VecDeque::from([si]);
        while let Some(u) = queue.pop_front() {
            if u == ti {
                break;
            }
            for &a in &net.adj[u] {
                let v = net.to[a];
                if !seen[v] && net.residual(a) > eps {
                    seen[v] = true;
                    parent_arc[v] = a;
                    queue.push_back(v);
                }
            }
        }
        if !seen[ti] {
            break;
        }
        let mut bottleneck = f64::INFINITY;
        let mut v = ti;
        while v != si {
            let a = parent_arc[v];
            bottleneck = bottleneck.min(net.residual(a));
            v = net.to[a ^ 1];
        }
        let mut v = ti;
        while v != si {
            let a = parent_arc[v];
            net.flow[a] += bottleneck;
            net.flow[a ^ 1] -= bottleneck;
            v = net.to[a ^ 1];
        }
        value += bottleneck;
    }

    let mut reach = vec![false; n];
    reach[si] = true;
    let mut queue = VecDeque::from([si]);
    while let Some(u) = queue.pop_front() {
        for &a in &net.adj[u] {
            let v = net.to[a];
            if !reach[v] && net.residual(a) > eps {
                reach[v] = true;
                queue.push_back(v);
            }
        }
    }

    let ids = g.vertices();
    let mut flows = BTreeMap::new();
    let mut cut = BTreeSet::new();
    let mut cut_capacity = 0.0;
    for (k, e) in edge_of.iter().enumerate() {
        let f = net.flow[2 * k];
        let flow = if f >= 0.0 {
            EdgeFlow {
                from: e.src,
                to: e.dst,
                amount: f,
            }
        } else {
            EdgeFlow {
                from: e.dst,
                to: e.src,
                amount: -f,
            }
        };
        flows.insert(e.id, flow);
        let (u, v) = g.endpoints(e);
        let crosses = (reach[u] && !reach[v]) || (!e.directed && reach[v] && !reach[u]);
        if crosses {
            cut.insert(e.id);
            cut_capacity += e.weight;
        }
    }
    let source_side = (0..n).filter(|&i| reach[i]).map(|i| ids[i]).collect();
    Ok(FlowCutResult {
        value,
        flows,
        cut,
        cut_capacity,
        source_side,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeResult {
    pub edges: BTreeSet<EdgeId>,
    pub weight: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub backup: Option<BTreeSet<EdgeId>>,
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Kruskal over the undirected interpretation, scanning edges by
/// ascending `(weight, id)`.
pub fn minimum_spanning_tree(g: &GraphView) -> Result<TreeResult, NetOptError> {
    let n = g.vertex_count();
    let mut order: Vec<_> = g.edges().iter().collect();
    order.sort_by(|a, b| a.weight.total_cmp(&b.weight).then(a.id.cmp(&b.id)));
    let mut dsu = DisjointSet::new(n);
    let mut edges = BTreeSet::new();
    let mut weight = 0.0;
    for e in order {
        let (u, v) = g.endpoints(e);
        if dsu.union(u, v) {
            edges.insert(e.id);
            weight += e.weight;
        }
    }
    if n > 0 && edges.len() != n - 1 {
        return Err(NetOptError::Disconnected);
    }
    Ok(TreeResult {
        edges,
        weight,
        backup: None,
    })
}

/// Tree adjacency `(neighbor, edge id)` after checking `tree` spans `g`.
fn tree_adjacency(
    g: &GraphView,
    tree: &TreeResult,
) -> Result<Vec<Vec<(usize, EdgeId)>>, NetOptError> {
    let n = g.vertex_count();
    if n > 0 && tree.edges.len() != n - 1 {
        return Err(NetOptError::InvalidTree(format!(
            "{} edges for {} vertices",
            tree.edges.len(),
            n
        )));
    }
    let mut adj = vec![Vec::new(); n];
    let mut dsu = DisjointSet::new(n);
    for &id in &tree.edges {
        let e = g
            .edge(id)
            .ok_or_else(|| NetOptError::InvalidTree(format!("{id} is not in the graph")))?;
        let (u, v) = g.endpoints(e);
        if !dsu.union(u, v) {
            return Err(NetOptError::InvalidTree(format!("{id} closes a cycle")));
        }
        adj[u].push((v, id));
        adj[v].push((u, id));
    }
    Ok(adj)
}

/// Tree edges on the unique tree path between two vertex indices.
fn tree_path(adj: &[Vec<(usize, EdgeId)>], from: usize, to: usize) -> Vec<EdgeId> {
    let mut via: Vec<Option<(usize, EdgeId)>> = vec![None; adj.len()];
    let mut seen = vec![false; adj.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        if u == to {
            break;
        }
        for &(v, e) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                via[v] = Some((u, e));
                queue.push_back(v);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while let Some((p, e)) = via[cur] {
        path.push(e);
        cur = p;
    }
    path
}

/// Greedy fundamental-cycle cover: scans non-tree edges by ascending
/// `(weight, id)` and keeps each one whose tree cycle covers a still
/// uncovered tree edge, until `k` backups are chosen.
pub fn augment_redundancy(
    g: &GraphView,
    tree: &TreeResult,
    k: usize,
) -> Result<TreeResult, NetOptError> {
    let adj = tree_adjacency(g, tree)?;
    let mut candidates: Vec<_> = g
        .edges()
        .iter()
        .filter(|e| !tree.edges.contains(&e.id) && e.src != e.dst)
        .collect();
    candidates.sort_by(|a, b| a.weight.total_cmp(&b.weight).then(a.id.cmp(&b.id)));
    let mut covered = BTreeSet::new();
    let mut backup = BTreeSet::new();
    for e in candidates {
        if backup.len() >= k {
            break;
        }
        let (u, v) = g.endpoints(e);
        let cycle = tree_path(&adj, u, v);
        if cycle.iter().any(|t| !covered.contains(t)) {
            covered.extend(cycle);
            backup.insert(e.id);
        }
    }
    Ok(TreeResult {
        edges: tree.edges.clone(),
        weight: tree.weight,
        backup: Some(backup),
    })
}

/// Tree edges protected by at least one backup edge's fundamental cycle.
pub fn covered_tree_edges(
    g: &GraphView,
    tree: &TreeResult,
) -> Result<BTreeSet<EdgeId>, NetOptError> {
    let adj = tree_adjacency(g, tree)?;
    let mut covered = BTreeSet::new();
    for id in tree.backup.iter().flatten() {
        let e = g
            .edge(*id)
            .ok_or_else(|| NetOptError::InvalidTree(format!("backup {id} is not in the graph")))?;
        let (u, v) = g.endpoints(e);
        covered.extend(tree_path(&adj, u, v));
    }
    Ok(covered)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServerSpec {
    pub id: u32,
    /// Requests (or demand units) the server can absorb.
    pub capacity: f64,
    /// Ticks per request.
    pub response_time: f64,
}

fn check_servers(servers: &[ServerSpec]) -> Result<(), NetOptError> {
    if servers.is_empty() {
        return Err(NetOptError::NoServers);
    }
    for s in servers {
        if !(s.capacity >= 0.0) || !(s.response_time > 0.0) || !s.response_time.is_finite() {
            return Err(NetOptError::InvalidParameter(format!(
                "server {} needs capacity >= 0 and finite response_time > 0",
                s.id
            )));
        }
    }
    Ok(())
}

/// Splits `request_count` in proportion to `1 / response_time` with
/// largest-remainder rounding (remainder ties go to the earlier server).
pub fn balance_weighted_response(
    request_count: u64,
    servers: &[ServerSpec],
) -> Result<BTreeMap<u32, u64>, NetOptError> {
    check_servers(servers)?;
    let weights: Vec<f64> = servers.iter().map(|s| 1.0 / s.response_time).collect();
    let total: f64 = weights.iter().sum();
    let shares: Vec<f64> = weights
        .iter()
        .map(|w| request_count as f64 * w / total)
        .collect();
    let mut counts: Vec<u64> = shares.iter().map(|s| s.floor() as u64).collect();
    let assigned: u64 = counts.iter().sum();
    let mut leftover = request_count.saturating_sub(assigned);
    let mut by_remainder: Vec<usize> = (0..servers.len()).collect();
    by_remainder.sort_by(|&a, &b| {
        let ra = shares[a] - shares[a].floor();
        let rb = shares[b] - shares[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in by_remainder.iter().cycle() {
        if leftover == 0 {
            break;
        }
        counts[i] += 1;
        leftover -= 1;
    }
    Ok(servers.iter().map(|s| s.id).zip(counts).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceAssignment {
    /// Server id chosen for each demand, indexed like the input.
    pub assignment: Vec<u32>,
    pub loads: BTreeMap<u32, f64>,
}

/// Places demands, largest first (ties by index), each on the server with the
/// most remaining capacity (ties by position). Fails if that server cannot
/// hold the demand.
pub fn balance_resource_based(
    demands: &[f64],
    servers: &[ServerSpec],
) -> Result<ResourceAssignment, NetOptError> {
    check_servers(servers)?;
    if let Some((i, d)) = demands
        .iter()
        .enumerate()
        .find(|(_, d)| !(**d >= 0.0) || !d.is_finite())
    {
        return Err(NetOptError::InvalidParameter(format!(
            "demand {i} is {d}, expected a finite non-negative value"
        )));
    }
    let demand: f64 = demands.iter().sum();
    let capacity: f64 = servers.iter().map(|s| s.capacity).sum();
    if demand > capacity {
        return Err(NetOptError::DemandExceedsCapacity { demand, capacity });
    }
    let mut order: Vec<usize> = (0..demands.len()).collect();
    order.sort_by(|&a, &b| demands[b].total_cmp(&demands[a]).then(a.cmp(&b)));
    let mut remaining: Vec<f64> = servers.iter().map(|s| s.capacity).collect();
    let mut assignment = vec![0u32; demands.len()];
    for i in order {
        let best = (0..servers.len())
            .max_by(|&a, &b| remaining[a].total_cmp(&remaining[b]).then(b.cmp(&a)))
            .expect("at least one server");
        if demands[i] > remaining[best] {
            return Err(NetOptError::InfeasibleItem {
                index: i,
                demand: demands[i],
                remaining: remaining[best],
            });
        }
        remaining[best] -= demands[i];
        assignment[i] = servers[best].id;
    }
    let loads = servers
        .iter()
        .zip(&remaining)
        .map(|(s, r)| (s.id, s.capacity - r))
        .collect();
    Ok(ResourceAssignment { assignment, loads })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskId(pub u32);

/// Tasks with durations and dependency arcs `before -> after`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TaskDag {
    pub durations: BTreeMap<TaskId, f64>,
    pub arcs: Vec<(TaskId, TaskId)>,
}

impl TaskDag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_task(&mut self, id: TaskId, duration: f64) -> &mut Self {
        self.durations.insert(id, duration);
        self
    }

    pub fn add_dependency(&mut self, before: TaskId, after: TaskId) -> &mut Self {
        self.arcs.push((before, after));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    pub order: Vec<TaskId>,
    pub critical_length: f64,
    pub critical_path: Vec<TaskId>,
}

/// Topological order (smallest ready id first) and the maximum-duration
/// dependency chain.
pub fn topo_schedule(dag: &TaskDag) -> Result<Schedule, NetOptError> {
    for (id, d) in &dag.durations {
        if !(*d >= 0.0) || !d.is_finite() {
            return Err(NetOptError::InvalidParameter(format!(
                "task {} has duration {d}",
                id.0
            )));
        }
    }
    let mut succ: BTreeMap<TaskId, Vec<TaskId>> =
        dag.durations.keys().map(|&t| (t, Vec::new())).collect();
    let mut preds = succ.clone();
    for &(a, b) in &dag.arcs {
        for t in [a, b] {
            if !dag.durations.contains_key(&t) {
                return Err(NetOptError::UnknownTask(t));
            }
        }
        succ.get_mut(&a).expect("checked").push(b);
        preds.get_mut(&b).expect("checked").push(a);
    }
    let mut indeg: BTreeMap<TaskId, usize> = preds.iter().map(|(t, p)| (*t, p.len())).collect();
    let mut ready: BTreeSet<TaskId> = indeg
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(t, _)| *t)
        .collect();
    let mut order = Vec::with_capacity(dag.durations.len());
    while let Some(t) = ready.pop_first() {
        order.push(t);
        for s in &succ[&t] {
            let d = indeg.get_mut(s).expect("known task");
            *d -= 1;
            if *d == 0 {
                ready.insert(*s);
            }
        }
    }
    if order.len() < dag.durations.len() {
        return Err(NetOptError::Cycle(find_cycle(&preds, &indeg)));
    }

    let mut finish: BTreeMap<TaskId, f64> = BTreeMap::new();
    let mut via: BTreeMap<TaskId, Option<TaskId>> = BTreeMap::new();
    for &t in &order {
        let mut best: Option<(f64, TaskId)> = None;
        for &p in &preds[&t] {
            let f = finish[&p];
            best = match best {
                Some((bf, bp)) if bf > f || (bf == f && bp <= p) => Some((bf, bp)),
                _ => Some((f, p)),
            };
        }
        finish.insert(t, best.map_or(0.0, |b| b.0) + dag.durations[&t]);
        via.insert(t, best.map(|b| b.1));
    }
    let end = finish
        .iter()
        .fold(None::<(TaskId, f64)>, |acc, (&t, &f)| match acc {
            Some((_, bf)) if bf >= f => acc,
            _ => Some((t, f)),
        });
    let (critical_length, critical_path) = match end {
        None => (0.0, Vec::new()),
        Some((last, len)) => {
            let mut path = vec![last];
            let mut cur = last;
            while let Some(p) = via[&cur] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            (len, path)
        }
    };
    Ok(Schedule {
        order,
        critical_length,
        critical_path,
    })
}

/// Walks predecessor arcs among the unscheduled tasks until one repeats.
fn find_cycle(
    preds: &BTreeMap<TaskId, Vec<TaskId>>,
    indeg: &BTreeMap<TaskId, usize>,
) -> Vec<TaskId> {
    let stuck: BTreeSet<TaskId> = indeg
        .iter()
        .filter(|(_, d)| **d > 0)
        .map(|(t, _)| *t)
        .collect();
    let start = *stuck.first().expect("a cycle leaves tasks unscheduled");
    let mut walk = vec![start];
    let mut pos: BTreeMap<TaskId, usize> = BTreeMap::from([(start, 0)]);
    let mut cur = start;
    loop {
        let next = *preds[&cur]
            .iter()
            .filter(|p| stuck.contains(p))
            .min()
            .expect("stuck task has a stuck predecessor");
        if let Some(&i) = pos.get(&next) {
            let mut cycle: Vec<TaskId> = walk[i..].to_vec();
            cycle.reverse();
            return cycle;
        }
        pos.insert(next, walk.len());
        walk.push(next);
        cur = next;
    }
}

/// Expected sojourn time `1 / (mu - lambda)` of an M/M/1 queue.
pub fn mm1_latency(arrival_rate: f64, service_rate: f64) -> Result<f64, NetOptError> {
    if !(arrival_rate >= 0.0) || !service_rate.is_finite() {
        return Err(NetOptError::InvalidParameter(format!(
            "arrival rate {arrival_rate} and service rate {service_rate}"
        )));
    }
    if arrival_rate >= service_rate {
        return Err(NetOptError::UnstableQueue {
            arrival: arrival_rate,
            service: service_rate,
        });
    }
    Ok(1.0 / (service_rate - arrival_rate))
}
