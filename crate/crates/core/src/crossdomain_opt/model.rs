use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::error::OptError;

pub type DomainId = u32;
pub type LinkId = u64;
pub type NodeId = u64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub id: DomainId,
    pub gamma: f64,
    pub lambda: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl DomainSpec {
    pub fn utility(&self, r: f64) -> f64 {
        utility(self.gamma, self.lambda, r)
    }
}

/// Sigmoid utility `1 / (1 + exp(-gamma (r - lambda)))`.
pub fn utility(gamma: f64, lambda: f64, r: f64) -> f64 {
    let z = gamma * (r - lambda);
    // both branches avoid overflow for large |z|
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharedLink {
    pub id: LinkId,
    pub capacity: f64,
    /// Routing coefficient `a` per domain: a domain with allocation `r`
    /// pushes `a * r` flow units over this link.
    pub coeffs: BTreeMap<DomainId, f64>,
}

impl SharedLink {
    pub fn coeff(&self, k: DomainId) -> f64 {
        self.coeffs.get(&k).copied().unwrap_or(0.0)
    }

    pub fn carries(&self, k: DomainId) -> bool {
        self.coeff(k) > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeLink {
    pub link: LinkId,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharedNode {
    pub id: NodeId,
    pub eps_tx: f64,
    pub eps_rx: f64,
    pub incident: Vec<NodeLink>,
}

impl SharedNode {
    pub fn e_tx(&self, d: f64) -> f64 {
        self.eps_tx * d * d
    }

    pub fn e_rx(&self, _d: f64) -> f64 {
        self.eps_rx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingSign {
    /// Interaction is a contention cost subtracted from the utility sum.
    #[default]
    Penalty,
    /// Interaction is added to the utility sum.
    Bonus,
}

impl CouplingSign {
    fn factor(self) -> f64 {
        match self {
            CouplingSign::Penalty => 1.0,
            CouplingSign::Bonus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentWeights {
    pub link: f64,
    pub energy: f64,
    pub utility: f64,
}

impl Default for ComponentWeights {
    fn default() -> Self {
        ComponentWeights {
            link: 1.0,
            energy: 1.0,
            utility: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingEdge {
    pub m: DomainId,
    pub n: DomainId,
    #[serde(default)]
    pub links: BTreeSet<LinkId>,
    #[serde(default)]
    pub nodes: BTreeSet<NodeId>,
    #[serde(default)]
    pub utility: bool,
    #[serde(default)]
    pub sign: CouplingSign,
}

impl CouplingEdge {
    fn key(&self) -> (DomainId, DomainId) {
        (self.m.min(self.n), self.m.max(self.n))
    }
}

/// Undirected domain-level graph; edges are stored with `m < n`, sorted.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CouplingGraph {
    pub edges: Vec<CouplingEdge>,
    #[serde(default)]
    pub weights: ComponentWeights,
}

impl CouplingGraph {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge(&self, m: DomainId, n: DomainId) -> Option<&CouplingEdge> {
        let key = (m.min(n), m.max(n));
        self.edges.iter().find(|e| e.key() == key)
    }

    fn normalize(&mut self) {
        for e in &mut self.edges {
            if e.m > e.n {
                std::mem::swap(&mut e.m, &mut e.n);
            }
        }
        self.edges.sort_by_key(CouplingEdge::key);
    }
}

fn default_true() -> bool {
    true
}

/// How the coupling graph is obtained from a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum CouplingSpec {
    /// One edge per domain pair sharing a link or a node.
    Auto {
        #[serde(default = "default_true")]
        utility: bool,
        #[serde(default)]
        weights: ComponentWeights,
        #[serde(default)]
        sign: CouplingSign,
    },
    Explicit {
        edges: Vec<CouplingEdge>,
        #[serde(default)]
        weights: ComponentWeights,
    },
}

impl Default for CouplingSpec {
    fn default() -> Self {
        CouplingSpec::Auto {
            utility: true,
            weights: ComponentWeights::default(),
            sign: CouplingSign::Penalty,
        }
    }
}

/// On-disk scenario description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub domains: Vec<DomainSpec>,
    #[serde(default)]
    pub links: Vec<SharedLink>,
    #[serde(default)]
    pub nodes: Vec<SharedNode>,
    #[serde(default)]
    pub coupling: CouplingSpec,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self, OptError> {
        serde_json::from_str(text).map_err(|e| OptError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Isolated,
    Coupled,
}

/// One linear capacity row `coeffs . R <= cap`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Row {
    pub link: LinkId,
    pub coeffs: Vec<f64>,
    pub cap: f64,
}

impl Row {
    pub fn value(&self, r: &[f64]) -> f64 {
        self.coeffs.iter().zip(r).map(|(a, x)| a * x).sum()
    }
}

/// Validated scenario. Domains are kept sorted by id and allocation vectors
/// are indexed in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    domains: Vec<DomainSpec>,
    links: Vec<SharedLink>,
    nodes: Vec<SharedNode>,
    coupling: CouplingGraph,
}

fn check_unique<T>(
    items: &[T],
    id: impl Fn(&T) -> u64,
    kind: &'static str,
) -> Result<(), OptError> {
    let mut seen = BTreeSet::new();
    for item in items {
        if !seen.insert(id(item)) {
            return Err(OptError::DuplicateId { kind, id: id(item) });
        }
    }
    Ok(())
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, OptError> {
        Self::new(ScenarioFile::from_json(text)?)
    }

    pub fn new(file: ScenarioFile) -> Result<Self, OptError> {
        let ScenarioFile {
            mut domains,
            mut links,
            mut nodes,
            coupling,
        } = file;
        if domains.is_empty() {
            return Err(OptError::NoDomains);
        }
        domains.sort_by_key(|d| d.id);
        links.sort_by_key(|l| l.id);
        nodes.sort_by_key(|n| n.id);
        check_unique(&domains, |d| d.id as u64, "domain")?;
        check_unique(&links, |l| l.id, "link")?;
        check_unique(&nodes, |n| n.id, "node")?;
        for d in &domains {
            let finite = [d.gamma, d.lambda, d.r_min, d.r_max]
                .iter()
                .all(|x| x.is_finite());
            if !finite {
                return Err(OptError::InvalidDomain {
                    id: d.id,
                    reason: "parameters must be finite".into(),
                });
            }
            if !(d.gamma > 0.0) {
                return Err(OptError::InvalidDomain {
                    id: d.id,
                    reason: format!("gamma must be positive, got {}", d.gamma),
                });
            }
            if !(d.r_min < d.r_max) {
                return Err(OptError::InvalidDomain {
                    id: d.id,
                    reason: format!("r_min {} must be below r_max {}", d.r_min, d.r_max),
                });
            }
        }
        let declared: BTreeSet<DomainId> = domains.iter().map(|d| d.id).collect();
        for l in &links {
            if !(l.capacity > 0.0) || !l.capacity.is_finite() {
                return Err(OptError::InvalidLink {
                    id: l.id,
                    reason: format!("capacity must be positive, got {}", l.capacity),
                });
            }
            for (&k, &a) in &l.coeffs {
                if !declared.contains(&k) {
                    return Err(OptError::InvalidLink {
                        id: l.id,
                        reason: format!("coefficient for undeclared domain {k}"),
                    });
                }
                if !(a >= 0.0) || !a.is_finite() {
                    return Err(OptError::InvalidLink {
                        id: l.id,
                        reason: format!("coefficient for domain {k} must be >= 0, got {a}"),
                    });
                }
            }
        }
        let link_ids: BTreeSet<LinkId> = links.iter().map(|l| l.id).collect();
        for n in &nodes {
            if !(n.eps_tx >= 0.0 && n.eps_rx >= 0.0) {
                return Err(OptError::InvalidNode {
                    id: n.id,
                    reason: "energy coefficients must be >= 0".into(),
                });
            }
            for inc in &n.incident {
                if !link_ids.contains(&inc.link) {
                    return Err(OptError::UnknownLink {
                        node: n.id,
                        link: inc.link,
                    });
                }
                if !(inc.distance > 0.0) {
                    return Err(OptError::InvalidNode {
                        id: n.id,
                        reason: format!("distance to link {} must be positive", inc.link),
                    });
                }
            }
        }

        let mut sc = Scenario {
            domains,
            links,
            nodes,
            coupling: CouplingGraph::default(),
        };
        sc.coupling = match coupling {
            CouplingSpec::Auto {
                utility,
                weights,
                sign,
            } => sc.auto_coupling(utility, weights, sign),
            CouplingSpec::Explicit { edges, weights } => {
                let mut g = CouplingGraph { edges, weights };
                g.normalize();
                sc.check_coupling(&g)?;
                g
            }
        };
        Ok(sc)
    }

    fn auto_coupling(
        &self,
        utility: bool,
        weights: ComponentWeights,
        sign: CouplingSign,
    ) -> CouplingGraph {
        let mut edges = Vec::new();
        for (i, dm) in self.domains.iter().enumerate() {
            for dn in &self.domains[i + 1..] {
                let links = self.shared_links(dm.id, dn.id);
                let nodes = self.shared_nodes(dm.id, dn.id);
                if !links.is_empty() || !nodes.is_empty() {
                    edges.push(CouplingEdge {
                        m: dm.id,
                        n: dn.id,
                        links,
                        nodes,
                        utility,
                        sign,
                    });
                }
            }
        }
        CouplingGraph { edges, weights }
    }

    /// Enforces "edge exists iff the pair shares a resource or is flagged for
    /// utility coupling", with labels equal to the shared resource sets.
    fn check_coupling(&self, g: &CouplingGraph) -> Result<(), OptError> {
        let mut seen = BTreeSet::new();
        for e in &g.edges {
            for k in [e.m, e.n] {
                self.index(k)?;
            }
            if e.m == e.n {
                return Err(OptError::InvalidCoupling {
                    m: e.m,
                    n: e.n,
                    reason: "self-coupling".into(),
                });
            }
            if !seen.insert(e.key()) {
                return Err(OptError::InvalidCoupling {
                    m: e.m,
                    n: e.n,
                    reason: "duplicate edge".into(),
                });
            }
            if e.links != self.shared_links(e.m, e.n) {
                return Err(OptError::InvalidCoupling {
                    m: e.m,
                    n: e.n,
                    reason: "listed links differ from the links both domains use".into(),
                });
            }
            if e.nodes != self.shared_nodes(e.m, e.n) {
                return Err(OptError::InvalidCoupling {
                    m: e.m,
                    n: e.n,
                    reason: "listed nodes differ from the nodes both domains use".into(),
                });
            }
            if e.links.is_empty() && e.nodes.is_empty() && !e.utility {
                return Err(OptError::InvalidCoupling {
                    m: e.m,
                    n: e.n,
                    reason: "edge has no shared resource and no utility flag".into(),
                });
            }
        }
        for (i, dm) in self.domains.iter().enumerate() {
            for dn in &self.domains[i + 1..] {
                let shares = !self.shared_links(dm.id, dn.id).is_empty()
                    || !self.shared_nodes(dm.id, dn.id).is_empty();
                if shares && !seen.contains(&(dm.id, dn.id)) {
                    return Err(OptError::InvalidCoupling {
                        m: dm.id,
                        n: dn.id,
                        reason: "pair shares a resource but has no coupling edge".into(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn domains(&self) -> &[DomainSpec] {
        &self.domains
    }

    pub fn links(&self) -> &[SharedLink] {
        &self.links
    }

    pub fn nodes(&self) -> &[SharedNode] {
        &self.nodes
    }

    pub fn coupling(&self) -> &CouplingGraph {
        &self.coupling
    }

    pub fn dim(&self) -> usize {
        self.domains.len()
    }

    pub fn index(&self, k: DomainId) -> Result<usize, OptError> {
        self.domains
            .binary_search_by_key(&k, |d| d.id)
            .map_err(|_| OptError::UnknownDomain(k))
    }

    pub fn lower(&self) -> Vec<f64> {
        self.domains.iter().map(|d| d.r_min).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.domains.iter().map(|d| d.r_max).collect()
    }

    pub fn link(&self, id: LinkId) -> Option<&SharedLink> {
        self.links
            .binary_search_by_key(&id, |l| l.id)
            .ok()
            .map(|i| &self.links[i])
    }

    pub fn shared_links(&self, m: DomainId, n: DomainId) -> BTreeSet<LinkId> {
        self.links
            .iter()
            .filter(|l| l.carries(m) && l.carries(n))
            .map(|l| l.id)
            .collect()
    }

    /// A node is shared when its incident links carry flow of both domains.
    pub fn shared_nodes(&self, m: DomainId, n: DomainId) -> BTreeSet<NodeId> {
        self.nodes
            .iter()
            .filter(|node| {
                let carries = |k| {
                    node.incident
                        .iter()
                        .any(|inc| self.link(inc.link).is_some_and(|l| l.carries(k)))
                };
                carries(m) && carries(n)
            })
            .map(|node| node.id)
            .collect()
    }

    pub(crate) fn check_dim(&self, r: &[f64]) -> Result<(), OptError> {
        if r.len() != self.dim() {
            return Err(OptError::DimensionMismatch {
                expected: self.dim(),
                got: r.len(),
            });
        }
        Ok(())
    }

    /// `sum_k a_{l,k} R_k`.
    pub fn link_flow(&self, l: &SharedLink, r: &[f64]) -> f64 {
        self.domains
            .iter()
            .zip(r)
            .map(|(d, x)| l.coeff(d.id) * x)
            .sum()
    }

    /// `(link, excess)` for every link whose joint flow exceeds capacity.
    pub fn violations(&self, r: &[f64]) -> Vec<(LinkId, f64)> {
        self.links
            .iter()
            .filter_map(|l| {
                let excess = self.link_flow(l, r) - l.capacity;
                (excess > 0.0).then_some((l.id, excess))
            })
            .collect()
    }

    pub fn feasible(&self, r: &[f64]) -> bool {
        self.violations(r).is_empty()
    }

    /// `C_l - flow_l` for every link.
    pub fn link_slack(&self, r: &[f64]) -> BTreeMap<LinkId, f64> {
        self.links
            .iter()
            .map(|l| (l.id, l.capacity - self.link_flow(l, r)))
            .collect()
    }

    /// Energy drawn at `node`: `sum_l (e_tx(d) + e_rx(d)) * flow_l`.
    pub fn node_energy(&self, node: &SharedNode, r: &[f64]) -> Result<f64, OptError> {
        let mut total = 0.0;
        for inc in &node.incident {
            let l = self.link(inc.link).ok_or(OptError::UnknownLink {
                node: node.id,
                link: inc.link,
            })?;
            total += (node.e_tx(inc.distance) + node.e_rx(inc.distance)) * self.link_flow(l, r);
        }
        Ok(total)
    }

    /// Sum, over the links of node, of `a_{l,k}` for links carrying domain k;
    /// domain k's flow at the node is this times `R_k`.
    fn node_coeff(&self, node: &SharedNode, k: DomainId) -> f64 {
        node.incident
            .iter()
            .filter_map(|inc| self.link(inc.link))
            .map(|l| l.coeff(k))
            .sum()
    }

    /// Longest incident link of the node carrying either domain.
    fn node_distance(&self, node: &SharedNode, m: DomainId, n: DomainId) -> f64 {
        node.incident
            .iter()
            .filter(|inc| {
                self.link(inc.link)
                    .is_some_and(|l| l.carries(m) || l.carries(n))
            })
            .map(|inc| inc.distance)
            .fold(0.0, f64::max)
    }

    fn pair(&self, m: DomainId, n: DomainId) -> Result<(usize, usize), OptError> {
        if m == n {
            return Err(OptError::SameDomain(m));
        }
        Ok((self.index(m)?, self.index(n)?))
    }

    /// Bilinear coefficient `c` with `phi_link = c * R_m * R_n`.
    fn link_coeff(&self, m: DomainId, n: DomainId) -> f64 {
        self.links
            .iter()
            .filter(|l| l.carries(m) && l.carries(n))
            .map(|l| l.coeff(m) * l.coeff(n) / l.capacity)
            .sum()
    }

    /// Bilinear coefficient `c` with `phi_energy = c * R_m * R_n`.
    fn energy_coeff(&self, m: DomainId, n: DomainId) -> f64 {
        let shared = self.shared_nodes(m, n);
        self.nodes
            .iter()
            .filter(|node| shared.contains(&node.id))
            .map(|node| {
                node.e_tx(self.node_distance(node, m, n))
                    * self.node_coeff(node, m)
                    * self.node_coeff(node, n)
            })
            .sum()
    }

    pub fn phi_link(&self, m: DomainId, n: DomainId, r: &[f64]) -> Result<f64, OptError> {
        self.check_dim(r)?;
        let (i, j) = self.pair(m, n)?;
        Ok(self
            .links
            .iter()
            .filter(|l| l.carries(m) && l.carries(n))
            .map(|l| (l.coeff(m) * r[i]) * (l.coeff(n) * r[j]) / l.capacity)
            .sum())
    }

    pub fn phi_energy(&self, m: DomainId, n: DomainId, r: &[f64]) -> Result<f64, OptError> {
        self.check_dim(r)?;
        let (i, j) = self.pair(m, n)?;
        let shared = self.shared_nodes(m, n);
        Ok(self
            .nodes
            .iter()
            .filter(|node| shared.contains(&node.id))
            .map(|node| {
                let fm = self.node_coeff(node, m) * r[i];
                let fn_ = self.node_coeff(node, n) * r[j];
                node.e_tx(self.node_distance(node, m, n)) * fm * fn_
            })
            .sum())
    }

    pub fn phi_utility(&self, m: DomainId, n: DomainId, r: &[f64]) -> Result<f64, OptError> {
        self.check_dim(r)?;
        let (i, j) = self.pair(m, n)?;
        Ok(phi_utility(&self.domains[i], &self.domains[j], r[i], r[j]))
    }

    /// Weighted combination of the three interaction components. The
    /// utility component is included only when the pair's coupling edge
    /// carries the utility flag.
    pub fn phi_total(&self, m: DomainId, n: DomainId, r: &[f64]) -> Result<f64, OptError> {
        let w = self.coupling.weights;
        let util = match self.coupling.edge(m, n) {
            Some(e) if e.utility => self.phi_utility(m, n, r)?,
            _ => 0.0,
        };
        Ok(w.link * self.phi_link(m, n, r)?
            + w.energy * self.phi_energy(m, n, r)?
            + w.utility * util)
    }

    pub fn objective(&self, r: &[f64], mode: Mode) -> Result<f64, OptError> {
        self.check_dim(r)?;
        Ok(self.model().objective(r, mode))
    }

    pub fn gradient(&self, r: &[f64], mode: Mode) -> Result<Vec<f64>, OptError> {
        self.check_dim(r)?;
        let mut g = vec![0.0; self.dim()];
        self.model().gradient(r, mode, &mut g);
        Ok(g)
    }

    /// Precomputed dense form used by the optimizer.
    pub(crate) fn model(&self) -> Model {
        let w = self.coupling.weights;
        let pairs = self
            .coupling
            .edges
            .iter()
            .map(|e| {
                let i = self.index(e.m).expect("validated");
                let j = self.index(e.n).expect("validated");
                let bilinear =
                    w.link * self.link_coeff(e.m, e.n) + w.energy * self.energy_coeff(e.m, e.n);
                let util = if e.utility {
                    w.utility * self.domains[i].gamma * self.domains[j].gamma
                } else {
                    0.0
                };
                PairTerm {
                    i,
                    j,
                    sign: e.sign.factor(),
                    bilinear,
                    util,
                }
            })
            .collect();
        Model {
            gamma: self.domains.iter().map(|d| d.gamma).collect(),
            lambda: self.domains.iter().map(|d| d.lambda).collect(),
            pairs,
        }
    }

    /// Capacity rows as seen by each mode. Coupled: one joint row per link.
    /// Isolated: each domain sees every link it uses on its own, so link
    /// `l` contributes the row `a_{l,k} R_k <= C_l` for each domain k.
    pub(crate) fn rows(&self, mode: Mode) -> Vec<Row> {
        let k = self.dim();
        let mut rows = Vec::new();
        for l in &self.links {
            let coeffs: Vec<f64> = self.domains.iter().map(|d| l.coeff(d.id)).collect();
            if coeffs.iter().all(|&a| a == 0.0) {
                continue;
            }
            match mode {
                Mode::Coupled => rows.push(Row {
                    link: l.id,
                    coeffs,
                    cap: l.capacity,
                }),
                Mode::Isolated => {
                    for (i, &a) in coeffs.iter().enumerate() {
                        if a > 0.0 {
                            let mut single = vec![0.0; k];
                            single[i] = a;
                            rows.push(Row {
                                link: l.id,
                                coeffs: single,
                                cap: l.capacity,
                            });
                        }
                    }
                }
            }
        }
        rows
    }
}

pub fn phi_utility(dm: &DomainSpec, dn: &DomainSpec, rm: f64, rn: f64) -> f64 {
    dm.gamma * dn.gamma * (rm - dm.lambda) * (rn - dn.lambda)
}

#[derive(Debug, Clone)]
pub(crate) struct PairTerm {
    i: usize,
    j: usize,
    sign: f64,
    bilinear: f64,
    util: f64,
}

/// Dense objective: `sum U_k - sum_edges sign * phi` in coupled mode.
#[derive(Debug, Clone)]
pub(crate) struct Model {
    gamma: Vec<f64>,
    lambda: Vec<f64>,
    pairs: Vec<PairTerm>,
}

impl Model {
    pub fn objective(&self, r: &[f64], mode: Mode) -> f64 {
        let mut total: f64 = r
            .iter()
            .enumerate()
            .map(|(k, &x)| utility(self.gamma[k], self.lambda[k], x))
            .sum();
        if mode == Mode::Coupled {
            for p in &self.pairs {
                let phi = p.bilinear * r[p.i] * r[p.j]
                    + p.util * (r[p.i] - self.lambda[p.i]) * (r[p.j] - self.lambda[p.j]);
                total -= p.sign * phi;
            }
        }
        total
    }

    pub fn gradient(&self, r: &[f64], mode: Mode, out: &mut [f64]) {
        for (k, &x) in r.iter().enumerate() {
            let u = utility(self.gamma[k], self.lambda[k], x);
            out[k] = self.gamma[k] * u * (1.0 - u);
        }
        if mode == Mode::Coupled {
            for p in &self.pairs {
                let dm = r[p.i] - self.lambda[p.i];
                let dn = r[p.j] - self.lambda[p.j];
                out[p.i] -= p.sign * (p.bilinear * r[p.j] + p.util * dn);
                out[p.j] -= p.sign * (p.bilinear * r[p.i] + p.util * dm);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn domain(id: DomainId, gamma: f64, lambda: f64) -> DomainSpec {
        DomainSpec {
            id,
            gamma,
            lambda,
            r_min: 0.0,
            r_max: 10.0,
        }
    }

    fn link(id: LinkId, cap: f64, coeffs: &[(DomainId, f64)]) -> SharedLink {
        SharedLink {
            id,
            capacity: cap,
            coeffs: coeffs.iter().copied().collect(),
        }
    }

    fn two_domain(links: Vec<SharedLink>, nodes: Vec<SharedNode>) -> Scenario {
        Scenario::new(ScenarioFile {
            domains: vec![domain(0, 1.0, 4.0), domain(1, 2.0, 3.0)],
            links,
            nodes,
            coupling: CouplingSpec::default(),
        })
        .unwrap()
    }

    #[test]
    fn utility_values() {
        assert_eq!(utility(3.0, 1.5, 1.5), 0.5);
        assert!((utility(2.0, 1.0, 2.0) - 0.880797077977882).abs() < 1e-12);
        let tiny = utility(1.0, 0.0, -30.0);
        assert!(tiny > 0.0 && tiny < 1e-12);
        assert!(utility(1.0, 0.0, 800.0) <= 1.0);
    }

    #[test]
    fn link_flow_examples() {
        let sc = two_domain(vec![link(0, 10.0, &[(0, 1.0), (1, 1.0)])], vec![]);
        assert_eq!(sc.link_flow(&sc.links()[0], &[2.0, 3.0]), 5.0);
        assert!(sc.feasible(&[2.0, 3.0]));

        let sc = two_domain(vec![link(0, 10.0, &[(0, 2.0), (1, 0.0)])], vec![]);
        assert_eq!(sc.link_flow(&sc.links()[0], &[6.0, 9.0]), 12.0);
        assert_eq!(sc.violations(&[6.0, 9.0]), vec![(0, 2.0)]);

        let sc = two_domain(vec![link(0, 1.0, &[])], vec![]);
        assert!(sc.feasible(&[10.0, 10.0]));
    }

    #[test]
    fn node_energy_example() {
        let node = SharedNode {
            id: 7,
            eps_tx: 0.1,
            eps_rx: 0.05,
            incident: vec![NodeLink {
                link: 0,
                distance: 2.0,
            }],
        };
        let sc = two_domain(vec![link(0, 10.0, &[(0, 1.0), (1, 1.0)])], vec![node.clone()]);
        let e = sc.node_energy(&node, &[2.0, 3.0]).unwrap();
        assert!((e - 2.25).abs() < 1e-12);
        assert_eq!(sc.node_energy(&node, &[0.0, 0.0]).unwrap(), 0.0);
        let doubled = two_domain(vec![link(0, 10.0, &[(0, 2.0), (1, 2.0)])], vec![node.clone()]);
        assert!((doubled.node_energy(&node, &[2.0, 3.0]).unwrap() - 4.5).abs() < 1e-12);
    }

    #[test]
    fn phi_components() {
        let node = SharedNode {
            id: 1,
            eps_tx: 0.1,
            eps_rx: 0.0,
            incident: vec![NodeLink {
                link: 0,
                distance: 2.0,
            }],
        };
        let sc = two_domain(vec![link(0, 10.0, &[(0, 1.0), (1, 1.0)])], vec![node]);
        let r = [2.0, 3.0];
        assert!((sc.phi_link(0, 1, &r).unwrap() - 0.6).abs() < 1e-12);
        assert_eq!(sc.phi_link(0, 1, &r), sc.phi_link(1, 0, &r));
        // e_tx(2) = 0.4, flows 2 and 3
        assert!((sc.phi_energy(0, 1, &r).unwrap() - 2.4).abs() < 1e-12);
        assert_eq!(sc.phi_energy(0, 1, &[0.0, 3.0]).unwrap(), 0.0);
        // gamma (1, 2), offsets (-2, 0)
        assert_eq!(sc.phi_utility(0, 1, &r).unwrap(), 0.0);
        let r2 = [6.0, 4.0];
        assert!((sc.phi_utility(0, 1, &r2).unwrap() - 4.0).abs() < 1e-12);
        let total = sc.phi_total(0, 1, &r2).unwrap();
        let parts = sc.phi_link(0, 1, &r2).unwrap()
            + sc.phi_energy(0, 1, &r2).unwrap()
            + sc.phi_utility(0, 1, &r2).unwrap();
        assert!((total - parts).abs() < 1e-12);
        assert!(matches!(
            sc.phi_link(0, 0, &r),
            Err(OptError::SameDomain(0))
        ));
        assert!(matches!(
            sc.phi_link(0, 5, &r),
            Err(OptError::UnknownDomain(5))
        ));
    }

    #[test]
    fn phi_utility_unit_gammas() {
        let a = domain(0, 1.0, 0.0);
        let b = domain(1, 1.0, 0.0);
        assert_eq!(phi_utility(&a, &b, 2.0, 3.0), 6.0);
        assert!(phi_utility(&a, &b, -2.0, 3.0) < 0.0);
    }

    #[test]
    fn objective_modes() {
        let sc = two_domain(vec![link(0, 10.0, &[(0, 1.0), (1, 1.0)])], vec![]);
        let r = [5.0, 4.0];
        let sum_u = sc.domains()[0].utility(5.0) + sc.domains()[1].utility(4.0);
        assert_eq!(sc.objective(&r, Mode::Isolated).unwrap(), sum_u);
        let coupled = sc.objective(&r, Mode::Coupled).unwrap();
        let expect = sum_u - sc.phi_total(0, 1, &r).unwrap();
        assert!((coupled - expect).abs() < 1e-12);

        let no_share = two_domain(vec![link(0, 10.0, &[(0, 1.0)])], vec![]);
        assert!(no_share.coupling().is_empty());
        assert_eq!(
            no_share.objective(&r, Mode::Coupled).unwrap(),
            no_share.objective(&r, Mode::Isolated).unwrap()
        );
        assert!(matches!(
            sc.objective(&[1.0], Mode::Isolated),
            Err(OptError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gradient_at_midpoint() {
        let sc = two_domain(vec![], vec![]);
        let g = sc.gradient(&[4.0, 3.0], Mode::Coupled).unwrap();
        assert!((g[0] - 0.25).abs() < 1e-15);
        assert!((g[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bonus_sign_flips_phi() {
        let mut file = ScenarioFile {
            domains: vec![domain(0, 1.0, 4.0), domain(1, 2.0, 3.0)],
            links: vec![link(0, 10.0, &[(0, 1.0), (1, 1.0)])],
            nodes: vec![],
            coupling: CouplingSpec::Auto {
                utility: false,
                weights: ComponentWeights::default(),
                sign: CouplingSign::Bonus,
            },
        };
        let sc = Scenario::new(file.clone()).unwrap();
        let r = [2.0, 3.0];
        let iso = sc.objective(&r, Mode::Isolated).unwrap();
        assert!((sc.objective(&r, Mode::Coupled).unwrap() - (iso + 0.6)).abs() < 1e-12);
        file.coupling = CouplingSpec::Auto {
            utility: false,
            weights: ComponentWeights {
                link: 1.0,
                energy: 0.0,
                utility: 0.0,
            },
            sign: CouplingSign::Penalty,
        };
        let sc = Scenario::new(file).unwrap();
        assert_eq!(
            sc.phi_total(0, 1, &r).unwrap(),
            sc.phi_link(0, 1, &r).unwrap()
        );
    }

    #[test]
    fn validation_errors() {
        let base = ScenarioFile {
            domains: vec![domain(0, 1.0, 4.0), domain(1, 2.0, 3.0)],
            links: vec![link(0, 10.0, &[(0, 1.0), (1, 1.0)])],
            nodes: vec![],
            coupling: CouplingSpec::default(),
        };
        let mut bad = base.clone();
        bad.domains[0].gamma = 0.0;
        assert!(matches!(Scenario::new(bad), Err(OptError::InvalidDomain { .. })));
        let mut bad = base.clone();
        bad.domains[1].r_max = bad.domains[1].r_min;
        assert!(matches!(Scenario::new(bad), Err(OptError::InvalidDomain { .. })));
        let mut bad = base.clone();
        bad.links[0].capacity = 0.0;
        assert!(matches!(Scenario::new(bad), Err(OptError::InvalidLink { .. })));
        let mut bad = base.clone();
        bad.links[0].coeffs.insert(9, 1.0);
        assert!(matches!(Scenario::new(bad), Err(OptError::InvalidLink { .. })));
        let mut bad = base.clone();
        bad.coupling = CouplingSpec::Explicit {
            edges: vec![],
            weights: ComponentWeights::default(),
        };
        assert!(matches!(
            Scenario::new(bad),
            Err(OptError::InvalidCoupling { .. })
        ));
        let mut ok = base.clone();
        ok.coupling = CouplingSpec::Explicit {
            edges: vec![CouplingEdge {
                m: 1,
                n: 0,
                links: BTreeSet::from([0]),
                nodes: BTreeSet::new(),
                utility: false,
                sign: CouplingSign::Penalty,
            }],
            weights: ComponentWeights::default(),
        };
        let sc = Scenario::new(ok).unwrap();
        assert_eq!(sc.coupling().edges[0].m, 0);
        let mut bad = base;
        bad.links.clear();
        bad.coupling = CouplingSpec::Explicit {
            edges: vec![CouplingEdge {
                m: 0,
                n: 1,
                links: BTreeSet::new(),
                nodes: BTreeSet::new(),
                utility: false,
                sign: CouplingSign::Penalty,
            }],
            weights: ComponentWeights::default(),
        };
        assert!(matches!(
            Scenario::new(bad),
            Err(OptError::InvalidCoupling { .. })
        ));
    }

    #[test]
    fn scenario_file_round_trip() {
        let text = r#"{
            "domains": [{"id": 0, "gamma": 1, "lambda": 5, "r_min": 0, "r_max": 10}],
            "links": [{"id": 3, "capacity": 4, "coeffs": {"0": 1.0}}],
            "coupling": {"mode": "auto"}
        }"#;
        let file = ScenarioFile::from_json(text).unwrap();
        assert_eq!(file.links[0].coeff(0), 1.0);
        assert_eq!(ScenarioFile::from_json(&file.to_json()).unwrap(), file);
        assert!(Scenario::new(file).is_ok());
    }
}
