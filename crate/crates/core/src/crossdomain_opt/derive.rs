//! Coupling graph inferred from a multilayer snapshot.
//!
//! Routers stand for links and servers, storage nodes and devices for nodes;
//! these are the only vertices two domains may share. Every other vertex
//! belongs to at most one domain.

use std::collections::{BTreeMap, BTreeSet};

use super::error::OptError;
use super::model::{ComponentWeights, CouplingEdge, CouplingGraph, CouplingSign, DomainId};
use crate::graph_core::{Role, SnapshotView, VertexId};

fn is_link_vertex(roles: &BTreeSet<Role>) -> bool {
    roles.contains(&Role::Router)
}

fn is_node_vertex(roles: &BTreeSet<Role>) -> bool {
    [Role::Server, Role::StorageNode, Role::Device]
        .iter()
        .any(|r| roles.contains(r))
}

fn touch(
    pairs: &mut BTreeMap<(DomainId, DomainId), CouplingEdge>,
    m: DomainId,
    n: DomainId,
) -> &mut CouplingEdge {
    let key = (m.min(n), m.max(n));
    pairs.entry(key).or_insert_with(|| CouplingEdge {
        m: key.0,
        n: key.1,
        links: BTreeSet::new(),
        nodes: BTreeSet::new(),
        utility: false,
        sign: CouplingSign::Penalty,
    })
}

/// Builds the coupling graph for `domains` (domain id to vertex subset).
/// Shared link and node ids are the ids of the shared vertices.
pub fn derive_coupling(
    s: &SnapshotView,
    domains: &BTreeMap<DomainId, BTreeSet<VertexId>>,
) -> Result<CouplingGraph, OptError> {
    let mut owners: BTreeMap<VertexId, Vec<DomainId>> = BTreeMap::new();
    for (&k, members) in domains {
        for &v in members {
            if !s.contains_vertex(v) {
                return Err(OptError::UnknownVertex(v));
            }
            owners.entry(v).or_default().push(k);
        }
    }

    let mut pairs = BTreeMap::new();
    for (&v, ks) in &owners {
        if ks.len() < 2 {
            continue;
        }
        let roles = &s.vertex(v).expect("checked above").roles;
        let link = is_link_vertex(roles);
        let node = is_node_vertex(roles);
        if !link && !node {
            return Err(OptError::OverlappingDomains {
                vertex: v,
                m: ks[0],
                n: ks[1],
            });
        }
        for (i, &m) in ks.iter().enumerate() {
            for &n in &ks[i + 1..] {
                let e = touch(&mut pairs, m, n);
                if link {
                    e.links.insert(v.0);
                }
                if node {
                    e.nodes.insert(v.0);
                }
            }
        }
    }

    let none = Vec::new();
    for e in s.inter_layer_edges() {
        let src = owners.get(&e.src).unwrap_or(&none);
        let dst = owners.get(&e.dst).unwrap_or(&none);
        for &m in src {
            for &n in dst {
                if m != n {
                    touch(&mut pairs, m, n).utility = true;
                }
            }
        }
    }

    Ok(CouplingGraph {
        edges: pairs.into_values().collect(),
        weights: ComponentWeights::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_core::{NewEdge, TemporalMultiLayerGraph, Timestamp};

    #[test]
    fn derive_examples() {
        let mut g = TemporalMultiLayerGraph::new();
        let net = g.create_layer("network").unwrap();
        let con = g.create_layer("content").unwrap();
        let t = Timestamp(0);
        let server = g.add_simple_vertex(Role::Server, net, t).unwrap();
        let router = g.add_simple_vertex(Role::Router, net, t).unwrap();
        let user = g.add_simple_vertex(Role::User, net, t).unwrap();
        let item = g.add_simple_vertex(Role::ContentItem, con, t).unwrap();
        let other = g.add_simple_vertex(Role::User, net, t).unwrap();
        let s = g.snapshot_at(t);

        let disjoint = BTreeMap::from([
            (0, BTreeSet::from([user])),
            (1, BTreeSet::from([item])),
        ]);
        assert!(derive_coupling(&s, &disjoint).unwrap().is_empty());

        let shared = BTreeMap::from([
            (0, BTreeSet::from([server, router, user])),
            (1, BTreeSet::from([server, other])),
        ]);
        let c = derive_coupling(&s, &shared).unwrap();
        assert_eq!(c.edges.len(), 1);
        assert_eq!(c.edges[0].nodes, BTreeSet::from([server.0]));
        assert!(c.edges[0].links.is_empty());
        assert!(!c.edges[0].utility);

        let bad = BTreeMap::from([
            (0, BTreeSet::from([user])),
            (1, BTreeSet::from([user])),
        ]);
        assert!(matches!(
            derive_coupling(&s, &bad),
            Err(OptError::OverlappingDomains { .. })
        ));

        g.add_edge(NewEdge {
            src: user,
            dst: item,
            layer_src: net,
            layer_dst: con,
            directed: true,
            weight: 1.0,
            relation: "views".into(),
            t_start: Timestamp(1),
        })
        .unwrap();
        let s = g.snapshot_at(Timestamp(1));
        let c = derive_coupling(&s, &disjoint).unwrap();
        assert_eq!(c.edges.len(), 1);
        assert!(c.edges[0].utility);
        assert_eq!((c.edges[0].m, c.edges[0].n), (0, 1));

        let unknown = BTreeMap::from([(0, BTreeSet::from([VertexId(99)]))]);
        assert_eq!(
            derive_coupling(&s, &unknown),
            Err(OptError::UnknownVertex(VertexId(99)))
        );
    }
}
