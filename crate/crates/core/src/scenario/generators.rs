use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::graph_core::{LayerId, NewEdge, Role, TemporalMultiLayerGraph, Timestamp, VertexId};

/// Sizes and model parameters for every generator. Each generator reads the
/// fields it needs and ignores the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub routers: usize,
    pub servers: usize,
    pub devices: usize,
    /// Backbone links each new router opens.
    pub attachment: usize,
    pub users: usize,
    pub social_attachment: usize,
    pub complete_social: bool,
    pub admins: usize,
    pub items: usize,
    /// Chance that an admin other than the primary one manages an item.
    pub manage_prob: f64,
    /// Content items each user views in the combined generator.
    pub views_per_user: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 0,
            routers: 12,
            servers: 4,
            devices: 24,
            attachment: 2,
            users: 24,
            social_attachment: 2,
            complete_social: false,
            admins: 3,
            items: 16,
            manage_prob: 0.25,
            views_per_user: 2,
        }
    }
}

impl GeneratorConfig {
    pub fn with_seed(seed: u64) -> Self {
        GeneratorConfig {
            seed,
            ..Self::default()
        }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(0.0..=1.0).contains(&self.manage_prob) {
            return Err(ScenarioError::InvalidProbability {
                name: "manage_prob",
                value: self.manage_prob,
            });
        }
        Ok(())
    }
}

const T0: Timestamp = Timestamp(0);

fn connect(
    g: &mut TemporalMultiLayerGraph,
    a: VertexId,
    b: VertexId,
    layer: LayerId,
    w: f64,
    rel: &str,
) {
    g.add_edge(NewEdge::intra(a, b, layer, w, rel, T0))
        .expect("generator edges join live vertices of one layer");
}

/// Preferential attachment: vertex `i` links to `min(m, i)` distinct earlier
/// vertices chosen with probability proportional to `degree + 1`.
fn preferential_attachment(
    count: usize,
    m: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, usize)> {
    let mut degree = vec![0usize; count];
    let mut edges = Vec::new();
    for i in 1..count {
        let existing: Vec<usize> = (0..i).collect();
        let picks: Vec<usize> = existing
            .choose_multiple_weighted(rng, m.min(i), |&j| (degree[j] + 1) as f64)
            .expect("positive weights")
            .copied()
            .collect();
        let mut picks = picks;
        picks.sort_unstable();
        for j in picks {
            degree[i] += 1;
            degree[j] += 1;
            edges.push((j, i));
        }
    }
    edges
}

/// Routers on a preferential-attachment backbone, servers on random routers,
/// devices on the router of a randomly chosen home server (any router when
/// there are no servers).
pub fn add_network_layer(
    g: &mut TemporalMultiLayerGraph,
    cfg: &GeneratorConfig,
    name: &str,
) -> Result<NetworkParts, ScenarioError> {
    if cfg.routers == 0 {
        return Err(ScenarioError::ZeroRouters);
    }
    let mut rng = cfg.rng(1);
    let layer = g.create_layer(name)?;
    let routers: Vec<VertexId> = (0..cfg.routers)
        .map(|_| g.add_simple_vertex(Role::Router, layer, T0))
        .collect::<Result<_, _>>()?;
    for (a, b) in preferential_attachment(cfg.routers, cfg.attachment.max(1), &mut rng) {
        let w = rng.gen_range(1..=10) as f64;
        connect(g, routers[a], routers[b], layer, w, "backbone");
    }
    let mut servers = Vec::with_capacity(cfg.servers);
    let mut server_router = Vec::with_capacity(cfg.servers);
    for _ in 0..cfg.servers {
        let s = g.add_simple_vertex(Role::Server, layer, T0)?;
        let r = rng.gen_range(0..routers.len());
        connect(g, s, routers[r], layer, 1.0, "uplink");
        servers.push(s);
        server_router.push(r);
    }
    let mut devices = Vec::with_capacity(cfg.devices);
    for _ in 0..cfg.devices {
        let d = g.add_simple_vertex(Role::Device, layer, T0)?;
        let r = if servers.is_empty() {
            rng.gen_range(0..routers.len())
        } else {
            server_router[rng.gen_range(0..servers.len())]
        };
        connect(g, d, routers[r], layer, 1.0, "access");
        devices.push(d);
    }
    Ok(NetworkParts {
        layer,
        routers,
        servers,
        devices,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParts {
    pub layer: LayerId,
    pub routers: Vec<VertexId>,
    pub servers: Vec<VertexId>,
    pub devices: Vec<VertexId>,
}

pub fn add_social_layer(
    g: &mut TemporalMultiLayerGraph,
    cfg: &GeneratorConfig,
    name: &str,
) -> Result<(LayerId, Vec<VertexId>), ScenarioError> {
    let mut rng = cfg.rng(2);
    let layer = g.create_layer(name)?;
    let users: Vec<VertexId> = (0..cfg.users)
        .map(|_| g.add_simple_vertex(Role::User, layer, T0))
        .collect::<Result<_, _>>()?;
    if cfg.complete_social {
        for i in 0..users.len() {
            for j in i + 1..users.len() {
                connect(g, users[i], users[j], layer, 1.0, "friend");
            }
        }
    } else {
        for (a, b) in preferential_attachment(users.len(), cfg.social_attachment.max(1), &mut rng)
        {
            connect(g, users[a], users[b], layer, 1.0, "friend");
        }
    }
    Ok((layer, users))
}

/// Admins manage content items with directed "manages" edges. Every item has
/// one uniformly drawn primary admin; each other admin joins with
/// probability `manage_prob`.
pub fn add_cms_layer(
    g: &mut TemporalMultiLayerGraph,
    cfg: &GeneratorConfig,
    name: &str,
) -> Result<CmsParts, ScenarioError> {
    cfg.validate()?;
    if cfg.items > 0 && cfg.admins == 0 {
        return Err(ScenarioError::ItemsWithoutAdmins);
    }
    let mut rng = cfg.rng(3);
    let layer = g.create_layer(name)?;
    let admins: Vec<VertexId> = (0..cfg.admins)
        .map(|_| g.add_simple_vertex(Role::Admin, layer, T0))
        .collect::<Result<_, _>>()?;
    let items: Vec<VertexId> = (0..cfg.items)
        .map(|_| g.add_simple_vertex(Role::ContentItem, layer, T0))
        .collect::<Result<_, _>>()?;
    for &item in &items {
        let primary = rng.gen_range(0..admins.len());
        for (j, &admin) in admins.iter().enumerate() {
            if j == primary || rng.gen_bool(cfg.manage_prob) {
                g.add_edge(NewEdge::intra(admin, item, layer, 1.0, "manages", T0).directed())?;
            }
        }
    }
    Ok(CmsParts {
        layer,
        admins,
        items,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmsParts {
    pub layer: LayerId,
    pub admins: Vec<VertexId>,
    pub items: Vec<VertexId>,
}

pub fn gen_network_layer(cfg: &GeneratorConfig) -> Result<TemporalMultiLayerGraph, ScenarioError> {
    let mut g = TemporalMultiLayerGraph::new();
    add_network_layer(&mut g, cfg, "network")?;
    Ok(g)
}

pub fn gen_social_layer(cfg: &GeneratorConfig) -> Result<TemporalMultiLayerGraph, ScenarioError> {
    let mut g = TemporalMultiLayerGraph::new();
    add_social_layer(&mut g, cfg, "social")?;
    Ok(g)
}

pub fn gen_cms_bipartite(cfg: &GeneratorConfig) -> Result<TemporalMultiLayerGraph, ScenarioError> {
    let mut g = TemporalMultiLayerGraph::new();
    add_cms_layer(&mut g, cfg, "content")?;
    Ok(g)
}

/// Network, social and content layers joined by inter-layer edges: each user
/// owns one device, views a few items, and each item is hosted on a server.
pub fn gen_metaverse(cfg: &GeneratorConfig) -> Result<TemporalMultiLayerGraph, ScenarioError> {
    let mut g = TemporalMultiLayerGraph::new();
    let net = add_network_layer(&mut g, cfg, "network")?;
    let (social, users) = add_social_layer(&mut g, cfg, "social")?;
    let cms = add_cms_layer(&mut g, cfg, "content")?;
    let mut rng = cfg.rng(4);
    let cross = |g: &mut TemporalMultiLayerGraph,
                     src: VertexId,
                     dst: VertexId,
                     ls: LayerId,
                     ld: LayerId,
                     rel: &str|
     -> Result<(), ScenarioError> {
        g.add_edge(NewEdge {
            src,
            dst,
            layer_src: ls,
            layer_dst: ld,
            directed: true,
            weight: 1.0,
            relation: rel.into(),
            t_start: T0,
        })?;
        Ok(())
    };
    for &u in &users {
        if let Some(&d) = net.devices.choose(&mut rng) {
            cross(&mut g, u, d, social, net.layer, "owns")?;
        }
        let viewed: BTreeSet<VertexId> = cms
            .items
            .choose_multiple(&mut rng, cfg.views_per_user.min(cms.items.len()))
            .copied()
            .collect();
        for item in viewed {
            cross(&mut g, u, item, social, cms.layer, "views")?;
        }
    }
    for &item in &cms.items {
        if let Some(&s) = net.servers.choose(&mut rng) {
            cross(&mut g, item, s, cms.layer, net.layer, "hosted-on")?;
        }
    }
    Ok(g)
}

/// Names accepted by [`generate`].
pub const SCENARIOS: [&str; 4] = ["network", "social", "cms", "metaverse"];

pub fn generate(name: &str, cfg: &GeneratorConfig) -> Result<TemporalMultiLayerGraph, ScenarioError> {
    match name {
        "network" => gen_network_layer(cfg),
        "social" => gen_social_layer(cfg),
        "cms" => gen_cms_bipartite(cfg),
        "metaverse" => gen_metaverse(cfg),
        other => Err(ScenarioError::UnknownScenario(other.to_string())),
    }
}

/// Uniform demand over every vertex of `vertices`.
pub fn uniform_demand(vertices: &[VertexId]) -> BTreeMap<VertexId, f64> {
    vertices.iter().map(|&v| (v, 1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::weakly_connected_components;
    use crate::graph_core::{Direction, Timestamp};

    fn cfg(routers: usize, servers: usize, devices: usize) -> GeneratorConfig {
        GeneratorConfig {
            routers,
            servers,
            devices,
            ..GeneratorConfig::with_seed(11)
        }
    }

    #[test]
    fn single_router_star() {
        let g = gen_network_layer(&cfg(1, 0, 3)).unwrap();
        let s = g.snapshot_at(Timestamp(0));
        assert_eq!(s.edges().len(), 3);
        let hub = s.neighbors(VertexId(0), Direction::Both, None).unwrap();
        assert_eq!(hub.len(), 3);
    }

    #[test]
    fn backbone_edge_count_and_connectivity() {
        let g = gen_network_layer(&cfg(20, 5, 30)).unwrap();
        let s = g.snapshot_at(Timestamp(0));
        let backbone = s.edges().iter().filter(|e| e.relation == "backbone").count();
        assert_eq!(backbone, 2 * (20 - 2) + 1);
        assert_eq!(weakly_connected_components(&s.flatten()).count, 1);
        assert!(matches!(
            gen_network_layer(&cfg(0, 1, 1)),
            Err(ScenarioError::ZeroRouters)
        ));
    }

    #[test]
    fn generators_are_deterministic() {
        for name in SCENARIOS {
            let a = generate(name, &GeneratorConfig::with_seed(5)).unwrap();
            let b = generate(name, &GeneratorConfig::with_seed(5)).unwrap();
            assert_eq!(a.events(), b.events(), "{name}");
        }
        let a = gen_network_layer(&GeneratorConfig::with_seed(1)).unwrap();
        let b = gen_network_layer(&GeneratorConfig::with_seed(2)).unwrap();
        assert_ne!(a.events(), b.events());
    }

    #[test]
    fn social_layer_shapes() {
        let mut c = GeneratorConfig::with_seed(3);
        c.users = 4;
        c.complete_social = true;
        let g = gen_social_layer(&c).unwrap();
        assert_eq!(g.snapshot_at(Timestamp(0)).edges().len(), 6);
        c.users = 1;
        c.complete_social = false;
        let g = gen_social_layer(&c).unwrap();
        let s = g.snapshot_at(Timestamp(0));
        assert_eq!((s.vertex_count(), s.edges().len()), (1, 0));
    }

    #[test]
    fn cms_is_bipartite_and_managed() {
        let mut c = GeneratorConfig::with_seed(8);
        c.admins = 2;
        c.items = 5;
        let g = gen_cms_bipartite(&c).unwrap();
        let s = g.snapshot_at(Timestamp(0));
        let layer = s.layer_by_name("content").unwrap();
        let admins: BTreeSet<_> = s
            .vertices()
            .filter(|v| v.roles.contains(&Role::Admin))
            .map(|v| v.id)
            .collect();
        let items: BTreeSet<_> = s
            .vertices()
            .filter(|v| v.roles.contains(&Role::ContentItem))
            .map(|v| v.id)
            .collect();
        let parts = (BTreeSet::from([Role::Admin]), BTreeSet::from([Role::ContentItem]));
        assert!(s.validate_bipartite(layer, &parts.0, &parts.1).unwrap().is_bipartite);
        assert_eq!(admins.len(), 2);
        for &i in &items {
            assert!(!s.neighbors(i, Direction::In, Some(layer)).unwrap().is_empty());
        }
        c.items = 0;
        assert!(gen_cms_bipartite(&c).unwrap().snapshot_at(Timestamp(0)).edges().is_empty());
        c.items = 3;
        c.admins = 0;
        assert!(matches!(
            gen_cms_bipartite(&c),
            Err(ScenarioError::ItemsWithoutAdmins)
        ));
    }

    #[test]
    fn metaverse_has_three_layers_and_cross_edges() {
        let g = gen_metaverse(&GeneratorConfig::with_seed(4)).unwrap();
        let s = g.snapshot_at(Timestamp(0));
        assert_eq!(s.layers().len(), 3);
        assert!(s.inter_layer_edges().count() > 0);
        assert!(matches!(
            generate("nope", &GeneratorConfig::default()),
            Err(ScenarioError::UnknownScenario(_))
        ));
    }
}
