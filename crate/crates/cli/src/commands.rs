use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use mvgraph::analytics::{
    betweenness_centrality, clustering_report, degree_centrality, reports_to_csv,
    weakly_connected_components, CentralityReport,
};
use mvgraph::crossdomain_opt::{compare, optimize as run_optimizer, outcome, Mode, Scenario, ScenarioFile};
use mvgraph::graph_core::{export_json, import_json, snapshot_to_dot, DotStyle};
use mvgraph::partition::{spectral_kway, DEFAULT_TOL};
use mvgraph::scenario::{
    cdn_place_caches, consensus_sim, consistency_sim, generate, replicate_items, uniform_demand,
    GeneratorConfig, Update, DEFAULT_MAX_ROUNDS,
};
use mvgraph::{GraphView, Role, SnapshotView, TemporalMultiLayerGraph, VertexId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::CliError;
use crate::manifest::{sibling, Run};
use crate::{Format, Metric, OptMode, SimKind};

fn load_graph(run: &mut Run, path: &Path) -> Result<TemporalMultiLayerGraph, CliError> {
    Ok(import_json(&run.read(path)?)?)
}

/// Analyses run on the state after the last logged event.
fn latest(g: &TemporalMultiLayerGraph) -> SnapshotView {
    g.snapshot_at(g.latest_stamp())
}

fn layer_view(s: &SnapshotView, layer: &str) -> Result<GraphView, CliError> {
    Ok(s.layer_subgraph(s.layer_by_name(layer)?)?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

pub fn gen(
    config: serde_json::Value,
    scenario: &str,
    seed: u64,
    params: Option<&Path>,
    out: &Path,
) -> Result<(), CliError> {
    let mut run = Run::new("gen", config, Some(seed));
    let mut cfg: GeneratorConfig = match params {
        Some(p) => serde_json::from_str(&run.read(p)?)?,
        None => GeneratorConfig::default(),
    };
    cfg.seed = seed;
    let g = generate(scenario, &cfg)?;
    run.write(out, &(export_json(&g) + "\n"))?;
    run.finish(out)
}

fn components_report(g: &GraphView) -> CentralityReport {
    let labels = weakly_connected_components(g).labels;
    CentralityReport {
        metric: "component".to_string(),
        scores: labels.into_iter().map(|(v, c)| (v, c.0 as f64)).collect(),
    }
}

pub fn analyze(
    config: serde_json::Value,
    input: &Path,
    layer: &str,
    metrics: &[Metric],
    out: &Path,
) -> Result<(), CliError> {
    let mut run = Run::new("analyze", config, None);
    let g = load_graph(&mut run, input)?;
    let view = layer_view(&latest(&g), layer)?;
    let mut reports = Vec::with_capacity(metrics.len());
    for m in metrics {
        reports.push(match m {
            Metric::Degree => degree_centrality(&view)?,
            Metric::Betweenness => betweenness_centrality(&view)?,
            Metric::Clustering => clustering_report(&view),
            Metric::Components => components_report(&view),
        });
    }
    run.write(out, &reports_to_csv(&reports))?;
    run.finish(out)
}

pub fn partition(
    config: serde_json::Value,
    input: &Path,
    layer: &str,
    k: usize,
    out: &Path,
) -> Result<(), CliError> {
    let mut run = Run::new("partition", config, None);
    let g = load_graph(&mut run, input)?;
    let view = layer_view(&latest(&g), layer)?;
    let res = spectral_kway(&view, k, DEFAULT_TOL)?;
    run.write(out, &to_json(&res))?;
    println!("cut_edges={} block_sizes={:?}", res.cut_edges, res.block_sizes);
    run.finish(out)
}

pub fn optimize(
    config: serde_json::Value,
    scenario: &Path,
    mode: OptMode,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    let mut run = Run::new("optimize", config, Some(seed));
    let sc = Scenario::new(ScenarioFile::from_json(&run.read(scenario)?)?)?;
    let (report, trace) = match mode {
        OptMode::Both => {
            let report = compare(&sc, seed)?;
            (report.to_json() + "\n", report.trace_csv())
        }
        OptMode::Isolated | OptMode::Coupled => {
            let (m, name) = match mode {
                OptMode::Isolated => (Mode::Isolated, "isolated"),
                _ => (Mode::Coupled, "coupled"),
            };
            let o = outcome(&sc, &run_optimizer(&sc, m, seed)?);
            let mut csv = String::from("mode,iter,objective,max_violation\n");
            for p in &o.trace {
                writeln!(csv, "{name},{},{},{}", p.iter, p.objective, p.max_violation)
                    .expect("string write");
            }
            (to_json(&json!({ "seed": seed, "mode": name, "outcome": o })), csv)
        }
    };
    run.write(out, &report)?;
    run.write(&sibling(out, "trace.csv"), &trace)?;
    run.finish(out)
}

/// `--params` schema for `simulate`. Unset fields take the defaults below.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    /// Layer to simulate on; the flattened graph when absent.
    pub layer: Option<String>,
    pub seed: u64,
    /// Consensus: stop once max - min falls to `tol`.
    pub tol: f64,
    pub max_rounds: usize,
    /// Consensus initial values by vertex id; seeded uniform [0, 1) if absent.
    pub values: Option<BTreeMap<u64, f64>>,
    /// Consistency: replicas per item.
    pub replication: usize,
    /// Consistency: synthetic item count when the graph has no content items.
    pub items: usize,
    /// CDN: number of caches.
    pub k: usize,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            layer: None,
            seed: 0,
            tol: 1e-6,
            max_rounds: DEFAULT_MAX_ROUNDS,
            values: None,
            replication: 2,
            items: 8,
            k: 3,
        }
    }
}

fn with_roles(s: &SnapshotView, view: &GraphView, roles: &[Role]) -> Vec<VertexId> {
    view.vertices()
        .iter()
        .copied()
        .filter(|v| {
            s.vertex(*v)
                .is_some_and(|r| roles.iter().any(|role| r.roles.contains(role)))
        })
        .collect()
}

pub fn simulate(
    mut config: serde_json::Value,
    kind: SimKind,
    input: &Path,
    params: Option<&Path>,
    out: &Path,
) -> Result<(), CliError> {
    let mut run = Run::new("simulate", serde_json::Value::Null, None);
    let p: SimParams = match params {
        Some(path) => serde_json::from_str(&run.read(path)?)?,
        None => SimParams::default(),
    };
    config["resolved_params"] = serde_json::to_value(&p)?;
    let g = load_graph(&mut run, input)?;
    let snap = latest(&g);
    let view = match &p.layer {
        Some(name) => layer_view(&snap, name)?,
        None => snap.flatten(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut csv = String::new();
    let summary = match kind {
        SimKind::Consensus => {
            let values: BTreeMap<VertexId, f64> = match &p.values {
                Some(v) => v.iter().map(|(&k, &x)| (VertexId(k), x)).collect(),
                None => view.vertices().iter().map(|&v| (v, rng.gen::<f64>())).collect(),
            };
            let rep = consensus_sim(&values, &view, p.tol, p.max_rounds)?;
            csv.push_str("round,spread\n");
            for (i, s) in rep.spread_by_round.iter().enumerate() {
                writeln!(csv, "{i},{s}").expect("string write");
            }
            to_json(&rep)
        }
        SimKind::Consistency => {
            let mut nodes = with_roles(&snap, &view, &[Role::StorageNode, Role::Server]);
            if nodes.is_empty() {
                nodes = view.vertices().to_vec();
            }
            let mut items = with_roles(&snap, &snap.flatten(), &[Role::ContentItem]);
            if items.is_empty() {
                let base = snap.vertices().map(|v| v.id.0 + 1).max().unwrap_or(0);
                items = (0..p.items as u64).map(|i| VertexId(base + i)).collect();
            }
            let placement = replicate_items(&items, &nodes, p.replication)?;
            let updates: Vec<Update> = placement
                .replicas
                .iter()
                .map(|(&item, holders)| {
                    let holders: Vec<VertexId> = holders.iter().copied().collect();
                    Update {
                        item,
                        node: *holders.choose(&mut rng).expect("replication >= 1"),
                        version: rng.gen_range(1..=100),
                    }
                })
                .collect();
            let rep = consistency_sim(&placement, &view, &updates)?;
            csv.push_str("round,agreeing\n");
            for (i, a) in rep.agreeing_by_round.iter().enumerate() {
                writeln!(csv, "{i},{a}").expect("string write");
            }
            to_json(&json!({ "placement": placement, "updates": updates, "report": rep }))
        }
        SimKind::Cdn => {
            let mut clients = with_roles(&snap, &view, &[Role::Device, Role::User]);
            if clients.is_empty() {
                clients = view.vertices().to_vec();
            }
            let rep = cdn_place_caches(&view, p.k, &uniform_demand(&clients))?;
            csv.push_str("round,expected_hops\n");
            for (i, c) in rep.cost_by_step.iter().enumerate() {
                writeln!(csv, "{},{c}", i + 1).expect("string write");
            }
            to_json(&rep)
        }
    };
    let mut run = run.with_config(config, Some(p.seed));
    run.write(out, &summary)?;
    run.write(&sibling(out, "series.csv"), &csv)?;
    run.finish(out)
}

pub fn export(
    config: serde_json::Value,
    input: &Path,
    format: Format,
    out: &Path,
) -> Result<(), CliError> {
    let mut run = Run::new("export", config, None);
    let g = load_graph(&mut run, input)?;
    let text = match format {
        Format::Json => export_json(&g) + "\n",
        Format::Dot => snapshot_to_dot(&latest(&g), &DotStyle::default()),
    };
    run.write(out, &text)?;
    run.finish(out)
}
