use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mvgraph::analytics::betweenness_centrality;
use mvgraph::crossdomain_opt::{compare, sample, Scenario};
use mvgraph::netopt::{max_flow_min_cut, minimum_spanning_tree};
use mvgraph::partition::{spectral_bisection, DEFAULT_TOL};
use mvgraph::scenario::{cdn_place_caches, gen_metaverse, uniform_demand, GeneratorConfig};
use mvgraph::GraphView;

fn network_view() -> GraphView {
    let cfg = GeneratorConfig {
        routers: 40,
        servers: 10,
        devices: 80,
        ..GeneratorConfig::with_seed(1)
    };
    let g = gen_metaverse(&cfg).unwrap();
    let snap = g.snapshot_at(g.latest_stamp());
    snap.layer_subgraph(snap.layer_by_name("network").unwrap()).unwrap()
}

fn graph_algorithms(c: &mut Criterion) {
    let view = network_view();
    let (s, t) = (view.vertices()[0], *view.vertices().last().unwrap());
    c.bench_function("betweenness/network-130", |b| {
        b.iter(|| betweenness_centrality(black_box(&view)).unwrap())
    });
    c.bench_function("max_flow/network-130", |b| {
        b.iter(|| max_flow_min_cut(black_box(&view), s, t).unwrap())
    });
    c.bench_function("mst/network-130", |b| {
        b.iter(|| minimum_spanning_tree(black_box(&view)).unwrap())
    });
    c.bench_function("spectral_bisection/network-130", |b| {
        b.iter(|| spectral_bisection(black_box(&view), DEFAULT_TOL).unwrap())
    });
    let demand = uniform_demand(view.vertices());
    c.bench_function("cdn_greedy/k4", |b| {
        b.iter(|| cdn_place_caches(black_box(&view), 4, &demand).unwrap())
    });
}

fn optimizer(c: &mut Criterion) {
    let gap = Scenario::new(sample::coupling_gap_demo()).unwrap();
    let dense = Scenario::new(sample::dense(3, 4)).unwrap();
    let mut group = c.benchmark_group("compare");
    group.sample_size(10);
    group.bench_function("coupling_gap", |b| b.iter(|| compare(black_box(&gap), 42).unwrap()));
    group.bench_function("dense-4", |b| b.iter(|| compare(black_box(&dense), 42)));
    group.finish();
}

criterion_group!(benches, graph_algorithms, optimizer);
criterion_main!(benches);
