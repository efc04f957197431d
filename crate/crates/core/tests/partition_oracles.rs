use std::collections::BTreeMap;

use mvgraph::partition::{
    count_cut, fiedler_vector, laplacian, spectral_bisection, spectral_kway, PartitionError,
    DEFAULT_TOL,
};
use mvgraph::{GraphView, VertexId};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two `m`-cliques on `0..m` and `m..2m` joined by the bridge `(m-1, m)`.
fn barbell(m: u64) -> GraphView {
    let mut edges = Vec::new();
    for base in [0, m] {
        for i in 0..m {
            for j in i + 1..m {
                edges.push((base + i, base + j, 1.0));
            }
        }
    }
    edges.push((m - 1, m, 1.0));
    GraphView::from_edge_list(2 * m, &edges, false)
}

fn random_graph(seed: u64, n: u64, p: f64) -> GraphView {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v, rng.gen_range(0.5..3.0)));
            }
        }
    }
    GraphView::from_edge_list(n, &edges, false)
}

fn connected_random(seed: u64, n: u64) -> GraphView {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u64, u64, f64)> = (1..n)
        .map(|v| (rng.gen_range(0..v), v, rng.gen_range(0.5..3.0)))
        .collect();
    for _ in 0..n {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            edges.push((u, v, rng.gen_range(0.5..3.0)));
        }
    }
    GraphView::from_edge_list(n, &edges, false)
}

#[test]
fn barbells_split_at_the_bridge() {
    for m in 4..=8u64 {
        let g = barbell(m);
        let res = spectral_bisection(&g, DEFAULT_TOL).unwrap();
        for v in 0..2 * m {
            let want = usize::from(v >= m);
            assert_eq!(res.blocks[&VertexId(v)], want, "m={m} v{v}");
        }
        assert_eq!(res.cut_edges, 1);
        assert_eq!(res.block_sizes, vec![m as usize, m as usize]);
        let pair = fiedler_vector(&laplacian(&g), DEFAULT_TOL).unwrap();
        assert!(pair.residual <= 1e-8, "m={m} residual {}", pair.residual);
    }
}

#[test]
fn disconnected_graphs_have_zero_fiedler_value() {
    for seed in 0..20u64 {
        let a = 2 + seed % 5;
        let b = 1 + seed % 4;
        // two components: a path on 0..a and a path on a..a+b
        let mut edges: Vec<(u64, u64, f64)> = (1..a).map(|v| (v - 1, v, 1.0)).collect();
        edges.extend((a + 1..a + b).map(|v| (v - 1, v, 2.0)));
        let g = GraphView::from_edge_list(a + b, &edges, false);
        let pair = fiedler_vector(&laplacian(&g), DEFAULT_TOL).unwrap();
        assert!(pair.value.abs() <= 1e-8, "seed {seed}: {}", pair.value);
        assert!(matches!(
            spectral_bisection(&g, DEFAULT_TOL),
            Err(PartitionError::Disconnected)
        ));
    }
}

#[test]
fn fiedler_vector_is_a_unit_eigenvector_orthogonal_to_ones() {
    for seed in 0..30u64 {
        let g = connected_random(seed, 3 + seed % 15);
        let l = laplacian(&g);
        let pair = fiedler_vector(&l, DEFAULT_TOL).unwrap();
        let norm: f64 = pair.vector.iter().map(|x| x * x).sum::<f64>().sqrt();
        let sum: f64 = pair.vector.iter().sum();
        assert!((norm - 1.0).abs() <= 1e-9);
        assert!(sum.abs() <= 1e-8);
        assert!(pair.residual <= 1e-8);
        // Rayleigh quotient equals the eigenvalue
        assert!((l.quadratic_form(&pair.vector) - pair.value).abs() <= 1e-8);
        assert!(pair.value > 1e-10);
    }
}

#[test]
fn kway_blocks_cover_and_recount() {
    for seed in 0..20u64 {
        let g = connected_random(seed + 50, 8 + seed % 10);
        for k in [2usize, 4, 8] {
            let res = spectral_kway(&g, k, DEFAULT_TOL).unwrap();
            assert_eq!(res.blocks.len(), g.vertex_count());
            assert_eq!(res.block_sizes.len(), k);
            assert_eq!(res.block_sizes.iter().sum::<usize>(), g.vertex_count());
            assert_eq!(res.cut_edges, count_cut(&g, &res.blocks));
        }
    }
}

/// Brute-force cut count over edges, independent of the library helper.
fn recount(g: &GraphView, blocks: &BTreeMap<VertexId, usize>) -> usize {
    g.edges().iter().filter(|e| blocks[&e.src] != blocks[&e.dst]).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_is_psd_and_rows_sum_to_zero(
        seed in 0u64..10_000,
        n in 1u64..16,
        x in proptest::collection::vec(-10.0f64..10.0, 16),
    ) {
        let g = random_graph(seed, n, 0.4);
        let l = laplacian(&g);
        let m = l.matrix();
        for i in 0..l.dim() {
            let row: f64 = (0..l.dim()).map(|j| m[(i, j)]).sum();
            prop_assert!(row.abs() <= 1e-9);
            for j in 0..l.dim() {
                prop_assert_eq!(m[(i, j)], m[(j, i)]);
            }
        }
        let x = &x[..l.dim()];
        prop_assert!(l.quadratic_form(x) >= -1e-9);
        // x^T L x equals the sum of (x_u - x_v)^2 over distinct adjacent pairs
        let adj = g.undirected_adjacency();
        let direct: f64 = (0..adj.len())
            .flat_map(|u| adj[u].iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .map(|(u, v)| (x[u] - x[v]).powi(2))
            .sum();
        prop_assert!((l.quadratic_form(x) - direct).abs() <= 1e-8 * (1.0 + direct.abs()));
    }

    #[test]
    fn fiedler_value_bounds_rayleigh_quotients(
        seed in 0u64..10_000,
        n in 3u64..14,
        x in proptest::collection::vec(-5.0f64..5.0, 14),
    ) {
        let g = connected_random(seed, n);
        let l = laplacian(&g);
        let pair = fiedler_vector(&l, DEFAULT_TOL).unwrap();
        let x = &x[..l.dim()];
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let y: Vec<f64> = x.iter().map(|v| v - mean).collect();
        let norm2: f64 = y.iter().map(|v| v * v).sum();
        prop_assume!(norm2 > 1e-6);
        prop_assert!(l.quadratic_form(&y) / norm2 >= pair.value - 1e-8);
    }

    #[test]
    fn bisection_is_balanced_and_cut_recounts(seed in 0u64..10_000, n in 2u64..20) {
        let g = connected_random(seed, n);
        let res = spectral_bisection(&g, DEFAULT_TOL).unwrap();
        prop_assert_eq!(res.block_sizes.len(), 2);
        prop_assert!(res.block_sizes.iter().all(|&s| s >= 1));
        prop_assert_eq!(res.cut_edges, recount(&g, &res.blocks));
        // block 0 holds the smallest vertex id
        prop_assert_eq!(res.blocks[&VertexId(0)], 0);
    }
}
