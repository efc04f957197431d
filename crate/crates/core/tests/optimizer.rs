use mvgraph::crossdomain_opt::{
    compare, optimize, sample, utility, CouplingSpec, Mode, Scenario, ScenarioFile,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent closed form of the coupled objective for one shared link and
/// no shared nodes.
fn closed_form(file: &ScenarioFile, r: [f64; 2]) -> f64 {
    let d = &file.domains;
    let l = &file.links[0];
    let (a0, a1) = (l.coeffs[&0], l.coeffs[&1]);
    let CouplingSpec::Auto {
        utility: flag,
        weights,
        ..
    } = &file.coupling
    else {
        panic!("sampler uses auto coupling")
    };
    let mut phi = weights.link * a0 * r[0] * a1 * r[1] / l.capacity;
    if *flag {
        phi += weights.utility * d[0].gamma * d[1].gamma * (r[0] - d[0].lambda) * (r[1] - d[1].lambda);
    }
    1.0 / (1.0 + (-d[0].gamma * (r[0] - d[0].lambda)).exp())
        + 1.0 / (1.0 + (-d[1].gamma * (r[1] - d[1].lambda)).exp())
        - phi
}

/// Exhaustive search on the 1e-3 lattice of the box, feasible points only.
fn grid_argmax(file: &ScenarioFile) -> ([f64; 2], f64) {
    let l = &file.links[0];
    let (a0, a1) = (l.coeffs[&0], l.coeffs[&1]);
    let n0 = (file.domains[0].r_max * 1000.0).round() as i64;
    let n1 = (file.domains[1].r_max * 1000.0).round() as i64;
    let mut best = ([0.0, 0.0], f64::NEG_INFINITY);
    for i in 0..=n0 {
        let x = i as f64 / 1000.0;
        for j in 0..=n1 {
            let y = j as f64 / 1000.0;
            if a0 * x + a1 * y > l.capacity + 1e-9 {
                break;
            }
            let f = closed_form(file, [x, y]);
            if f > best.1 {
                best = ([x, y], f);
            }
        }
    }
    best
}

#[test]
fn optimizer_matches_grid_search() {
    for seed in 0..10 {
        let file = sample::two_domain_tight(seed);
        let sc = Scenario::new(file.clone()).unwrap();
        let res = optimize(&sc, Mode::Coupled, seed).unwrap();
        let (grid_r, grid_f) = grid_argmax(&file);
        let lib_f = closed_form(&file, [res.allocation[0], res.allocation[1]]);
        assert!((lib_f - res.objective).abs() < 1e-12);
        for k in 0..2 {
            assert!(
                (res.allocation[k] - grid_r[k]).abs() <= 5e-3,
                "seed {seed}: optimizer {:?} grid {:?}",
                res.allocation,
                grid_r
            );
        }
        assert!(
            (res.objective - grid_f).abs() <= 1e-4,
            "seed {seed}: {} vs {grid_f}",
            res.objective
        );
        assert!(res.max_violation <= 1e-6);
    }
}

fn central_difference(sc: &Scenario, mode: Mode, r: &[f64], h: f64) -> Vec<f64> {
    (0..r.len())
        .map(|k| {
            let mut up = r.to_vec();
            let mut down = r.to_vec();
            up[k] += h;
            down[k] -= h;
            (sc.objective(&up, mode).unwrap() - sc.objective(&down, mode).unwrap()) / (2.0 * h)
        })
        .collect()
}

fn rel_error(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-12);
    diff / scale
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for p in 0..100u64 {
        let sc = Scenario::new(sample::dense(p, 2 + (p % 4) as usize)).unwrap();
        let r: Vec<f64> = sc
            .domains()
            .iter()
            .map(|d| rng.gen_range(d.r_min..d.r_max))
            .collect();
        for mode in [Mode::Isolated, Mode::Coupled] {
            let g = sc.gradient(&r, mode).unwrap();
            let fd = central_difference(&sc, mode, &r, 1e-5);
            let err = rel_error(&g, &fd);
            assert!(err <= 1e-6, "point {p} {mode:?}: {err:e}");
        }
    }
}

#[test]
fn uncoupled_gradient_is_diagonal() {
    let sc = Scenario::new(sample::uncoupled(3, 4)).unwrap();
    let r: Vec<f64> = sc.domains().iter().map(|d| 0.5 * (d.r_min + d.r_max)).collect();
    let base = sc.gradient(&r, Mode::Coupled).unwrap();
    for k in 0..r.len() {
        let mut moved = r.clone();
        moved[k] += 0.3;
        let g = sc.gradient(&moved, Mode::Coupled).unwrap();
        for j in (0..r.len()).filter(|&j| j != k) {
            assert_eq!(g[j], base[j]);
        }
    }
}

#[test]
fn zero_coupling_optima_agree() {
    for seed in 0..25 {
        let sc = Scenario::new(sample::uncoupled(seed, 2 + (seed % 4) as usize)).unwrap();
        assert!(sc.coupling().is_empty());
        let iso = optimize(&sc, Mode::Isolated, seed).unwrap();
        let cou = optimize(&sc, Mode::Coupled, seed).unwrap();
        for (a, b) in iso.allocation.iter().zip(&cou.allocation) {
            assert!((a - b).abs() <= 1e-4, "seed {seed}");
        }
        let report = compare(&sc, seed).unwrap();
        assert!(report.gap.abs() <= 1e-6);
    }
}

#[test]
fn report_is_self_consistent_and_deterministic() {
    let sc = Scenario::new(sample::coupling_gap_demo()).unwrap();
    let report = compare(&sc, 42).unwrap();
    for o in [&report.isolated, &report.coupled] {
        let r: Vec<f64> = o.allocation.values().copied().collect();
        assert!((sc.objective(&r, Mode::Isolated).unwrap() - o.objective_isolated).abs() <= 1e-9);
        assert!((sc.objective(&r, Mode::Coupled).unwrap() - o.objective_coupled).abs() <= 1e-9);
    }
    assert!(report.gap > 0.01);
    assert!(!report.isolated_feasible);
    assert_eq!(report.to_json(), compare(&sc, 42).unwrap().to_json());
}

#[test]
fn optima_are_feasible_and_in_box() {
    for seed in 0..12 {
        let mut file = sample::dense(seed, 3);
        // make sure the lower corner fits every link
        for l in &mut file.links {
            let floor: f64 = file
                .domains
                .iter()
                .map(|d| l.coeffs.get(&d.id).copied().unwrap_or(0.0) * d.r_min)
                .sum();
            l.capacity = l.capacity.max(floor + 1.0);
        }
        let sc = Scenario::new(file).unwrap();
        for mode in [Mode::Isolated, Mode::Coupled] {
            let res = optimize(&sc, mode, seed).unwrap();
            assert!(res.max_violation <= 1e-6);
            for (x, d) in res.allocation.iter().zip(sc.domains()) {
                assert!(*x >= d.r_min && *x <= d.r_max);
            }
        }
        let report = compare(&sc, seed).unwrap();
        assert!(report.coupled.max_violation <= 1e-6);
        if report.isolated_feasible {
            assert!(report.gap >= -1e-9, "seed {seed}: gap {}", report.gap);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn utility_is_bounded_and_increasing(
        gamma in 0.01f64..20.0,
        lambda in -50.0f64..50.0,
        r in -30.0f64..30.0,
        dr in 1e-3f64..5.0,
    ) {
        let u = utility(gamma, lambda, r);
        let u2 = utility(gamma, lambda, r + dr);
        prop_assert!(u > 0.0 || gamma * (r - lambda) < -700.0);
        prop_assert!(u < 1.0 || gamma * (r - lambda) > 36.0);
        prop_assert!(u2 >= u);
    }

    #[test]
    fn interaction_terms_are_symmetric(seed in 0u64..500, k in 2usize..5) {
        let sc = Scenario::new(sample::dense(seed, k)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r: Vec<f64> = sc.domains().iter().map(|d| rng.gen_range(d.r_min..d.r_max)).collect();
        for m in 0..k as u32 {
            for n in (m + 1)..k as u32 {
                prop_assert_eq!(sc.phi_link(m, n, &r).unwrap(), sc.phi_link(n, m, &r).unwrap());
                let (e1, e2) = (sc.phi_energy(m, n, &r).unwrap(), sc.phi_energy(n, m, &r).unwrap());
                prop_assert!((e1 - e2).abs() <= 1e-12 * (1.0 + e1.abs()));
                let (u1, u2) = (sc.phi_utility(m, n, &r).unwrap(), sc.phi_utility(n, m, &r).unwrap());
                prop_assert!((u1 - u2).abs() <= 1e-12 * (1.0 + u1.abs()));
            }
        }
    }

    #[test]
    fn empty_coupling_objectives_coincide(seed in 0u64..500, k in 1usize..6) {
        let sc = Scenario::new(sample::uncoupled(seed, k)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let r: Vec<f64> = sc.domains().iter().map(|d| rng.gen_range(d.r_min..d.r_max)).collect();
        prop_assert_eq!(
            sc.objective(&r, Mode::Isolated).unwrap(),
            sc.objective(&r, Mode::Coupled).unwrap()
        );
    }
}
