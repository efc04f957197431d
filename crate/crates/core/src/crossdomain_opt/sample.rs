//! Seeded scenario families used by tests, benches and the CLI examples.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{
    ComponentWeights, CouplingSign, CouplingSpec, DomainSpec, NodeLink, ScenarioFile, SharedLink,
    SharedNode,
};

/// Rounds to a multiple of `step`, keeping capacities on a millesimal grid.
fn snap(x: f64, step: f64) -> f64 {
    (x / step).round() * step
}

/// Two domains on boxes `[0, B]` (B in 2..=4) sharing one link that cannot
/// carry both upper bounds at once. Coefficients are in {0.5, 1, 2} and the
/// capacity is a multiple of 1e-3, so the capacity boundary passes through
/// points of a 1e-3 grid. Coupling is automatic with small component weights.
pub fn two_domain_tight(seed: u64) -> ScenarioFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeff_choices = [0.5, 1.0, 2.0];
    let domains: Vec<DomainSpec> = (0..2)
        .map(|id| {
            let r_max = rng.gen_range(2..=4) as f64;
            DomainSpec {
                id,
                gamma: snap(rng.gen_range(0.8..3.0), 0.01),
                lambda: snap(rng.gen_range(0.3..r_max - 0.3), 0.01),
                r_min: 0.0,
                r_max,
            }
        })
        .collect();
    let a: Vec<f64> = (0..2)
        .map(|_| coeff_choices[rng.gen_range(0..coeff_choices.len())])
        .collect();
    let full: f64 = a.iter().zip(&domains).map(|(a, d)| a * d.r_max).sum();
    let capacity = snap(rng.gen_range(0.35..0.8) * full, 1e-3);
    let weights = ComponentWeights {
        link: snap(rng.gen_range(0.0..0.3), 0.01),
        energy: 0.0,
        utility: snap(rng.gen_range(0.0..0.05), 0.001),
    };
    ScenarioFile {
        domains,
        links: vec![SharedLink {
            id: 0,
            capacity,
            coeffs: BTreeMap::from([(0, a[0]), (1, a[1])]),
        }],
        nodes: vec![],
        coupling: CouplingSpec::Auto {
            utility: rng.gen_bool(0.5),
            weights,
            sign: CouplingSign::Penalty,
        },
    }
}

/// `k` domains, each with private links only, so the coupling graph is empty.
pub fn uncoupled(seed: u64, k: usize) -> ScenarioFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut domains = Vec::with_capacity(k);
    let mut links = Vec::new();
    for id in 0..k as u32 {
        let r_max = rng.gen_range(2.0..10.0);
        domains.push(DomainSpec {
            id,
            gamma: rng.gen_range(0.3..3.0),
            lambda: rng.gen_range(0.0..r_max),
            r_min: 0.0,
            r_max,
        });
        for _ in 0..rng.gen_range(0..=2) {
            let a = rng.gen_range(0.2..2.0);
            links.push(SharedLink {
                id: links.len() as u64,
                capacity: a * rng.gen_range(0.3..1.2) * r_max,
                coeffs: BTreeMap::from([(id, a)]),
            });
        }
    }
    ScenarioFile {
        domains,
        links,
        nodes: vec![],
        coupling: CouplingSpec::default(),
    }
}

/// `k` domains over a handful of shared links and one shared node; every
/// interaction component is live. Used for gradient and invariant checks.
pub fn dense(seed: u64, k: usize) -> ScenarioFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domains: Vec<DomainSpec> = (0..k as u32)
        .map(|id| {
            let r_min = rng.gen_range(-1.0..1.0);
            let r_max = r_min + rng.gen_range(1.0..6.0);
            DomainSpec {
                id,
                gamma: rng.gen_range(0.3..2.5),
                lambda: rng.gen_range(r_min..r_max),
                r_min,
                r_max,
            }
        })
        .collect();
    let links: Vec<SharedLink> = (0..3)
        .map(|id| SharedLink {
            id,
            capacity: rng.gen_range(5.0..30.0),
            coeffs: (0..k as u32)
                .filter_map(|d| rng.gen_bool(0.7).then(|| (d, rng.gen_range(0.1..2.0))))
                .collect(),
        })
        .collect();
    let nodes = vec![SharedNode {
        id: 0,
        eps_tx: rng.gen_range(0.0..0.05),
        eps_rx: rng.gen_range(0.0..0.05),
        incident: vec![
            NodeLink {
                link: 0,
                distance: rng.gen_range(0.5..2.0),
            },
            NodeLink {
                link: 1,
                distance: rng.gen_range(0.5..2.0),
            },
        ],
    }];
    ScenarioFile {
        domains,
        links,
        nodes,
        coupling: CouplingSpec::Auto {
            utility: true,
            weights: ComponentWeights {
                link: rng.gen_range(0.1..1.0),
                energy: rng.gen_range(0.1..1.0),
                utility: rng.gen_range(0.01..0.2),
            },
            sign: CouplingSign::Penalty,
        },
    }
}

/// Two identical domains whose unconstrained optima (the upper bounds)
/// collide on one shared link: `a = (1, 1)`, `C = 12`, boxes `[0, 10]`.
pub fn coupling_gap_demo() -> ScenarioFile {
    let domain = |id| DomainSpec {
        id,
        gamma: 1.0,
        lambda: 5.0,
        r_min: 0.0,
        r_max: 10.0,
    };
    ScenarioFile {
        domains: vec![domain(0), domain(1)],
        links: vec![SharedLink {
            id: 0,
            capacity: 12.0,
            coeffs: BTreeMap::from([(0, 1.0), (1, 1.0)]),
        }],
        nodes: vec![],
        coupling: CouplingSpec::Auto {
            utility: false,
            weights: ComponentWeights::default(),
            sign: CouplingSign::Penalty,
        },
    }
}
