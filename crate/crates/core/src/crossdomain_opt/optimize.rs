//! Penalty-method projected gradient ascent with deterministic multi-starts.
//!
//! Each start runs five rounds of box-projected gradient ascent on
//! `objective - mu * sum max(0, flow - C)^2` with `mu = 1, 10, ..., 1e4` and
//! Armijo backtracking from a unit step. The last iterate is pulled back onto
//! the feasible set along the segment towards `R_min` and then polished by a
//! feasible-direction (gradient projection) ascent on the active face, which
//! converges along the capacity boundary without the stiffness of the
//! penalty. The best final point over all starts wins, ties going to the
//! lower start index.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::error::OptError;
use super::model::{DomainId, LinkId, Mode, Model, Row, Scenario};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub penalties: Vec<f64>,
    pub max_iter_per_round: usize,
    pub max_polish_iter: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            starts: 16,
            penalties: vec![1.0, 10.0, 100.0, 1e3, 1e4],
            max_iter_per_round: 5000,
            max_polish_iter: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iter: usize,
    pub objective: f64,
    pub max_violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub mode: Mode,
    /// Indexed like [`Scenario::domains`].
    pub allocation: Vec<f64>,
    pub objective: f64,
    /// Largest excess over the capacity rows of this mode.
    pub max_violation: f64,
    pub start_index: usize,
    pub trace: Vec<TracePoint>,
}

const ARMIJO: f64 = 1e-4;
const FEAS_TOL: f64 = 1e-6;

pub fn optimize(sc: &Scenario, mode: Mode, seed: u64) -> Result<OptimizationResult, OptError> {
    optimize_with(sc, mode, seed, &OptimizerConfig::default())
}

pub fn optimize_with(
    sc: &Scenario,
    mode: Mode,
    seed: u64,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult, OptError> {
    let lo = sc.lower();
    let hi = sc.upper();
    if let Some(&(link, excess)) = sc.violations(&lo).first() {
        return Err(OptError::Infeasible { link, excess });
    }
    let rows = sc.rows(mode);
    if let Some(r) = rows.iter().find(|r| r.value(&lo) > r.cap) {
        return Err(OptError::Infeasible {
            link: r.link,
            excess: r.value(&lo) - r.cap,
        });
    }
    let problem = Problem {
        model: sc.model(),
        mode,
        rows,
        lo,
        hi,
    };
    let starts = start_points(&problem.lo, &problem.hi, cfg.starts.max(1), seed);
    let runs: Vec<(Vec<f64>, f64, Vec<TracePoint>)> = starts
        .par_iter()
        .map(|x0| problem.run(x0.clone(), cfg))
        .collect();
    let mut best = 0;
    for (i, run) in runs.iter().enumerate().skip(1) {
        if run.1 > runs[best].1 {
            best = i;
        }
    }
    let (allocation, objective, trace) = runs.into_iter().nth(best).expect("one start");
    let max_violation = problem.max_violation(&allocation);
    debug_assert!(max_violation <= FEAS_TOL);
    Ok(OptimizationResult {
        mode,
        allocation,
        objective,
        max_violation,
        start_index: best,
        trace,
    })
}

/// Halton points (one prime base per coordinate) with a seeded
/// Cranley-Patterson shift, scaled into the box.
pub fn start_points(lo: &[f64], hi: &[f64], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = lo.iter().map(|_| rng.gen::<f64>()).collect();
    let bases = primes(lo.len());
    (1..=count)
        .map(|i| {
            (0..lo.len())
                .map(|k| {
                    let u = (radical_inverse(i as u64, bases[k]) + shift[k]).fract();
                    lo[k] + u * (hi[k] - lo[k])
                })
                .collect()
        })
        .collect()
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = 2u64;
    while out.len() < count {
        if out.iter().take_while(|&&p| p * p <= c).all(|&p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

struct Problem {
    model: Model,
    mode: Mode,
    rows: Vec<Row>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

impl Problem {
    fn objective(&self, x: &[f64]) -> f64 {
        self.model.objective(x, self.mode)
    }

    fn max_violation(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.value(x) - r.cap).max(0.0))
            .fold(0.0, f64::max)
    }

    fn penalized(&self, x: &[f64], mu: f64) -> f64 {
        let pen: f64 = self
            .rows
            .iter()
            .map(|r| (r.value(x) - r.cap).max(0.0).powi(2))
            .sum();
        self.objective(x) - mu * pen
    }

    fn penalized_grad(&self, x: &[f64], mu: f64, g: &mut [f64]) {
        self.model.gradient(x, self.mode, g);
        for r in &self.rows {
            let v = r.value(x) - r.cap;
            if v > 0.0 {
                for (gk, a) in g.iter_mut().zip(&r.coeffs) {
                    *gk -= 2.0 * mu * v * a;
                }
            }
        }
    }

    fn project_box(&self, x: &mut [f64]) {
        for (k, xk) in x.iter_mut().enumerate() {
            *xk = xk.clamp(self.lo[k], self.hi[k]);
        }
    }

    fn record(&self, trace: &mut Vec<TracePoint>, x: &[f64]) {
        trace.push(TracePoint {
            iter: trace.len(),
            objective: self.objective(x),
            max_violation: self.max_violation(x),
        });
    }

    fn run(&self, mut x: Vec<f64>, cfg: &OptimizerConfig) -> (Vec<f64>, f64, Vec<TracePoint>) {
        let mut trace = Vec::new();
        self.project_box(&mut x);
        self.record(&mut trace, &x);
        for &mu in &cfg.penalties {
            self.ascend(&mut x, mu, cfg.max_iter_per_round, &mut trace);
        }
        self.restore(&mut x);
        self.polish(&mut x, cfg.max_polish_iter, &mut trace);
        let f = self.objective(&x);
        (x, f, trace)
    }

    fn ascend(&self, x: &mut Vec<f64>, mu: f64, max_iter: usize, trace: &mut Vec<TracePoint>) {
        let k = x.len();
        let mut g = vec![0.0; k];
        let mut y = vec![0.0; k];
        for _ in 0..max_iter {
            let fx = self.penalized(x, mu);
            self.penalized_grad(x, mu, &mut g);
            let mut step = 1.0;
            let accepted = loop {
                for i in 0..k {
                    y[i] = x[i] + step * g[i];
                }
                self.project_box(&mut y);
                let moved: Vec<f64> = y.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
                if self.penalized(&y, mu) >= fx + ARMIJO * dot(&g, &moved) {
                    break true;
                }
                step *= 0.5;
                if step < 1e-20 {
                    break false;
                }
            };
            if !accepted {
                return;
            }
            let delta = y
                .iter()
                .zip(x.iter())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            x.copy_from_slice(&y);
            self.record(trace, x);
            if delta <= 1e-13 * (1.0 + norm_inf(x)) {
                return;
            }
        }
    }

    /// Moves `x` along the segment towards the lower corner (feasible by
    /// precondition) until every row holds.
    fn restore(&self, x: &mut [f64]) {
        let mut t: f64 = 1.0;
        for r in &self.rows {
            let at_x = r.value(x);
            if at_x > r.cap {
                let at_lo = r.value(&self.lo);
                t = t.min((r.cap - at_lo) / (at_x - at_lo));
            }
        }
        if t < 1.0 {
            let t = t.max(0.0);
            for (k, xk) in x.iter_mut().enumerate() {
                *xk = self.lo[k] + t * (*xk - self.lo[k]);
            }
            // guard against rounding pushing a row a hair over
            for r in &self.rows {
                let over = r.value(x) - r.cap;
                if over > 0.0 {
                    let norm2 = dot(&r.coeffs, &r.coeffs);
                    for (xk, a) in x.iter_mut().zip(&r.coeffs) {
                        *xk -= over * a / norm2;
                    }
                }
            }
            self.project_box(x);
        }
    }

    /// Constraint normals and bounds: capacity rows, then upper and lower
    /// box faces.
    fn constraints(&self) -> Vec<(Vec<f64>, f64)> {
        let k = self.lo.len();
        let mut out: Vec<(Vec<f64>, f64)> =
            self.rows.iter().map(|r| (r.coeffs.clone(), r.cap)).collect();
        for i in 0..k {
            let mut e = vec![0.0; k];
            e[i] = 1.0;
            out.push((e, self.hi[i]));
            let mut e = vec![0.0; k];
            e[i] = -1.0;
            out.push((e, -self.lo[i]));
        }
        out
    }

    fn polish(&self, x: &mut Vec<f64>, max_iter: usize, trace: &mut Vec<TracePoint>) {
        let cons = self.constraints();
        let k = x.len();
        let mut g = vec![0.0; k];
        let mut step: f64 = 1.0;
        for _ in 0..max_iter {
            self.model.gradient(x, self.mode, &mut g);
            let fx = self.objective(x);
            let mut working: Vec<usize> = (0..cons.len())
                .filter(|&c| {
                    let (n, b) = &cons[c];
                    b - dot(n, x) <= 1e-10 * (1.0 + b.abs())
                })
                .collect();
            let scale = 1.0 + norm_inf(&g);
            let mut dir = None;
            for _ in 0..=cons.len() {
                let (d, lam) = project_out(&g, &working, &cons);
                if norm_inf(&d) > 1e-13 * scale {
                    dir = Some(d);
                    break;
                }
                let (worst, min_lam) = lam
                    .iter()
                    .enumerate()
                    .fold((usize::MAX, 0.0f64), |acc, (i, &l)| {
                        if l < acc.1 {
                            (i, l)
                        } else {
                            acc
                        }
                    });
                if min_lam >= -1e-12 * scale {
                    return; // first-order optimal on the current face
                }
                working.remove(worst);
            }
            let Some(d) = dir else { return };
            let mut s_max = f64::INFINITY;
            for (c, (n, b)) in cons.iter().enumerate() {
                if working.contains(&c) {
                    continue;
                }
                let nd = dot(n, &d);
                if nd > 0.0 {
                    s_max = s_max.min((b - dot(n, x)).max(0.0) / nd);
                }
            }
            let d2 = dot(&d, &d);
            let mut s = (2.0 * step).min(s_max).min(1e6);
            let mut y = vec![0.0; k];
            let accepted = loop {
                for i in 0..k {
                    y[i] = x[i] + s * d[i];
                }
                if self.objective(&y) >= fx + ARMIJO * s * d2 {
                    break true;
                }
                s *= 0.5;
                if s < 1e-20 {
                    break false;
                }
            };
            if !accepted {
                return;
            }
            self.project_box(&mut y);
            let gain = self.objective(&y) - fx;
            *x = y;
            step = s;
            self.record(trace, x);
            if gain <= 1e-16 * (1.0 + fx.abs()) && s * norm_inf(&d) <= 1e-14 * (1.0 + norm_inf(x))
            {
                return;
            }
        }
    }
}

/// Projects `g` onto the null space of the working-set normals. Returns the
/// projected direction and the least-squares multipliers.
fn project_out(g: &[f64], working: &[usize], cons: &[(Vec<f64>, f64)]) -> (Vec<f64>, Vec<f64>) {
    if working.is_empty() {
        return (g.to_vec(), Vec::new());
    }
    let k = g.len();
    let n = DMatrix::from_fn(working.len(), k, |r, c| cons[working[r]].0[c]);
    let gv = DVector::from_column_slice(g);
    let lam = match (&n * n.transpose()).pseudo_inverse(1e-12) {
        Ok(pinv) => pinv * (&n * &gv),
        Err(_) => DVector::zeros(working.len()),
    };
    let d = &gv - n.transpose() * &lam;
    (d.iter().copied().collect(), lam.iter().copied().collect())
}

/// Evaluation of one optimum under both objectives and the full capacity
/// model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeOutcome {
    pub allocation: BTreeMap<DomainId, f64>,
    pub objective_isolated: f64,
    pub objective_coupled: f64,
    /// `C_l - flow_l` per link with all domains sharing it.
    pub link_slack: BTreeMap<LinkId, f64>,
    pub max_violation: f64,
    pub start_index: usize,
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub seed: u64,
    pub isolated: ModeOutcome,
    pub coupled: ModeOutcome,
    /// `objective_coupled(R*_coupled) - objective_coupled(R*_isolated)`.
    pub gap: f64,
    /// Whether the isolated optimum satisfies the joint capacity rows.
    pub isolated_feasible: bool,
}

impl OptimizationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plot-ready iteration traces: `mode,iter,objective,max_violation`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("mode,iter,objective,max_violation\n");
        for (name, o) in [("isolated", &self.isolated), ("coupled", &self.coupled)] {
            for p in &o.trace {
                out.push_str(&format!(
                    "{name},{},{},{}\n",
                    p.iter, p.objective, p.max_violation
                ));
            }
        }
        out
    }
}

pub fn outcome(sc: &Scenario, res: &OptimizationResult) -> ModeOutcome {
    let r = &res.allocation;
    let link_slack = sc.link_slack(r);
    let max_violation = link_slack.values().fold(0.0f64, |m, s| m.max(-s));
    ModeOutcome {
        allocation: sc.domains().iter().map(|d| d.id).zip(r.iter().copied()).collect(),
        objective_isolated: sc.objective(r, Mode::Isolated).expect("dimension"),
        objective_coupled: sc.objective(r, Mode::Coupled).expect("dimension"),
        link_slack,
        max_violation,
        start_index: res.start_index,
        trace: res.trace.clone(),
    }
}

/// Optimizes in both modes with the same seed and compares the optima under
/// the coupled objective.
pub fn compare(sc: &Scenario, seed: u64) -> Result<OptimizationReport, OptError> {
    let iso = optimize(sc, Mode::Isolated, seed)?;
    let cou = optimize(sc, Mode::Coupled, seed)?;
    let isolated = outcome(sc, &iso);
    let coupled = outcome(sc, &cou);
    Ok(OptimizationReport {
        seed,
        gap: coupled.objective_coupled - isolated.objective_coupled,
        isolated_feasible: isolated.max_violation <= FEAS_TOL,
        isolated,
        coupled,
    })
}
