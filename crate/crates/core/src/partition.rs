//! Spectral partitioning: graph Laplacian, Fiedler pair, sign bisection and
//! recursive k-way bisection.
//!
//! The Fiedler pair comes from a dense symmetric eigen-decomposition of
//! `L + c * 11^T / n` with `c > lambda_max(L)`, which moves the all-ones
//! direction to the top of the spectrum so the smallest returned eigenpair is
//! `(lambda_2, v)` with `v` orthogonal to the ones vector. When `lambda_2` is
//! repeated the eigenvector is not unique; the direction inside the
//! eigenspace whose sign split cuts the fewest edges is chosen.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::analytics::weakly_connected_components;
use crate::graph_core::{GraphView, VertexId};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionError {
    #[error("need at least {need} vertices, got {got}")]
    TooFewVertices { need: usize, got: usize },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("eigen-solver did not converge (residual {residual:e})")]
    NonConvergence { residual: f64 },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("k = {k} is outside 2..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("k = {0} is not a power of two")]
    KNotPowerOfTwo(usize),
}

/// Dense `L = D - A`, rows and columns in ascending vertex id order.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    vertices: Vec<VertexId>,
    matrix: DMatrix<f64>,
}

impl LaplacianMatrix {
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.vertices.len()
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let v = DVector::from_column_slice(x);
        (v.transpose() * &self.matrix * &v)[(0, 0)]
    }

    fn cut_of(&self, side: &[bool]) -> usize {
        let n = self.dim();
        let mut cut = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.matrix[(i, j)] != 0.0 && side[i] != side[j] {
                    cut += 1;
                }
            }
        }
        cut
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiedlerPair {
    pub value: f64,
    /// Unit vector aligned with [`LaplacianMatrix::vertices`].
    pub vector: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionResult {
    pub blocks: BTreeMap<VertexId, usize>,
    pub cut_edges: usize,
    pub block_sizes: Vec<usize>,
}

impl PartitionResult {
    fn from_groups(g: &GraphView, mut groups: Vec<Vec<VertexId>>) -> Self {
        for grp in &mut groups {
            grp.sort_unstable();
        }
        groups.sort_by_key(|grp| grp[0]);
        let mut blocks = BTreeMap::new();
        for (b, grp) in groups.iter().enumerate() {
            for &v in grp {
                blocks.insert(v, b);
            }
        }
        let cut_edges = count_cut(g, &blocks);
        PartitionResult {
            blocks,
            cut_edges,
            block_sizes: groups.iter().map(Vec::len).collect(),
        }
    }
}

/// Edges of `g` (parallels included) whose endpoints lie in different blocks.
pub fn count_cut(g: &GraphView, blocks: &BTreeMap<VertexId, usize>) -> usize {
    g.edges()
        .iter()
        .filter(|e| blocks[&e.src] != blocks[&e.dst])
        .count()
}

/// Unweighted Laplacian of the undirected interpretation, parallel edges
/// collapsed and self-loops dropped.
pub fn laplacian(g: &GraphView) -> LaplacianMatrix {
    let n = g.vertex_count();
    let mut m = DMatrix::zeros(n, n);
    for (i, nbrs) in g.undirected_adjacency().iter().enumerate() {
        m[(i, i)] = nbrs.len() as f64;
        for &j in nbrs {
            m[(i, j)] = -1.0;
        }
    }
    LaplacianMatrix {
        vertices: g.vertices().to_vec(),
        matrix: m,
    }
}

/// Second-smallest eigenpair of `l`. The vector has unit norm, is orthogonal
/// to the all-ones vector and its first non-negligible entry is positive.
pub fn fiedler_vector(l: &LaplacianMatrix, tol: f64) -> Result<FiedlerPair, PartitionError> {
    let n = l.dim();
    if n < 2 {
        return Err(PartitionError::TooFewVertices { need: 2, got: n });
    }
    if !(tol > 0.0) {
        return Err(PartitionError::InvalidTolerance(tol));
    }
    let shift = l.matrix.trace() + 1.0;
    let shifted = &l.matrix + DMatrix::from_element(n, n, shift / n as f64);
    let eig = shifted
        .try_symmetric_eigen(f64::EPSILON, MAX_ITERATIONS)
        .ok_or(PartitionError::NonConvergence {
            residual: f64::INFINITY,
        })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lambda = eig.eigenvalues[order[0]];
    let space: Vec<DVector<f64>> = order
        .iter()
        .take_while(|&&i| eig.eigenvalues[i] - lambda <= 0.5 * tol)
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();

    let mut v = pick_direction(l, &space);
    let mean = v.mean();
    v.add_scalar_mut(-mean);
    let norm = v.norm();
    if norm == 0.0 {
        return Err(PartitionError::NonConvergence {
            residual: f64::INFINITY,
        });
    }
    v /= norm;
    let zero = zero_threshold(v.as_slice());
    if let Some(first) = v.iter().find(|x| x.abs() > zero) {
        if *first < 0.0 {
            v.neg_mut();
        }
    }
    let value = (v.transpose() * &l.matrix * &v)[(0, 0)];
    let residual = (&l.matrix * &v - &v * value).norm();
    if residual > tol {
        return Err(PartitionError::NonConvergence { residual });
    }
    Ok(FiedlerPair {
        value,
        vector: v.iter().copied().collect(),
        residual,
    })
}

fn zero_threshold(v: &[f64]) -> f64 {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    max * 1e-8
}

/// Sign split; `true` marks the positive side. Near-zero entries go, in
/// index order, to whichever side is currently smaller (ties: positive).
fn sign_split(v: &[f64]) -> Vec<bool> {
    let zero = zero_threshold(v);
    let mut side: Vec<Option<bool>> = v
        .iter()
        .map(|&x| {
            if x > zero {
                Some(true)
            } else if x < -zero {
                Some(false)
            } else {
                None
            }
        })
        .collect();
    let mut pos = side.iter().filter(|s| **s == Some(true)).count();
    let mut neg = side.iter().filter(|s| **s == Some(false)).count();
    for s in side.iter_mut().filter(|s| s.is_none()) {
        if pos <= neg {
            *s = Some(true);
            pos += 1;
        } else {
            *s = Some(false);
            neg += 1;
        }
    }
    side.into_iter().map(|s| s.expect("assigned")).collect()
}

/// Chooses the eigenspace direction whose sign split has the smallest cut,
/// then the best balance, then the earliest candidate.
fn pick_direction(l: &LaplacianMatrix, space: &[DVector<f64>]) -> DVector<f64> {
    if space.len() == 1 {
        return space[0].clone();
    }
    const STEPS: usize = 90;
    let basis = &space[..space.len().min(8)];
    let mut candidates: Vec<DVector<f64>> = basis.to_vec();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            for step in 1..STEPS {
                let theta = std::f64::consts::PI * step as f64 / STEPS as f64;
                candidates.push(&basis[i] * theta.cos() + &basis[j] * theta.sin());
            }
        }
    }
    let mut best: Option<((usize, usize), usize)> = None;
    for (idx, c) in candidates.iter().enumerate() {
        let mut centered = c.clone();
        centered.add_scalar_mut(-c.mean());
        let side = sign_split(centered.as_slice());
        let pos = side.iter().filter(|s| **s).count();
        let score = (l.cut_of(&side), pos.abs_diff(side.len() - pos));
        if best.map_or(true, |(b, _)| score < b) {
            best = Some((score, idx));
        }
    }
    candidates.swap_remove(best.expect("non-empty candidate list").1)
}

fn bisect_groups(
    g: &GraphView,
    tol: f64,
) -> Result<(Vec<VertexId>, Vec<VertexId>), PartitionError> {
    let l = laplacian(g);
    let pair = fiedler_vector(&l, tol)?;
    let side = sign_split(&pair.vector);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (&v, s) in l.vertices.iter().zip(side) {
        if s {
            a.push(v);
        } else {
            b.push(v);
        }
    }
    debug_assert!(!a.is_empty() && !b.is_empty());
    Ok((a, b))
}

/// Two-way split by the sign of the Fiedler vector. Blocks are numbered by
/// their smallest vertex id.
pub fn spectral_bisection(g: &GraphView, tol: f64) -> Result<PartitionResult, PartitionError> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(PartitionError::TooFewVertices { need: 2, got: n });
    }
    if weakly_connected_components(g).count != 1 {
        return Err(PartitionError::Disconnected);
    }
    let (a, b) = bisect_groups(g, tol)?;
    Ok(PartitionResult::from_groups(g, vec![a, b]))
}

/// Recursive bisection into `k` blocks (a power of two), always splitting the
/// largest block (ties: smallest first vertex).
pub fn spectral_kway(g: &GraphView, k: usize, tol: f64) -> Result<PartitionResult, PartitionError> {
    let n = g.vertex_count();
    if k < 2 || k > n {
        return Err(PartitionError::KOutOfRange { k, n });
    }
    if !k.is_power_of_two() {
        return Err(PartitionError::KNotPowerOfTwo(k));
    }
    if weakly_connected_components(g).count != 1 {
        return Err(PartitionError::Disconnected);
    }
    let mut groups: Vec<Vec<VertexId>> = vec![g.vertices().to_vec()];
    while groups.len() < k {
        let pick = (0..groups.len())
            .max_by(|&x, &y| {
                groups[x]
                    .len()
                    .cmp(&groups[y].len())
                    .then(groups[y][0].cmp(&groups[x][0]))
            })
            .expect("at least one block");
        let block = groups.swap_remove(pick);
        let keep: BTreeSet<VertexId> = block.iter().copied().collect();
        let (a, b) = bisect_groups(&g.induced(&keep), tol)?;
        groups.push(a);
        groups.push(b);
        for grp in &mut groups {
            grp.sort_unstable();
        }
        groups.sort_by_key(|grp| grp[0]);
    }
    Ok(PartitionResult::from_groups(g, groups))
}
