use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use serde::{Deserialize, Serialize};

use super::ScenarioError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Version {
    pub id: usize,
    pub hash: String,
    pub parents: Vec<usize>,
}

/// Content version history. Versions only reference earlier versions, so
/// the graph stays acyclic by construction.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VersionDag {
    versions: Vec<Version>,
}

impl VersionDag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_version(
        &mut self,
        parents: &BTreeSet<usize>,
        hash: impl Into<String>,
    ) -> Result<usize, ScenarioError> {
        if let Some(&p) = parents.iter().find(|&&p| p >= self.versions.len()) {
            return Err(ScenarioError::UnknownParent(p));
        }
        let id = self.versions.len();
        self.versions.push(Version {
            id,
            hash: hash.into(),
            parents: parents.iter().copied().collect(),
        });
        Ok(id)
    }

    pub fn versions(&self) -> &[Version] {
        &self.versions
    }

    pub fn len(&self) -> usize {
        self.versions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.versions.is_empty()
    }

    /// `(parent, child)` pairs, one per update.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.versions
            .iter()
            .flat_map(|v| v.parents.iter().map(move |&p| (p, v.id)))
            .collect()
    }

    /// Kahn order, smallest ready id first.
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.versions.len();
        let mut indeg: Vec<usize> = self.versions.iter().map(|v| v.parents.len()).collect();
        let mut children = vec![Vec::new(); n];
        for (p, c) in self.arcs() {
            children[p].push(c);
        }
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..n).filter(|&i| indeg[i] == 0).map(Reverse).collect();
        let mut out = Vec::with_capacity(n);
        while let Some(Reverse(v)) = ready.pop() {
            out.push(v);
            for &c in &children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.push(Reverse(c));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_branch_and_merge() {
        let mut dag = VersionDag::new();
        let root = dag.record_version(&BTreeSet::new(), "a0").unwrap();
        assert_eq!(root, 0);
        let left = dag.record_version(&BTreeSet::from([root]), "a1").unwrap();
        let right = dag.record_version(&BTreeSet::from([root]), "b1").unwrap();
        let merge = dag.record_version(&BTreeSet::from([left, right]), "m").unwrap();
        assert_eq!(dag.versions()[merge].parents.len(), 2);
        let order = dag.topological_order();
        assert_eq!(order.len(), 4);
        let pos = |v: usize| order.iter().position(|&x| x == v).unwrap();
        for (p, c) in dag.arcs() {
            assert!(pos(p) < pos(c));
        }
        assert_eq!(
            dag.record_version(&BTreeSet::from([9]), "x"),
            Err(ScenarioError::UnknownParent(9))
        );
    }
}
