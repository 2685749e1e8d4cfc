use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::CoverageError;
use crate::graph::NodeId;

/// Right-hand node of a coverage graph: the root of one RR set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RootId(pub u32);

impl From<NodeId> for RootId {
    fn from(v: NodeId) -> Self {
        RootId(v.0)
    }
}

impl fmt::Display for RootId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub(crate) type EdgeIdx = u32;

/// Insert-only bipartite graph between candidate seeds and RR-set roots.
///
/// Nodes and edges get dense indices in arrival order; the solver threads
/// rely on that to tell already-processed elements from pending ones.
#[derive(Debug, Clone, Default)]
pub struct CoverageGraph {
    left_ids: Vec<NodeId>,
    right_ids: Vec<RootId>,
    left_index: HashMap<NodeId, u32>,
    right_index: HashMap<RootId, u32>,
    pub(crate) left_adj: Vec<Vec<EdgeIdx>>,
    pub(crate) right_adj: Vec<Vec<EdgeIdx>>,
    pub(crate) edges: Vec<(u32, u32)>,
    edge_set: HashSet<(u32, u32)>,
}

impl CoverageGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_left(&mut self, u: NodeId) -> Result<u32, CoverageError> {
        if self.left_index.contains_key(&u) {
            return Err(CoverageError::DuplicateNode(u.0));
        }
        let idx = self.left_ids.len() as u32;
        self.left_ids.push(u);
        self.left_index.insert(u, idx);
        self.left_adj.push(Vec::new());
        Ok(idx)
    }

    pub fn add_right(&mut self, r: RootId) -> Result<u32, CoverageError> {
        if self.right_index.contains_key(&r) {
            return Err(CoverageError::DuplicateNode(r.0));
        }
        let idx = self.right_ids.len() as u32;
        self.right_ids.push(r);
        self.right_index.insert(r, idx);
        self.right_adj.push(Vec::new());
        Ok(idx)
    }

    pub fn add_edge(&mut self, u: NodeId, r: RootId) -> Result<EdgeIdx, CoverageError> {
        let li = *self.left_index.get(&u).ok_or(CoverageError::UnknownNode(u.0))?;
        let ri = *self.right_index.get(&r).ok_or(CoverageError::UnknownNode(r.0))?;
        if !self.edge_set.insert((li, ri)) {
            return Err(CoverageError::DuplicateEdge(u.0, r.0));
        }
        let e = self.edges.len() as EdgeIdx;
        self.edges.push((li, ri));
        self.left_adj[li as usize].push(e);
        self.right_adj[ri as usize].push(e);
        Ok(e)
    }

    pub fn left_count(&self) -> usize {
        self.left_ids.len()
    }

    pub fn right_count(&self) -> usize {
        self.right_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Left nodes in arrival order.
    pub fn lefts(&self) -> &[NodeId] {
        &self.left_ids
    }

    /// Right nodes in arrival order.
    pub fn rights(&self) -> &[RootId] {
        &self.right_ids
    }

    pub(crate) fn left_id(&self, idx: u32) -> NodeId {
        self.left_ids[idx as usize]
    }

    pub(crate) fn left_idx(&self, u: NodeId) -> Option<u32> {
        self.left_index.get(&u).copied()
    }

    /// Roots covered by `u`, in edge arrival order.
    pub fn neighbors(&self, u: NodeId) -> impl Iterator<Item = RootId> + '_ {
        let adj: &[EdgeIdx] = match self.left_index.get(&u) {
            Some(&li) => &self.left_adj[li as usize],
            None => &[],
        };
        adj.iter()
            .map(move |&e| self.right_ids[self.edges[e as usize].1 as usize])
    }

    /// Number of distinct roots covered by `seeds`.
    pub fn coverage(&self, seeds: &[NodeId]) -> usize {
        let mut hit = vec![false; self.right_ids.len()];
        let mut count = 0;
        for &u in seeds {
            if let Some(&li) = self.left_index.get(&u) {
                for &e in &self.left_adj[li as usize] {
                    let ri = self.edges[e as usize].1 as usize;
                    if !hit[ri] {
                        hit[ri] = true;
                        count += 1;
                    }
                }
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_and_query() {
        let mut g = CoverageGraph::new();
        g.add_left(NodeId(3)).unwrap();
        g.add_left(NodeId(1)).unwrap();
        g.add_right(RootId(10)).unwrap();
        g.add_right(RootId(11)).unwrap();
        assert_eq!(g.add_left(NodeId(3)), Err(CoverageError::DuplicateNode(3)));
        assert_eq!(g.add_right(RootId(11)), Err(CoverageError::DuplicateNode(11)));
        g.add_edge(NodeId(3), RootId(10)).unwrap();
        g.add_edge(NodeId(3), RootId(11)).unwrap();
        g.add_edge(NodeId(1), RootId(11)).unwrap();
        assert_eq!(g.add_edge(NodeId(1), RootId(11)), Err(CoverageError::DuplicateEdge(1, 11)));
        assert_eq!(g.add_edge(NodeId(9), RootId(11)), Err(CoverageError::UnknownNode(9)));
        assert_eq!(g.neighbors(NodeId(3)).collect::<Vec<_>>(), [RootId(10), RootId(11)]);
        assert_eq!(g.coverage(&[NodeId(1)]), 1);
        assert_eq!(g.coverage(&[NodeId(1), NodeId(3)]), 2);
        assert_eq!(g.coverage(&[]), 0);
    }
}
