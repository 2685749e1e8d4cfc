//! Dynamic directed influence graph.
//!
//! Nodes carry dense ids assigned in arrival order. Every edge stores a
//! single parameter in `(0, 1]`, read as an activation probability under the
//! independent cascade model or as an influence weight under the linear
//! threshold model. Under LT the incoming weights of every node sum to at
//! most one (up to [`LT_WEIGHT_TOLERANCE`]).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// Slack allowed on the LT incoming-weight sum to absorb floating accumulation.
pub const LT_WEIGHT_TOLERANCE: f64 = 1e-12;

/// Dense node index. Ids are handed out consecutively and never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(u32::try_from(i).expect("node index exceeds u32"))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Edge probability (IC) or weight (LT), always in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EdgeParam(f64);

impl EdgeParam {
    pub fn new(value: f64) -> Result<Self, GraphError> {
        if value > 0.0 && value <= 1.0 {
            Ok(EdgeParam(value))
        } else {
            Err(GraphError::BadParam(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for EdgeParam {
    type Error = GraphError;
    fn try_from(v: f64) -> Result<Self, GraphError> {
        EdgeParam::new(v)
    }
}

impl From<EdgeParam> for f64 {
    fn from(p: EdgeParam) -> f64 {
        p.0
    }
}

/// Diffusion model the graph's edge parameters are interpreted under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Independent cascade: each edge is live independently with its probability.
    Ic,
    /// Linear threshold: each node picks at most one live in-edge, by weight.
    Lt,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Ic => "ic",
            Model::Lt => "lt",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = GraphError;
    fn from_str(s: &str) -> Result<Self, GraphError> {
        match s.to_ascii_lowercase().as_str() {
            "ic" => Ok(Model::Ic),
            "lt" => Ok(Model::Lt),
            other => Err(GraphError::UnknownModel(other.to_string())),
        }
    }
}

/// One adjacency entry: the neighbour on the other end and the edge parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub node: NodeId,
    pub param: EdgeParam,
}

#[derive(Debug, Clone)]
pub struct InfluenceGraph {
    model: Model,
    out_adj: Vec<Vec<Link>>,
    in_adj: Vec<Vec<Link>>,
    in_weight: Vec<f64>,
    params: HashMap<(NodeId, NodeId), EdgeParam>,
}

impl InfluenceGraph {
    pub fn new(model: Model) -> Self {
        InfluenceGraph {
            model,
            out_adj: Vec::new(),
            in_adj: Vec::new(),
            in_weight: Vec::new(),
            params: HashMap::new(),
        }
    }

    /// Builds a graph with `n` nodes and the given edges inserted in order.
    pub fn from_edges<I>(model: Model, n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId, EdgeParam)>,
    {
        let mut g = InfluenceGraph::new(model);
        for _ in 0..n {
            g.add_node();
        }
        for (u, v, p) in edges {
            g.add_edge(u, v, p)?;
        }
        Ok(g)
    }

    #[inline]
    pub fn model(&self) -> Model {
        self.model
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.out_adj.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.params.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count()).map(NodeId::from)
    }

    #[inline]
    pub fn contains_node(&self, v: NodeId) -> bool {
        v.index() < self.node_count()
    }

    pub fn add_node(&mut self) -> NodeId {
        let id = NodeId::from(self.node_count());
        self.out_adj.push(Vec::new());
        self.in_adj.push(Vec::new());
        self.in_weight.push(0.0);
        id
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId, param: EdgeParam) -> Result<(), GraphError> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.params.contains_key(&(u, v)) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        if self.model == Model::Lt {
            let sum = self.in_weight[v.index()] + param.value();
            if sum > 1.0 + LT_WEIGHT_TOLERANCE {
                return Err(GraphError::LtWeightOverflow { node: v, sum });
            }
        }
        self.params.insert((u, v), param);
        self.out_adj[u.index()].push(Link { node: v, param });
        self.in_adj[v.index()].push(Link { node: u, param });
        self.in_weight[v.index()] += param.value();
        self.debug_check();
        Ok(())
    }

    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> Result<EdgeParam, GraphError> {
        let param = self
            .params
            .remove(&(u, v))
            .ok_or(GraphError::UnknownEdge(u, v))?;
        let out = &mut self.out_adj[u.index()];
        let pos = out.iter().position(|a| a.node == v).expect("adjacency out of sync");
        out.remove(pos);
        let inc = &mut self.in_adj[v.index()];
        let pos = inc.iter().position(|a| a.node == u).expect("adjacency out of sync");
        inc.remove(pos);
        // Recompute rather than subtract so repeated churn cannot drift.
        self.in_weight[v.index()] = inc.iter().map(|a| a.param.value()).sum();
        self.debug_check();
        Ok(param)
    }

    #[inline]
    pub fn edge_param(&self, u: NodeId, v: NodeId) -> Option<EdgeParam> {
        self.params.get(&(u, v)).copied()
    }

    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.params.contains_key(&(u, v))
    }

    /// Incoming arcs of `v`, in insertion order. Each arc's `node` is the source.
    #[inline]
    pub fn in_arcs(&self, v: NodeId) -> &[Link] {
        &self.in_adj[v.index()]
    }

    /// Outgoing arcs of `u`, in insertion order. Each arc's `node` is the target.
    #[inline]
    pub fn out_arcs(&self, u: NodeId) -> &[Link] {
        &self.out_adj[u.index()]
    }

    #[inline]
    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_adj[v.index()].len()
    }

    /// Sum of incoming edge parameters of `v`.
    #[inline]
    pub fn in_weight(&self, v: NodeId) -> f64 {
        self.in_weight[v.index()]
    }

    /// All edges sorted by `(source, target)`; the canonical static snapshot.
    pub fn snapshot(&self) -> Vec<(NodeId, NodeId, EdgeParam)> {
        let mut edges: Vec<_> = self.params.iter().map(|(&(u, v), &p)| (u, v, p)).collect();
        edges.sort_by_key(|&(u, v, _)| (u, v));
        edges
    }

    fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if self.contains_node(v) {
            Ok(())
        } else {
            Err(GraphError::UnknownNode(v))
        }
    }

    /// Verifies adjacency consistency and, under LT, the weight-sum bound at every node.
    pub fn check_invariants(&self) -> Result<(), String> {
        let outs: usize = self.out_adj.iter().map(Vec::len).sum();
        let ins: usize = self.in_adj.iter().map(Vec::len).sum();
        if outs != self.params.len() || ins != self.params.len() {
            return Err(format!(
                "edge count mismatch: out {outs}, in {ins}, index {}",
                self.params.len()
            ));
        }
        for (u, arcs) in self.out_adj.iter().enumerate() {
            for a in arcs {
                if self.params.get(&(NodeId::from(u), a.node)) != Some(&a.param) {
                    return Err(format!("out-arc {u}->{} missing from index", a.node));
                }
            }
        }
        for (v, arcs) in self.in_adj.iter().enumerate() {
            for a in arcs {
                if self.params.get(&(a.node, NodeId::from(v))) != Some(&a.param) {
                    return Err(format!("in-arc {}->{v} missing from index", a.node));
                }
            }
            if self.model == Model::Lt {
                let sum: f64 = arcs.iter().map(|a| a.param.value()).sum();
                if sum > 1.0 + LT_WEIGHT_TOLERANCE {
                    return Err(format!("LT weight sum {sum} at node {v}"));
                }
            }
        }
        Ok(())
    }

    #[inline]
    fn debug_check(&self) {
        #[cfg(debug_assertions)]
        if self.model == Model::Lt {
            // Exhaustive per-node check; adjacency consistency is covered in tests.
            for (v, arcs) in self.in_adj.iter().enumerate() {
                let sum: f64 = arcs.iter().map(|a| a.param.value()).sum();
                debug_assert!(
                    sum <= 1.0 + LT_WEIGHT_TOLERANCE,
                    "LT weight sum {sum} at node {v}"
                );
            }
        }
    }
}

impl PartialEq for InfluenceGraph {
    fn eq(&self, other: &Self) -> bool {
        self.model == other.model
            && self.node_count() == other.node_count()
            && self.snapshot() == other.snapshot()
    }
}
