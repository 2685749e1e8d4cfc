//! Reverse-reachable sets with a randomness memo.
//!
//! An [`RRSet`] remembers every random outcome it has drawn: flipped edges
//! under IC, per-member in-edge choices under LT. That record lets
//! [`augment_rr`] extend the set after an edge insertion so that the result
//! is distributed exactly as a fresh sample on the enlarged graph.
//!
//! Step accounting: one step per IC edge flip; under LT, drawing a node's
//! choice costs `max(1, in-degree)` steps and offering a new in-edge to a
//! member with no live in-edge costs one. A fresh sample is charged at
//! least one step.

use std::collections::{HashMap, HashSet};

use crate::diffusion::{self, Augmentation, LtChoice, Scratch, WalkSink};
use crate::error::SampleError;
use crate::graph::{EdgeParam, InfluenceGraph, Model, NodeId};
use crate::random::{RandomSource, Rng};

#[derive(Debug, Clone, PartialEq)]
pub enum Memo {
    /// Every flipped edge `(u, v)` with its outcome (live or dead).
    Ic(HashMap<(NodeId, NodeId), bool>),
    /// The recorded choice of every member node.
    Lt(HashMap<NodeId, LtChoice>),
}

impl Memo {
    fn new(model: Model) -> Self {
        match model {
            Model::Ic => Memo::Ic(HashMap::new()),
            Model::Lt => Memo::Lt(HashMap::new()),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Memo::Ic(m) => m.len(),
            Memo::Lt(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Member set plus memo; the part of an RR set a walk writes into.
#[derive(Debug, Clone)]
pub(crate) struct RRState {
    pub(crate) members: Vec<NodeId>,
    pub(crate) member_set: HashSet<NodeId>,
    pub(crate) memo: Memo,
}

impl WalkSink for RRState {
    fn reach(&mut self, v: NodeId) -> bool {
        if self.member_set.insert(v) {
            self.members.push(v);
            true
        } else {
            false
        }
    }

    fn examined(&self, u: NodeId, v: NodeId) -> bool {
        match &self.memo {
            Memo::Ic(m) => m.contains_key(&(u, v)),
            Memo::Lt(_) => false,
        }
    }

    fn record_flip(&mut self, u: NodeId, v: NodeId, live: bool) {
        if let Memo::Ic(m) = &mut self.memo {
            let prev = m.insert((u, v), live);
            debug_assert!(prev.is_none(), "edge ({u}, {v}) flipped twice");
        }
    }

    fn record_choice(&mut self, v: NodeId, choice: LtChoice) {
        if let Memo::Lt(m) = &mut self.memo {
            m.insert(v, choice);
        }
    }
}

#[derive(Debug, Clone)]
pub struct RRSet {
    root: NodeId,
    model: Model,
    pub(crate) state: RRState,
    pub(crate) steps: u64,
    pub(crate) rng: Rng,
}

impl RRSet {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn model(&self) -> Model {
        self.model
    }

    /// Members in discovery order; the root comes first.
    pub fn members(&self) -> &[NodeId] {
        &self.state.members
    }

    pub fn len(&self) -> usize {
        self.state.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state.members.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.state.member_set.contains(&v)
    }

    pub fn memo(&self) -> &Memo {
        &self.state.memo
    }

    /// Cumulative steps charged across sampling and every augmentation.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Checks that every edge referenced by the memo is still in `graph`.
    pub fn validate(&self, graph: &InfluenceGraph) -> Result<(), SampleError> {
        let stale = |u, v| SampleError::StaleSet {
            root: self.root,
            u,
            v,
            reason: "absent from graph",
        };
        match &self.state.memo {
            Memo::Ic(m) => {
                for &(u, v) in m.keys() {
                    if !graph.has_edge(u, v) {
                        return Err(stale(u, v));
                    }
                }
            }
            Memo::Lt(m) => {
                for (&v, c) in m {
                    if let Some(u) = c.source {
                        if !graph.has_edge(u, v) {
                            return Err(stale(u, v));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Samples the RR set of `root`. The set keeps a generator seeded from
/// `source` for use by later augmentations.
pub fn sample_rr(
    graph: &InfluenceGraph,
    root: NodeId,
    source: RandomSource,
) -> Result<RRSet, SampleError> {
    if !graph.contains_node(root) {
        return Err(SampleError::UnknownNode(root));
    }
    let model = graph.model();
    let mut set = RRSet {
        root,
        model,
        state: RRState {
            members: Vec::new(),
            member_set: HashSet::new(),
            memo: Memo::new(model),
        },
        steps: 0,
        rng: source.rng(),
    };
    set.state.reach(root);
    let steps = diffusion::strategy(model).reverse_walk(graph, root, &mut set.rng, &mut set.state);
    set.steps = steps.max(1);
    Ok(set)
}

/// Extends `set` after the edge `(u, v)` with parameter `param` was inserted
/// into `graph`. The set must have been kept current with every earlier
/// insertion.
pub fn augment_rr(
    set: &mut RRSet,
    graph: &InfluenceGraph,
    (u, v, param): (NodeId, NodeId, EdgeParam),
) -> Result<Augmentation, SampleError> {
    if set.model != graph.model() {
        return Err(SampleError::ModelMismatch);
    }
    if graph.edge_param(u, v) != Some(param) {
        return Err(SampleError::StaleSet {
            root: set.root,
            u,
            v,
            reason: "absent from graph",
        });
    }
    let aug = diffusion::strategy(set.model).augment(set, graph, u, v, param)?;
    set.steps += aug.steps;
    Ok(aug)
}

/// Draws one RR set of `root` without keeping a memo and returns its charged
/// steps. Uses `rng` exactly as [`sample_rr`] would.
pub fn sample_steps(
    graph: &InfluenceGraph,
    root: NodeId,
    rng: &mut Rng,
    scratch: &mut Scratch,
) -> u64 {
    scratch.reset(graph.node_count());
    scratch.reach(root);
    diffusion::strategy(graph.model())
        .reverse_walk(graph, root, rng, scratch)
        .max(1)
}

/// Like [`sample_steps`], leaving the members in `scratch.reached()`.
pub fn sample_members<'s>(
    graph: &InfluenceGraph,
    root: NodeId,
    rng: &mut Rng,
    scratch: &'s mut Scratch,
) -> (&'s [NodeId], u64) {
    let steps = sample_steps(graph, root, rng, scratch);
    (scratch.reached(), steps)
}
