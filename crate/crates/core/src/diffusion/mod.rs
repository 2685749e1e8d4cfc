//! Diffusion models as interchangeable strategies.
//!
//! Each model knows how to run a reverse walk (RR-set sampling), how to
//! extend an existing RR set after an edge insertion without disturbing its
//! distribution, and how to simulate forward spread for Monte Carlo. Models
//! are looked up by name through [`by_name`] or by [`Model`] through
//! [`strategy`].

mod ic;
mod lt;

use crate::error::SampleError;
use crate::graph::{EdgeParam, InfluenceGraph, Model, NodeId};
use crate::random::Rng;
use crate::rr::RRSet;

pub use ic::IndependentCascade;
pub use lt::LinearThreshold;

/// Recorded LT choice at one member node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtChoice {
    /// Source of the chosen live in-edge, if any.
    pub source: Option<NodeId>,
    /// Probability mass left for "no live in-edge" when the choice was drawn
    /// (decremented as later in-edges are offered to this node).
    pub residual: f64,
}

/// Receives the nodes and random outcomes produced by a reverse walk.
pub trait WalkSink {
    /// Marks `v` reached. Returns `false` if it already was.
    fn reach(&mut self, v: NodeId) -> bool;

    /// Whether the IC edge `(u, v)` was already flipped for this walk.
    fn examined(&self, _u: NodeId, _v: NodeId) -> bool {
        false
    }

    fn record_flip(&mut self, _u: NodeId, _v: NodeId, _live: bool) {}

    fn record_choice(&mut self, _v: NodeId, _choice: LtChoice) {}
}

/// Result of extending one RR set with a newly inserted edge.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Augmentation {
    /// Members that joined, in discovery order.
    pub added: Vec<NodeId>,
    /// Steps charged for this extension.
    pub steps: u64,
}

pub trait DiffusionModel: Send + Sync {
    fn model(&self) -> Model;

    fn name(&self) -> &'static str {
        self.model().name()
    }

    /// Continues a reverse walk from `start`, which the caller has already
    /// reached in `sink`. Returns the steps charged (without the one-step
    /// floor applied to fresh samples).
    fn reverse_walk(
        &self,
        graph: &InfluenceGraph,
        start: NodeId,
        rng: &mut Rng,
        sink: &mut dyn WalkSink,
    ) -> u64;

    /// Extends `set` after `(u, v)` was inserted into `graph`.
    fn augment(
        &self,
        set: &mut RRSet,
        graph: &InfluenceGraph,
        u: NodeId,
        v: NodeId,
        param: EdgeParam,
    ) -> Result<Augmentation, SampleError>;

    /// Number of nodes activated from `seeds` in one live-edge draw.
    fn simulate(
        &self,
        graph: &InfluenceGraph,
        seeds: &[NodeId],
        rng: &mut Rng,
        scratch: &mut Scratch,
    ) -> usize;
}

static IC: IndependentCascade = IndependentCascade;
static LT: LinearThreshold = LinearThreshold;
static REGISTRY: [&dyn DiffusionModel; 2] = [&IC, &LT];

/// All registered diffusion models.
pub fn registered() -> &'static [&'static dyn DiffusionModel] {
    &REGISTRY
}

pub fn by_name(name: &str) -> Option<&'static dyn DiffusionModel> {
    REGISTRY
        .iter()
        .copied()
        .find(|m| m.name().eq_ignore_ascii_case(name))
}

pub fn strategy(model: Model) -> &'static dyn DiffusionModel {
    match model {
        Model::Ic => &IC,
        Model::Lt => &LT,
    }
}

/// Reusable epoch-stamped node marks for walks that need no memo.
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    stamp: Vec<u32>,
    epoch: u32,
    /// Per-node auxiliary value, valid only when `aux_stamp` matches the epoch.
    aux: Vec<u32>,
    aux_stamp: Vec<u32>,
    reached: Vec<NodeId>,
    queue: Vec<NodeId>,
}

pub(crate) const NO_SOURCE: u32 = u32::MAX;

impl Scratch {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts a fresh walk over a graph with `n` nodes.
    pub fn reset(&mut self, n: usize) {
        if self.stamp.len() < n {
            self.stamp.resize(n, 0);
            self.aux.resize(n, 0);
            self.aux_stamp.resize(n, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.aux_stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.reached.clear();
        self.queue.clear();
    }

    #[inline]
    pub fn is_marked(&self, v: NodeId) -> bool {
        self.stamp[v.index()] == self.epoch
    }

    /// Nodes reached since the last reset, in discovery order.
    pub fn reached(&self) -> &[NodeId] {
        &self.reached
    }

    #[inline]
    pub(crate) fn aux(&self, v: NodeId) -> Option<u32> {
        (self.aux_stamp[v.index()] == self.epoch).then(|| self.aux[v.index()])
    }

    #[inline]
    pub(crate) fn set_aux(&mut self, v: NodeId, value: u32) {
        self.aux_stamp[v.index()] = self.epoch;
        self.aux[v.index()] = value;
    }

    pub(crate) fn take_queue(&mut self) -> Vec<NodeId> {
        std::mem::take(&mut self.queue)
    }

    pub(crate) fn put_queue(&mut self, mut q: Vec<NodeId>) {
        q.clear();
        self.queue = q;
    }
}

impl WalkSink for Scratch {
    #[inline]
    fn reach(&mut self, v: NodeId) -> bool {
        let s = &mut self.stamp[v.index()];
        if *s == self.epoch {
            false
        } else {
            *s = self.epoch;
            self.reached.push(v);
            true
        }
    }
}
