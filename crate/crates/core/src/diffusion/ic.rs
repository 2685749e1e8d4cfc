use rand::Rng as _;

use super::{Augmentation, DiffusionModel, Scratch, WalkSink};
use crate::error::SampleError;
use crate::graph::{EdgeParam, InfluenceGraph, Model, NodeId};
use crate::random::Rng;
use crate::rr::{Memo, RRSet};

/// Independent cascade: every edge is live independently with its probability.
#[derive(Debug, Clone, Copy, Default)]
pub struct IndependentCascade;

impl IndependentCascade {
    /// Breadth-first reverse search from `queue`, flipping each unexamined
    /// in-edge of every reached node exactly once.
    fn bfs(
        graph: &InfluenceGraph,
        mut queue: Vec<NodeId>,
        rng: &mut Rng,
        sink: &mut dyn WalkSink,
    ) -> u64 {
        let mut steps = 0;
        let mut head = 0;
        while head < queue.len() {
            let w = queue[head];
            head += 1;
            for link in graph.in_arcs(w) {
                let u = link.node;
                if sink.examined(u, w) {
                    continue;
                }
                let live = rng.gen::<f64>() < link.param.value();
                steps += 1;
                sink.record_flip(u, w, live);
                if live && sink.reach(u) {
                    queue.push(u);
                }
            }
        }
        steps
    }
}

impl DiffusionModel for IndependentCascade {
    fn model(&self) -> Model {
        Model::Ic
    }

    fn reverse_walk(
        &self,
        graph: &InfluenceGraph,
        start: NodeId,
        rng: &mut Rng,
        sink: &mut dyn WalkSink,
    ) -> u64 {
        Self::bfs(graph, vec![start], rng, sink)
    }

    fn augment(
        &self,
        set: &mut RRSet,
        graph: &InfluenceGraph,
        u: NodeId,
        v: NodeId,
        param: EdgeParam,
    ) -> Result<Augmentation, SampleError> {
        if !set.contains(v) {
            return Ok(Augmentation::default());
        }
        if let Memo::Ic(m) = set.memo() {
            if m.contains_key(&(u, v)) {
                return Err(SampleError::StaleSet {
                    root: set.root(),
                    u,
                    v,
                    reason: "already flipped",
                });
            }
        }
        let before = set.len();
        let live = set.rng.gen::<f64>() < param.value();
        set.state.record_flip(u, v, live);
        let mut steps = 1;
        if live && set.state.reach(u) {
            steps += Self::bfs(graph, vec![u], &mut set.rng, &mut set.state);
        }
        Ok(Augmentation {
            added: set.members()[before..].to_vec(),
            steps,
        })
    }

    fn simulate(
        &self,
        graph: &InfluenceGraph,
        seeds: &[NodeId],
        rng: &mut Rng,
        scratch: &mut Scratch,
    ) -> usize {
        scratch.reset(graph.node_count());
        let mut queue = scratch.take_queue();
        for &s in seeds {
            if scratch.reach(s) {
                queue.push(s);
            }
        }
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for link in graph.out_arcs(x) {
                // An edge into an active node can be skipped: its outcome is irrelevant.
                if scratch.is_marked(link.node) {
                    continue;
                }
                if rng.gen::<f64>() < link.param.value() && scratch.reach(link.node) {
                    queue.push(link.node);
                }
            }
        }
        let active = scratch.reached().len();
        scratch.put_queue(queue);
        active
    }
}
