use rand::Rng as _;

use super::{Augmentation, DiffusionModel, LtChoice, Scratch, WalkSink, NO_SOURCE};
use crate::error::SampleError;
use crate::graph::{EdgeParam, InfluenceGraph, Model, NodeId};
use crate::random::Rng;
use crate::rr::{Memo, RRSet};

/// Tolerated drift between a recorded residual and the graph's weight sum.
const RESIDUAL_SLACK: f64 = 1e-9;

/// Linear threshold in its live-edge form: every node keeps at most one
/// incoming edge, edge `e` with probability `w_e`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinearThreshold;

/// Draws the live in-edge of `v`. Always consumes exactly one uniform draw.
fn draw_choice(graph: &InfluenceGraph, v: NodeId, rng: &mut Rng) -> (LtChoice, u64) {
    let arcs = graph.in_arcs(v);
    let steps = arcs.len().max(1) as u64;
    let r = rng.gen::<f64>();
    let mut acc = 0.0;
    let mut source = None;
    for link in arcs {
        acc += link.param.value();
        if r < acc {
            source = Some(link.node);
            break;
        }
    }
    let residual = (1.0 - graph.in_weight(v)).max(0.0);
    (LtChoice { source, residual }, steps)
}

impl LinearThreshold {
    fn walk_from(
        graph: &InfluenceGraph,
        start: NodeId,
        rng: &mut Rng,
        sink: &mut dyn WalkSink,
    ) -> u64 {
        let mut cur = start;
        let mut steps = 0;
        loop {
            let (choice, cost) = draw_choice(graph, cur, rng);
            steps += cost;
            sink.record_choice(cur, choice);
            match choice.source {
                Some(u) if sink.reach(u) => cur = u,
                _ => return steps,
            }
        }
    }
}

impl DiffusionModel for LinearThreshold {
    fn model(&self) -> Model {
        Model::Lt
    }

    fn reverse_walk(
        &self,
        graph: &InfluenceGraph,
        start: NodeId,
        rng: &mut Rng,
        sink: &mut dyn WalkSink,
    ) -> u64 {
        Self::walk_from(graph, start, rng, sink)
    }

    fn augment(
        &self,
        set: &mut RRSet,
        graph: &InfluenceGraph,
        u: NodeId,
        v: NodeId,
        param: EdgeParam,
    ) -> Result<Augmentation, SampleError> {
        let root = set.root();
        let choice = match set.memo() {
            Memo::Lt(m) => match m.get(&v) {
                Some(c) => *c,
                None => return Ok(Augmentation::default()),
            },
            Memo::Ic(_) => return Err(SampleError::ModelMismatch),
        };
        if choice.source == Some(u) {
            return Err(SampleError::StaleSet { root, u, v, reason: "already chosen" });
        }
        if choice.source.is_some() {
            // P(old edge) = w_e is unaffected by a new sibling edge.
            return Ok(Augmentation::default());
        }
        let q = choice.residual;
        let expected = 1.0 - (graph.in_weight(v) - param.value());
        if (q - expected).abs() > RESIDUAL_SLACK {
            return Err(SampleError::StaleSet {
                root,
                u,
                v,
                reason: "residual out of sync with graph",
            });
        }
        assert!(q > 0.0, "no residual mass left at node {v}");
        // Conditional on "none so far", take the new edge with prob w / q.
        let take = set.rng.gen::<f64>() < (param.value() / q).min(1.0);
        let updated = LtChoice {
            source: take.then_some(u),
            residual: (q - param.value()).max(0.0),
        };
        set.state.record_choice(v, updated);
        let before = set.len();
        let mut steps = 1;
        if take && set.state.reach(u) {
            steps += Self::walk_from(graph, u, &mut set.rng, &mut set.state);
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
                let y = link.node;
                if scratch.is_marked(y) {
                    continue;
                }
                let chosen = match scratch.aux(y) {
                    Some(c) => c,
                    None => {
                        let (choice, _) = draw_choice(graph, y, rng);
                        let c = choice.source.map_or(NO_SOURCE, |s| s.0);
                        scratch.set_aux(y, c);
                        c
                    }
                };
                if chosen == x.0 && scratch.reach(y) {
                    queue.push(y);
                }
            }
        }
        let active = scratch.reached().len();
        scratch.put_queue(queue);
        active
    }
}
