//! One threshold-greedy thread of the MAX-k coverage solver.
//!
//! A thread owns a guess `OPT_i` and grows its solution `S_i` whenever some
//! left node's marginal coverage reaches `(OPT_i - f(S_i)) / k`. It keeps
//!
//! * `covered`: the roots covered by `S_i`,
//! * for every left node `u`, the list of its edges into uncovered roots
//!   (`|V_u|` is that list's length),
//! * buckets of left nodes keyed by `|V_u|` with a max pointer.
//!
//! Unit operations charged to `ops`: 1 per node or edge arrival, 1 per
//! element moved into or out of some `V_u`, 1 per bucket relink, 1 per root
//! moved into `covered`, 2 per seed addition.

use std::collections::BTreeSet;

use super::graph::{CoverageGraph, EdgeIdx};
use crate::graph::NodeId;

const NO_SLOT: u32 = u32::MAX;

/// Marginal gain and value just before one seed addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Addition {
    pub seed: NodeId,
    pub value_before: usize,
    pub gain: usize,
}

#[derive(Debug, Clone)]
pub struct ThreadState {
    index: u32,
    guess: f64,
    k: usize,
    seeds: Vec<NodeId>,
    history: Vec<Addition>,
    in_seeds: Vec<bool>,
    covered: Vec<bool>,
    value: usize,
    uncovered: Vec<Vec<EdgeIdx>>,
    slot: Vec<u32>,
    buckets: Vec<BTreeSet<(NodeId, u32)>>,
    max_bucket: usize,
    ops: u64,
    events: u64,
}

impl ThreadState {
    pub(crate) fn new(index: u32, guess: f64, k: usize) -> Self {
        ThreadState {
            index,
            guess,
            k,
            seeds: Vec::new(),
            history: Vec::new(),
            in_seeds: Vec::new(),
            covered: Vec::new(),
            value: 0,
            uncovered: Vec::new(),
            slot: Vec::new(),
            buckets: vec![BTreeSet::new()],
            max_bucket: 0,
            ops: 0,
            events: 0,
        }
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    /// The guess `OPT_i = (1 + eps)^i`.
    pub fn guess(&self) -> f64 {
        self.guess
    }

    /// Seeds in the order they were added.
    pub fn seeds(&self) -> &[NodeId] {
        &self.seeds
    }

    /// Every seed addition with the marginal gain it was admitted at.
    pub fn history(&self) -> &[Addition] {
        &self.history
    }

    /// `f(S_i)`: the number of covered roots.
    pub fn value(&self) -> usize {
        self.value
    }

    /// Unit operations performed so far.
    pub fn ops(&self) -> u64 {
        self.ops
    }

    /// Node and edge arrivals processed so far.
    pub fn events(&self) -> u64 {
        self.events
    }

    /// `|V_u|` for the left node at `idx`.
    pub(crate) fn marginal(&self, idx: u32) -> usize {
        self.uncovered[idx as usize].len()
    }

    #[inline]
    fn is_full(&self) -> bool {
        self.seeds.len() >= self.k
    }

    /// Threshold test; zero marginals never qualify.
    #[inline]
    fn meets_threshold(&self, marginal: usize) -> bool {
        marginal > 0 && (self.k * marginal) as f64 >= self.guess - self.value as f64
    }

    pub(crate) fn on_left(&mut self) {
        self.events += 1;
        self.ops += 1;
        self.in_seeds.push(false);
        self.uncovered.push(Vec::new());
    }

    pub(crate) fn on_right(&mut self) {
        self.events += 1;
        self.ops += 1;
        self.covered.push(false);
    }

    pub(crate) fn on_edge(&mut self, graph: &CoverageGraph, e: EdgeIdx) {
        debug_assert_eq!(e as usize, self.slot.len(), "edges must arrive in order");
        self.events += 1;
        self.ops += 1;
        self.slot.push(NO_SLOT);
        let (li, ri) = graph.edges[e as usize];
        if self.covered[ri as usize] {
            return;
        }
        if self.in_seeds[li as usize] {
            // f(S_i) grew, so the threshold dropped for everyone else.
            self.cover(graph, ri);
            self.revoke(graph);
            return;
        }
        let list = &mut self.uncovered[li as usize];
        self.slot[e as usize] = list.len() as u32;
        list.push(e);
        self.ops += 1;
        let m = list.len();
        self.relink(graph, li, m - 1, m);

        if !self.is_full() && self.meets_threshold(m) {
            self.add_seed(graph, li);
            self.revoke(graph);
        }
    }

    /// Adds qualifying nodes, largest marginal first (ties to the smallest
    /// id), until none qualifies or `k` seeds are chosen.
    fn revoke(&mut self, graph: &CoverageGraph) {
        while !self.is_full() {
            while self.max_bucket > 0 && self.buckets[self.max_bucket].is_empty() {
                self.max_bucket -= 1;
            }
            if self.max_bucket == 0 || !self.meets_threshold(self.max_bucket) {
                return;
            }
            let &(_, li) = self.buckets[self.max_bucket].first().expect("bucket non-empty");
            self.add_seed(graph, li);
        }
    }

    fn add_seed(&mut self, graph: &CoverageGraph, li: u32) {
        let gain = self.marginal(li);
        let seed = graph.left_id(li);
        self.history.push(Addition {
            seed,
            value_before: self.value,
            gain,
        });
        self.seeds.push(seed);
        self.in_seeds[li as usize] = true;
        self.ops += 2;
        while let Some(&e) = self.uncovered[li as usize].last() {
            let ri = graph.edges[e as usize].1;
            self.cover(graph, ri);
        }
        debug_assert_eq!(self.value, self.history.last().map_or(0, |a| a.value_before + a.gain));
    }

    fn cover(&mut self, graph: &CoverageGraph, ri: u32) {
        debug_assert!(!self.covered[ri as usize]);
        self.covered[ri as usize] = true;
        self.value += 1;
        self.ops += 1;
        for &e in &graph.right_adj[ri as usize] {
            // Edges this thread has not processed yet (replay) have no slot.
            let Some(&pos) = self.slot.get(e as usize) else { continue };
            if pos == NO_SLOT {
                continue;
            }
            let li = graph.edges[e as usize].0;
            let list = &mut self.uncovered[li as usize];
            let last = list.pop().expect("slot points into list");
            if last != e {
                list[pos as usize] = last;
                self.slot[last as usize] = pos;
            }
            self.slot[e as usize] = NO_SLOT;
            let m = list.len();
            self.ops += 1;
            self.relink(graph, li, m + 1, m);
        }
    }

    fn relink(&mut self, graph: &CoverageGraph, li: u32, old: usize, new: usize) {
        self.ops += 1;
        let key = (graph.left_id(li), li);
        if old > 0 {
            self.buckets[old].remove(&key);
        }
        if new > 0 {
            if self.buckets.len() <= new {
                self.buckets.resize_with(new + 1, BTreeSet::new);
            }
            self.buckets[new].insert(key);
            self.max_bucket = self.max_bucket.max(new);
        }
    }

    /// Value of the amortization potential
    /// `2|V| + 2|E| + 2 sum X_e + sum Y_r + 2 sum Z_u` over processed elements.
    pub fn potential(&self, graph: &CoverageGraph) -> u64 {
        let nodes = (self.in_seeds.len() + self.covered.len()) as u64;
        let edges = self.slot.len() as u64;
        let covered_edges = (0..self.slot.len())
            .filter(|&e| self.covered[graph.edges[e].1 as usize])
            .count() as u64;
        2 * nodes + 2 * edges + 2 * covered_edges + self.value as u64 + 2 * self.seeds.len() as u64
    }

    /// Checks the structural invariants against `graph`, restricted to the
    /// elements this thread has processed.
    pub fn check_invariants(&self, graph: &CoverageGraph) -> Result<(), String> {
        let nl = self.in_seeds.len();
        let nr = self.covered.len();
        let ne = self.slot.len();
        if self.seeds.len() > self.k {
            return Err(format!("thread {}: {} seeds > k", self.index, self.seeds.len()));
        }
        // covered = N(S)
        let mut expect = vec![false; nr];
        for &s in &self.seeds {
            let li = graph.left_idx(s).ok_or("seed not in graph")?;
            for &e in &graph.left_adj[li as usize] {
                if (e as usize) < ne {
                    expect[graph.edges[e as usize].1 as usize] = true;
                }
            }
        }
        if expect != self.covered {
            return Err(format!("thread {}: covered != N(S)", self.index));
        }
        if self.value != expect.iter().filter(|&&c| c).count() {
            return Err(format!("thread {}: value out of sync", self.index));
        }
        // V_u = N(u) \ covered, and bucket membership mirrors |V_u|.
        for li in 0..nl {
            let mut want: Vec<EdgeIdx> = graph.left_adj[li]
                .iter()
                .copied()
                .filter(|&e| (e as usize) < ne && !self.covered[graph.edges[e as usize].1 as usize])
                .collect();
            let mut have = self.uncovered[li].clone();
            want.sort_unstable();
            have.sort_unstable();
            if want != have {
                return Err(format!("thread {}: V_u mismatch at left {li}", self.index));
            }
            let m = have.len();
            let key = (graph.left_id(li as u32), li as u32);
            for (b, bucket) in self.buckets.iter().enumerate().skip(1) {
                if bucket.contains(&key) != (b == m) {
                    return Err(format!("thread {}: bucket mismatch at left {li}", self.index));
                }
            }
            if m > 0 && m > self.max_bucket {
                return Err(format!("thread {}: max pointer below {m}", self.index));
            }
            // Quiescence.
            if !self.is_full() && self.meets_threshold(m) {
                return Err(format!(
                    "thread {}: left {li} with marginal {m} left unadded",
                    self.index
                ));
            }
        }
        if self.ops > 5 * self.events {
            return Err(format!(
                "thread {}: {} ops exceed 5 x {} events",
                self.index, self.ops, self.events
            ));
        }
        Ok(())
    }
}
