//! Incremental MAX-k coverage.
//!
//! The solver runs one [`ThreadState`] per guess `OPT_i = (1 + eps)^i` and
//! reports the best thread. When the number of roots outgrows the largest
//! guess, fresh threads are appended and brought up to date by replaying the
//! arrival log, so the result is the same as if they had existed from the
//! start.

mod graph;
mod thread;

pub use graph::{CoverageGraph, RootId};
pub use thread::{Addition, ThreadState};

use crate::error::CoverageError;
use crate::graph::NodeId;

#[derive(Debug, Clone, Copy)]
enum Arrival {
    Left,
    Right,
    Edge(u32),
}

#[derive(Debug, Clone)]
pub struct CoverageSolver {
    k: usize,
    epsilon: f64,
    graph: CoverageGraph,
    threads: Vec<ThreadState>,
    log: Vec<Arrival>,
    replays: u64,
}

/// Smallest `i` with `(1 + eps)^i >= n`.
fn top_index(n: usize, epsilon: f64) -> u32 {
    let n = n.max(1) as f64;
    let mut i = 0;
    while (1.0 + epsilon).powi(i as i32) < n {
        i += 1;
    }
    i
}

impl CoverageSolver {
    /// Creates threads `0..=ceil(log_{1+eps} n_max_hint)`. A hint of 0 starts
    /// with a single thread; more are added on demand.
    pub fn new(k: usize, epsilon: f64, n_max_hint: usize) -> Result<Self, CoverageError> {
        if k == 0 {
            return Err(CoverageError::BadBudget);
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(CoverageError::BadEpsilon(epsilon));
        }
        let top = top_index(n_max_hint, epsilon);
        let threads = (0..=top)
            .map(|i| ThreadState::new(i, (1.0 + epsilon).powi(i as i32), k))
            .collect();
        Ok(CoverageSolver {
            k,
            epsilon,
            graph: CoverageGraph::new(),
            threads,
            log: Vec::new(),
            replays: 0,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn graph(&self) -> &CoverageGraph {
        &self.graph
    }

    pub fn threads(&self) -> &[ThreadState] {
        &self.threads
    }

    /// Threads created after construction and filled by replay.
    pub fn replays(&self) -> u64 {
        self.replays
    }

    /// Node and edge arrivals delivered so far.
    pub fn events(&self) -> u64 {
        self.log.len() as u64
    }

    /// Sum of unit operations over all threads.
    pub fn total_ops(&self) -> u64 {
        self.threads.iter().map(ThreadState::ops).sum()
    }

    pub fn insert_left(&mut self, u: NodeId) -> Result<(), CoverageError> {
        self.graph.add_left(u)?;
        self.log.push(Arrival::Left);
        for t in &mut self.threads {
            t.on_left();
        }
        Ok(())
    }

    pub fn insert_right(&mut self, r: RootId) -> Result<(), CoverageError> {
        self.graph.add_right(r)?;
        self.log.push(Arrival::Right);
        for t in &mut self.threads {
            t.on_right();
        }
        self.grow();
        Ok(())
    }

    pub fn insert_edge(&mut self, u: NodeId, r: RootId) -> Result<(), CoverageError> {
        let e = self.graph.add_edge(u, r)?;
        self.log.push(Arrival::Edge(e));
        let graph = &self.graph;
        for t in &mut self.threads {
            t.on_edge(graph, e);
        }
        Ok(())
    }

    fn grow(&mut self) {
        let top = top_index(self.graph.right_count(), self.epsilon);
        while self.threads.len() <= top as usize {
            let i = self.threads.len() as u32;
            let mut t = ThreadState::new(i, (1.0 + self.epsilon).powi(i as i32), self.k);
            for a in &self.log {
                match *a {
                    Arrival::Left => t.on_left(),
                    Arrival::Right => t.on_right(),
                    Arrival::Edge(e) => t.on_edge(&self.graph, e),
                }
            }
            self.threads.push(t);
            self.replays += 1;
        }
    }

    /// The best thread: largest coverage, ties to the smallest index.
    pub fn best_thread(&self) -> &ThreadState {
        let mut best = &self.threads[0];
        for t in &self.threads[1..] {
            if t.value() > best.value() {
                best = t;
            }
        }
        best
    }

    /// Seeds of the best thread and their coverage.
    pub fn best_solution(&self) -> (Vec<NodeId>, usize) {
        let t = self.best_thread();
        (t.seeds().to_vec(), t.value())
    }

    pub fn check_invariants(&self) -> Result<(), String> {
        for t in &self.threads {
            t.check_invariants(&self.graph)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(i: u32) -> NodeId {
        NodeId(i)
    }

    fn r(i: u32) -> RootId {
        RootId(i)
    }

    #[test]
    fn thread_count_from_hint() {
        let s = CoverageSolver::new(1, 0.5, 8).unwrap();
        assert_eq!(s.threads().len(), 7);
        assert!(s.threads().iter().all(|t| t.value() == 0));
        assert_eq!(CoverageSolver::new(1, 0.2, 0).unwrap().threads().len(), 1);
    }

    #[test]
    fn init_errors() {
        assert_eq!(CoverageSolver::new(1, 1.0, 8).unwrap_err(), CoverageError::BadEpsilon(1.0));
        assert!(CoverageSolver::new(1, 0.0, 8).is_err());
        assert_eq!(CoverageSolver::new(0, 0.1, 8).unwrap_err(), CoverageError::BadBudget);
    }

    #[test]
    fn node_inserts_leave_solutions_alone() {
        let mut s = CoverageSolver::new(2, 0.1, 4).unwrap();
        s.insert_left(l(0)).unwrap();
        s.insert_right(r(0)).unwrap();
        assert!(s.threads().iter().all(|t| t.seeds().is_empty() && t.value() == 0));
        assert_eq!(s.insert_left(l(0)), Err(CoverageError::DuplicateNode(0)));
        assert_eq!(s.insert_right(r(0)), Err(CoverageError::DuplicateNode(0)));
        assert_eq!(s.insert_edge(l(5), r(0)), Err(CoverageError::UnknownNode(5)));
        s.check_invariants().unwrap();
    }

    #[test]
    fn first_edge_forces_seed() {
        let mut s = CoverageSolver::new(1, 0.1, 1).unwrap();
        assert_eq!(s.best_solution(), (vec![], 0));
        s.insert_left(l(0)).unwrap();
        s.insert_right(r(0)).unwrap();
        s.insert_edge(l(0), r(0)).unwrap();
        assert_eq!(s.threads()[0].seeds(), &[l(0)]);
        assert_eq!(s.best_solution(), (vec![l(0)], 1));
    }

    #[test]
    fn saturated_thread_ignores_covered_edges() {
        let mut s = CoverageSolver::new(1, 0.1, 1).unwrap();
        for i in 0..2 {
            s.insert_left(l(i)).unwrap();
        }
        s.insert_right(r(0)).unwrap();
        s.insert_edge(l(0), r(0)).unwrap();
        let before = s.threads()[0].seeds().to_vec();
        s.insert_edge(l(1), r(0)).unwrap();
        assert_eq!(s.threads()[0].seeds(), before.as_slice());
        assert_eq!(s.threads()[0].value(), 1);
        s.check_invariants().unwrap();
    }

    #[test]
    fn revoke_cascades_over_disjoint_nodes() {
        // Thread with OPT_i = 4, k = 2: threshold starts at 2.
        // a covers {0, 1}; b covers {2, 3}, but b's edges arrive first while a
        // is still short; then a's second edge triggers a then b in cascade.
        let eps = 0.2;
        let i = top_index(4, eps); // (1.2)^8 = 4.29 >= 4
        let mut s = CoverageSolver::new(2, eps, 4).unwrap();
        for u in 0..2 {
            s.insert_left(l(u)).unwrap();
        }
        for x in 0..4 {
            s.insert_right(r(x)).unwrap();
        }
        let guess = s.threads()[i as usize].guess();
        assert!(guess > 4.0 && guess < 4.5);
        // Threshold 4.29/2 = 2.15 > 2, so b's two edges alone do not qualify.
        s.insert_edge(l(1), r(2)).unwrap();
        s.insert_edge(l(1), r(3)).unwrap();
        assert!(s.threads()[i as usize].seeds().is_empty());
        s.insert_edge(l(0), r(0)).unwrap();
        s.insert_edge(l(0), r(1)).unwrap();
        assert!(s.threads()[i as usize].seeds().is_empty());
        // Lower thread (guess 4.0 / 2 = 2): adds both in one cascade.
        let j = i as usize - 1;
        let guess_j = s.threads()[j].guess();
        assert!(guess_j <= 4.0);
        assert_eq!(s.threads()[j].value(), 4);
        assert_eq!(s.threads()[j].seeds().len(), 2);
        s.check_invariants().unwrap();
    }

    #[test]
    fn revoke_adds_both_after_threshold_drops() {
        // OPT_0 = 1 with k = 2: every positive marginal qualifies at once.
        let mut s = CoverageSolver::new(2, 0.1, 1).unwrap();
        for u in 0..2 {
            s.insert_left(l(u)).unwrap();
        }
        for x in 0..2 {
            s.insert_right(r(x)).unwrap();
        }
        s.insert_edge(l(1), r(1)).unwrap();
        assert_eq!(s.threads()[0].seeds(), &[l(1)]);
        s.insert_edge(l(0), r(0)).unwrap();
        assert_eq!(s.threads()[0].seeds(), &[l(1), l(0)]);
    }

    #[test]
    fn zero_marginal_never_added() {
        // Thread 0 (guess 1) already reached its guess; a node whose only
        // root is covered must not be added even though the threshold is <= 0.
        let mut s = CoverageSolver::new(3, 0.1, 1).unwrap();
        for u in 0..3 {
            s.insert_left(l(u)).unwrap();
        }
        s.insert_right(r(0)).unwrap();
        s.insert_edge(l(0), r(0)).unwrap();
        s.insert_edge(l(1), r(0)).unwrap();
        s.insert_edge(l(2), r(0)).unwrap();
        assert_eq!(s.threads()[0].seeds(), &[l(0)]);
        s.check_invariants().unwrap();
    }

    #[test]
    fn tie_break_prefers_smallest_id() {
        // Two nodes reach the same marginal while the threshold is out of
        // reach; then a third node's addition drops the threshold.
        let mut s = CoverageSolver::new(3, 0.25, 64).unwrap();
        for u in [7, 3, 5] {
            s.insert_left(l(u)).unwrap();
        }
        for x in 0..5 {
            s.insert_right(r(x)).unwrap();
        }
        s.insert_edge(l(7), r(0)).unwrap();
        s.insert_edge(l(3), r(1)).unwrap();
        s.check_invariants().unwrap();
        // Find a thread whose threshold was above 1 but at most 1 + 1/3 after one seed.
        s.insert_edge(l(5), r(2)).unwrap();
        s.insert_edge(l(5), r(3)).unwrap();
        s.insert_edge(l(5), r(4)).unwrap();
        for t in s.threads() {
            if let [first, second, ..] = t.seeds() {
                if *first == l(5) {
                    assert_eq!(*second, l(3), "thread {} {:?}", t.index(), t.history());
                }
            }
        }
        s.check_invariants().unwrap();
    }

    #[test]
    fn lazy_growth_matches_preallocated_threads() {
        let mut lazy = CoverageSolver::new(2, 0.2, 0).unwrap();
        let mut eager = CoverageSolver::new(2, 0.2, 30).unwrap();
        let edges = [(0, 0), (1, 1), (0, 2), (2, 3), (1, 4), (2, 5), (0, 6), (3, 7)];
        for u in 0..4 {
            lazy.insert_left(l(u)).unwrap();
            eager.insert_left(l(u)).unwrap();
        }
        for x in 0..30 {
            lazy.insert_right(r(x)).unwrap();
            eager.insert_right(r(x)).unwrap();
            if let Some(&(u, rr)) = edges.get(x as usize) {
                lazy.insert_edge(l(u), r(rr)).unwrap();
                eager.insert_edge(l(u), r(rr)).unwrap();
            }
        }
        assert!(lazy.replays() > 0);
        assert_eq!(eager.replays(), 0);
        assert_eq!(lazy.threads().len(), eager.threads().len());
        for (a, b) in lazy.threads().iter().zip(eager.threads()) {
            assert_eq!(a.seeds(), b.seeds());
            assert_eq!(a.value(), b.value());
            assert_eq!(a.ops(), b.ops());
            assert_eq!(a.events(), b.events());
        }
        lazy.check_invariants().unwrap();
        assert_eq!(lazy.best_solution(), eager.best_solution());
    }

    #[test]
    fn best_thread_ties_to_smallest_index() {
        let mut s = CoverageSolver::new(1, 0.1, 10).unwrap();
        s.insert_left(l(0)).unwrap();
        s.insert_right(r(0)).unwrap();
        s.insert_edge(l(0), r(0)).unwrap();
        // Thread 0 and thread 1 (guess 1.1, threshold 1.1 > 1) differ; all
        // threads that picked l(0) have value 1, and thread 0 is first.
        assert_eq!(s.best_thread().index(), 0);
    }
}
