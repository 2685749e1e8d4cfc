//! Dynamic influence maximization by incremental RR-set maintenance.
//!
//! Execution is split into phases (a phase ends when `n` or `m` doubles) and
//! iterations (an iteration ends when the metering collection `H_est` has
//! spent more than `restart_multiplier * R * m0` steps). Every iteration
//! starts with [`Engine::rebuild`]: run [`estimate`], fix the sampling
//! probability `p = min(1, K / n0)`, and sample two independent RR
//! collections. `H_est` only meters cost; `H_cv` feeds the MAX-k coverage
//! solver whose best solution answers queries.

use std::collections::BTreeMap;

use rand::Rng as _;
use serde::Serialize;

use crate::coverage::{CoverageSolver, RootId};
use crate::diffusion::Scratch;
use crate::error::EngineError;
use crate::graph::{EdgeParam, InfluenceGraph, Model, NodeId};
use crate::random::RandomSource;
use crate::rr::{augment_rr, sample_rr, sample_steps, RRSet};

const LABEL_ITERATION: u64 = 1;
const LABEL_ESTIMATE: u64 = 2;
const LABEL_EST_COIN: u64 = 3;
const LABEL_EST_SET: u64 = 4;
const LABEL_CV_COIN: u64 = 5;
const LABEL_CV_SET: u64 = 6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EngineConfig {
    /// Seed budget.
    pub k: usize,
    pub epsilon: f64,
    /// Failure probability.
    pub delta: f64,
    /// Concentration constant in `R = c * eps^-2 * k * ln(n0 / delta)`; must exceed 24.
    pub c: f64,
    pub model: Model,
    pub rng_seed: u64,
    /// An iteration ends once `H_est` has spent more than this many `R * m0` steps.
    pub restart_multiplier: f64,
    /// When false, `H_cv` is not sampled (metering-only runs).
    pub track_coverage: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            k: 5,
            epsilon: 0.2,
            delta: 0.1,
            c: 25.0,
            model: Model::Ic,
            rng_seed: 0,
            restart_multiplier: 16.0,
            track_coverage: true,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |m: String| Err(EngineError::BadConfig(m));
        if self.k < 1 {
            return bad("k must be at least 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0 / 3.0) {
            return bad(format!("epsilon {} outside (0, 1/3)", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta {} outside (0, 1)", self.delta));
        }
        if !(self.c > 24.0) || !self.c.is_finite() {
            return bad(format!("c = {} must exceed 24", self.c));
        }
        if !(self.restart_multiplier > 0.0) {
            return bad("restart multiplier must be positive".into());
        }
        Ok(())
    }

    /// `R = c * eps^-2 * k * ln(n0 / delta)` (natural log).
    pub fn sample_budget(&self, n0: usize) -> f64 {
        self.c / (self.epsilon * self.epsilon) * self.k as f64 * (n0 as f64 / self.delta).ln()
    }
}

/// Why a rebuild happened.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RebuildCause {
    /// First edge ended bootstrap mode.
    Bootstrap,
    NodeDoubling,
    EdgeDoubling,
    /// `H_est` exceeded its step budget.
    Restart,
    /// Requested through [`Engine::rebuild`].
    Manual,
}

impl RebuildCause {
    fn starts_phase(self) -> bool {
        matches!(
            self,
            RebuildCause::Bootstrap | RebuildCause::NodeDoubling | RebuildCause::EdgeDoubling
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rebuild {
    /// Number of updates applied when the rebuild ran.
    pub at_update: u64,
    pub cause: RebuildCause,
    pub n0: usize,
    pub m0: usize,
    pub k_est: u64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EngineStats {
    pub updates: u64,
    pub phases: u64,
    /// Rebuilds of any cause.
    pub iterations: u64,
    pub restarts: u64,
    /// Steps spent inside Estimate.
    pub estimate_steps: u64,
    /// Steps spent building and augmenting `H_est`.
    pub est_steps: u64,
    /// Steps spent building and augmenting `H_cv`.
    pub cv_steps: u64,
    /// Unit operations of all coverage solvers.
    pub coverage_ops: u64,
}

impl EngineStats {
    pub fn total_steps(&self) -> u64 {
        self.estimate_steps + self.est_steps + self.cv_steps + self.coverage_ops
    }
}

/// Outcome of [`estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimateOutcome {
    /// Number of RR sets sampled.
    pub sets: u64,
    /// Steps they cost in total.
    pub steps: u64,
}

/// Samples uniform-root RR sets until at least `r * m0` steps were spent.
/// The set in flight when the budget is crossed is counted.
pub fn estimate(
    graph: &InfluenceGraph,
    r: f64,
    m0: usize,
    source: RandomSource,
) -> Result<EstimateOutcome, EngineError> {
    let n = graph.node_count();
    if n == 0 {
        return Err(EngineError::EmptyGraph);
    }
    let budget = r * m0 as f64;
    let mut rng = source.rng();
    let mut scratch = Scratch::new();
    let mut out = EstimateOutcome { sets: 0, steps: 0 };
    while (out.steps as f64) < budget || out.sets == 0 {
        let root = NodeId::from(rng.gen_range(0..n));
        out.steps += sample_steps(graph, root, &mut rng, &mut scratch);
        out.sets += 1;
    }
    Ok(out)
}

/// One collection of RR sets keyed by root, with an inverted index from
/// node to the roots whose set contains it.
#[derive(Debug, Clone, Default)]
struct RRCollection {
    sets: BTreeMap<NodeId, RRSet>,
    containing: Vec<Vec<NodeId>>,
}

impl RRCollection {
    fn reset(&mut self, n: usize) {
        self.sets.clear();
        self.containing.clear();
        self.containing.resize(n, Vec::new());
    }

    fn insert(&mut self, set: RRSet) {
        for &v in set.members() {
            self.containing[v.index()].push(set.root());
        }
        self.sets.insert(set.root(), set);
    }

    /// Roots whose set contains `v`, ascending.
    fn roots_containing(&self, v: NodeId) -> Vec<NodeId> {
        let mut roots = self.containing[v.index()].clone();
        roots.sort_unstable();
        roots
    }
}

#[derive(Debug, Clone)]
pub struct Engine {
    config: EngineConfig,
    source: RandomSource,
    graph: InfluenceGraph,
    bootstrap: bool,
    n0: usize,
    m0: usize,
    r: f64,
    k_est: u64,
    p: f64,
    est: RRCollection,
    cv: RRCollection,
    est_steps: u64,
    cv_steps: u64,
    solver: Option<CoverageSolver>,
    stats: EngineStats,
    rebuilds: Vec<Rebuild>,
}

/// Answer to a query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryAnswer {
    pub seeds: Vec<NodeId>,
    /// Coverage of `seeds` in `H_cv` scaled by `1 / p`.
    pub spread_estimate: f64,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Result<Self, EngineError> {
        config.validate()?;
        Ok(Engine {
            source: RandomSource::new(config.rng_seed),
            graph: InfluenceGraph::new(config.model),
            config,
            bootstrap: true,
            n0: 0,
            m0: 0,
            r: 0.0,
            k_est: 0,
            p: 0.0,
            est: RRCollection::default(),
            cv: RRCollection::default(),
            est_steps: 0,
            cv_steps: 0,
            solver: None,
            stats: EngineStats::default(),
            rebuilds: Vec::new(),
        })
    }

    /// Starts from an existing graph as if it had just been loaded: if it has
    /// an edge, `n0 = n`, `m0 = m` and one rebuild runs.
    pub fn from_graph(config: EngineConfig, graph: InfluenceGraph) -> Result<Self, EngineError> {
        if graph.model() != config.model {
            return Err(EngineError::BadConfig(format!(
                "graph model {} differs from configured {}",
                graph.model(),
                config.model
            )));
        }
        let mut e = Engine::new(config)?;
        e.graph = graph;
        e.est.reset(e.graph.node_count());
        e.cv.reset(e.graph.node_count());
        if e.graph.edge_count() > 0 {
            e.bootstrap = false;
            e.n0 = e.graph.node_count();
            e.m0 = e.graph.edge_count();
            e.build(RebuildCause::Bootstrap)?;
        }
        Ok(e)
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn graph(&self) -> &InfluenceGraph {
        &self.graph
    }

    pub fn in_bootstrap(&self) -> bool {
        self.bootstrap
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn m0(&self) -> usize {
        self.m0
    }

    /// `R` of the current iteration.
    pub fn sample_budget(&self) -> f64 {
        self.r
    }

    /// `K` returned by the current iteration's Estimate.
    pub fn k_est(&self) -> u64 {
        self.k_est
    }

    /// Per-node sampling probability of the current iteration.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Steps spent on `H_est` in the current iteration.
    pub fn est_steps(&self) -> u64 {
        self.est_steps
    }

    /// Steps spent on `H_cv` in the current iteration.
    pub fn cv_steps(&self) -> u64 {
        self.cv_steps
    }

    /// Restart threshold on [`Engine::est_steps`].
    pub fn est_step_limit(&self) -> f64 {
        self.config.restart_multiplier * self.r * self.m0 as f64
    }

    pub fn est_sets(&self) -> &BTreeMap<NodeId, RRSet> {
        &self.est.sets
    }

    pub fn cv_sets(&self) -> &BTreeMap<NodeId, RRSet> {
        &self.cv.sets
    }

    pub fn solver(&self) -> Option<&CoverageSolver> {
        self.solver.as_ref()
    }

    pub fn stats(&self) -> EngineStats {
        let mut s = self.stats;
        s.coverage_ops += self.solver.as_ref().map_or(0, CoverageSolver::total_ops);
        s
    }

    pub fn rebuilds(&self) -> &[Rebuild] {
        &self.rebuilds
    }

    pub fn insert_node(&mut self) -> Result<NodeId, EngineError> {
        let v = self.graph.add_node();
        self.est.containing.push(Vec::new());
        self.cv.containing.push(Vec::new());
        self.stats.updates += 1;
        if self.bootstrap {
            return Ok(v);
        }
        if self.graph.node_count() >= 2 * self.n0 {
            self.n0 = self.graph.node_count();
            self.m0 = self.graph.edge_count();
            self.build(RebuildCause::NodeDoubling)?;
            return Ok(v);
        }
        self.solver_mut().insert_left(v)?;
        let iter = self.iteration_source();
        if iter.split_path(&[LABEL_EST_COIN, v.0 as u64]).rng().gen::<f64>() < self.p {
            let set = sample_rr(&self.graph, v, iter.split_path(&[LABEL_EST_SET, v.0 as u64]))?;
            self.est_steps += set.steps();
            self.stats.est_steps += set.steps();
            self.est.insert(set);
        }
        if self.config.track_coverage
            && iter.split_path(&[LABEL_CV_COIN, v.0 as u64]).rng().gen::<f64>() < self.p
        {
            let set = sample_rr(&self.graph, v, iter.split_path(&[LABEL_CV_SET, v.0 as u64]))?;
            self.cv_steps += set.steps();
            self.stats.cv_steps += set.steps();
            let solver = self.solver.as_mut().expect("solver exists after bootstrap");
            solver.insert_right(RootId::from(v))?;
            solver.insert_edge(v, RootId::from(v))?;
            self.cv.insert(set);
        }
        Ok(v)
    }

    pub fn insert_edge(&mut self, u: NodeId, v: NodeId, param: EdgeParam) -> Result<(), EngineError> {
        self.graph.add_edge(u, v, param)?;
        self.stats.updates += 1;
        let m = self.graph.edge_count();
        if self.bootstrap {
            self.bootstrap = false;
            self.n0 = self.graph.node_count();
            self.m0 = m;
            return self.build(RebuildCause::Bootstrap);
        }
        if m >= 2 * self.m0 {
            self.n0 = self.graph.node_count();
            self.m0 = m;
            return self.build(RebuildCause::EdgeDoubling);
        }

        let limit = self.est_step_limit();
        for root in self.est.roots_containing(v) {
            let set = self.est.sets.get_mut(&root).expect("indexed root");
            let aug = augment_rr(set, &self.graph, (u, v, param))?;
            self.est_steps += aug.steps;
            self.stats.est_steps += aug.steps;
            for &x in &aug.added {
                self.est.containing[x.index()].push(root);
            }
            if self.est_steps as f64 > limit {
                self.n0 = self.graph.node_count();
                self.m0 = m;
                return self.build(RebuildCause::Restart);
            }
        }

        if self.config.track_coverage {
            let solver = self.solver.as_mut().expect("solver exists after bootstrap");
            for root in self.cv.roots_containing(v) {
                let set = self.cv.sets.get_mut(&root).expect("indexed root");
                let aug = augment_rr(set, &self.graph, (u, v, param))?;
                self.cv_steps += aug.steps;
                self.stats.cv_steps += aug.steps;
                for &x in &aug.added {
                    self.cv.containing[x.index()].push(root);
                    solver.insert_edge(x, RootId::from(root))?;
                }
            }
        }
        Ok(())
    }

    /// The incremental engine does not support deletions.
    pub fn remove_edge(&mut self, _u: NodeId, _v: NodeId) -> Result<(), EngineError> {
        Err(EngineError::DeletionUnsupported)
    }

    pub fn query(&self) -> QueryAnswer {
        match &self.solver {
            Some(solver) if !self.bootstrap => {
                let (seeds, value) = solver.best_solution();
                QueryAnswer {
                    seeds,
                    spread_estimate: value as f64 / self.p,
                }
            }
            _ => {
                // Edge-free graph: any k nodes are optimal with spread k.
                let take = self.config.k.min(self.graph.node_count());
                let seeds: Vec<NodeId> = (0..take).map(NodeId::from).collect();
                QueryAnswer {
                    spread_estimate: seeds.len() as f64,
                    seeds,
                }
            }
        }
    }

    /// Starts a fresh iteration with the current `n0`, `m0`.
    pub fn rebuild(&mut self) -> Result<(), EngineError> {
        if self.bootstrap {
            return Ok(());
        }
        self.build(RebuildCause::Manual)
    }

    fn iteration_source(&self) -> RandomSource {
        // Iteration j is the j-th rebuild; `iterations` already counts it.
        self.source
            .split_path(&[LABEL_ITERATION, self.stats.iterations.saturating_sub(1)])
    }

    fn solver_mut(&mut self) -> &mut CoverageSolver {
        self.solver.as_mut().expect("solver exists after bootstrap")
    }

    fn build(&mut self, cause: RebuildCause) -> Result<(), EngineError> {
        self.stats.iterations += 1;
        if cause.starts_phase() {
            self.stats.phases += 1;
        }
        if cause == RebuildCause::Restart {
            self.stats.restarts += 1;
        }
        let iter = self.iteration_source();
        let n = self.graph.node_count();

        self.r = self.config.sample_budget(self.n0);
        let est = estimate(&self.graph, self.r, self.m0.max(1), iter.split(LABEL_ESTIMATE))?;
        self.stats.estimate_steps += est.steps;
        self.k_est = est.sets;
        self.p = (self.k_est as f64 / self.n0 as f64).min(1.0);

        if let Some(old) = self.solver.take() {
            self.stats.coverage_ops += old.total_ops();
        }
        let mut solver = CoverageSolver::new(self.config.k, self.config.epsilon, 2 * self.n0)?;
        self.est.reset(n);
        self.cv.reset(n);
        self.est_steps = 0;
        self.cv_steps = 0;

        for v in self.graph.nodes() {
            solver.insert_left(v)?;
        }
        for v in self.graph.nodes() {
            let id = v.0 as u64;
            if iter.split_path(&[LABEL_EST_COIN, id]).rng().gen::<f64>() < self.p {
                let set = sample_rr(&self.graph, v, iter.split_path(&[LABEL_EST_SET, id]))?;
                self.est_steps += set.steps();
                self.est.insert(set);
            }
            if self.config.track_coverage
                && iter.split_path(&[LABEL_CV_COIN, id]).rng().gen::<f64>() < self.p
            {
                let set = sample_rr(&self.graph, v, iter.split_path(&[LABEL_CV_SET, id]))?;
                self.cv_steps += set.steps();
                solver.insert_right(RootId::from(v))?;
                for &u in set.members() {
                    solver.insert_edge(u, RootId::from(v))?;
                }
                self.cv.insert(set);
            }
        }
        self.stats.est_steps += self.est_steps;
        self.stats.cv_steps += self.cv_steps;
        self.solver = Some(solver);
        self.rebuilds.push(Rebuild {
            at_update: self.stats.updates,
            cause,
            n0: self.n0,
            m0: self.m0,
            k_est: self.k_est,
            p: self.p,
        });
        Ok(())
    }
}
