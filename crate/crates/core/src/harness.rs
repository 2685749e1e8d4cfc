//! Stream replay against a named maintainer, producing a JSON-lines report.
//!
//! Maintainers are registered by name ([`registered_modes`]):
//!
//! * `engine`: the incremental [`Engine`]; rejects deletions.
//! * `baseline`: recomputes greedy RIS from scratch at every query; accepts
//!   deletions.

use std::time::Instant;

use serde::Serialize;

use crate::engine::{Engine, EngineConfig, QueryAnswer};
use crate::error::{EngineError, RunError};
use crate::graph::{InfluenceGraph, Model, NodeId};
use crate::oracle::{greedy_max_coverage, mc_spread, sample_uniform_rr_sets};
use crate::random::RandomSource;
use crate::stream::UpdateEvent;

const LABEL_BASELINE: u64 = 101;
const LABEL_MC: u64 = 102;

/// Work counters exposed by a maintainer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub total_steps: u64,
    /// Full recomputations: rebuilds for the engine, queries for the baseline.
    pub rebuilds: u64,
    pub phases: u64,
    pub iterations: u64,
    pub restarts: u64,
}

/// Something that keeps a seed set for an evolving graph.
pub trait Maintainer {
    fn name(&self) -> &'static str;
    fn apply(&mut self, event: &UpdateEvent) -> Result<(), EngineError>;
    fn query(&mut self) -> Result<QueryAnswer, EngineError>;
    fn graph(&self) -> &InfluenceGraph;
    fn counters(&self) -> Counters;
}

pub type MaintainerFactory = fn(&EngineConfig) -> Result<Box<dyn Maintainer>, EngineError>;

static MODES: [(&str, MaintainerFactory); 2] = [
    ("engine", |c| Ok(Box::new(Engine::new(c.clone())?))),
    ("baseline", |c| Ok(Box::new(Baseline::new(c.clone())?))),
];

pub fn registered_modes() -> &'static [(&'static str, MaintainerFactory)] {
    &MODES
}

/// Instantiates the maintainer registered as `mode`.
pub fn maintainer(mode: &str, config: &EngineConfig) -> Result<Box<dyn Maintainer>, EngineError> {
    let (_, make) = MODES
        .iter()
        .find(|(name, _)| *name == mode)
        .ok_or_else(|| EngineError::UnknownMode(mode.to_string()))?;
    make(config)
}

impl Maintainer for Engine {
    fn name(&self) -> &'static str {
        "engine"
    }

    fn apply(&mut self, event: &UpdateEvent) -> Result<(), EngineError> {
        match *event {
            UpdateEvent::Node => self.insert_node().map(drop),
            UpdateEvent::Edge(u, v, p) => self.insert_edge(u, v, p),
            UpdateEvent::Del(u, v) => self.remove_edge(u, v),
            UpdateEvent::Query => Ok(()),
        }
    }

    fn query(&mut self) -> Result<QueryAnswer, EngineError> {
        Ok(Engine::query(self))
    }

    fn graph(&self) -> &InfluenceGraph {
        Engine::graph(self)
    }

    fn counters(&self) -> Counters {
        let s = self.stats();
        Counters {
            total_steps: s.total_steps(),
            rebuilds: self.rebuilds().len() as u64,
            phases: s.phases,
            iterations: s.iterations,
            restarts: s.restarts,
        }
    }
}

/// Recomputes greedy max coverage over `R(n)` fresh RR sets per query.
#[derive(Debug, Clone)]
pub struct Baseline {
    config: EngineConfig,
    source: RandomSource,
    graph: InfluenceGraph,
    queries: u64,
    steps: u64,
}

impl Baseline {
    pub fn new(config: EngineConfig) -> Result<Self, EngineError> {
        config.validate()?;
        Ok(Baseline {
            source: RandomSource::new(config.rng_seed).split(LABEL_BASELINE),
            graph: InfluenceGraph::new(config.model),
            config,
            queries: 0,
            steps: 0,
        })
    }
}

impl Maintainer for Baseline {
    fn name(&self) -> &'static str {
        "baseline"
    }

    fn apply(&mut self, event: &UpdateEvent) -> Result<(), EngineError> {
        match *event {
            UpdateEvent::Node => {
                self.graph.add_node();
            }
            UpdateEvent::Edge(u, v, p) => self.graph.add_edge(u, v, p)?,
            UpdateEvent::Del(u, v) => {
                self.graph.remove_edge(u, v)?;
            }
            UpdateEvent::Query => {}
        }
        Ok(())
    }

    fn query(&mut self) -> Result<QueryAnswer, EngineError> {
        let q = self.queries;
        self.queries += 1;
        let n = self.graph.node_count();
        if n == 0 {
            return Ok(QueryAnswer { seeds: Vec::new(), spread_estimate: 0.0 });
        }
        let rr_count = self.config.sample_budget(n).ceil().max(1.0) as u64;
        let sample = sample_uniform_rr_sets(&self.graph, rr_count, self.source.split(q))?;
        self.steps += sample.steps;
        let (seeds, covered) = greedy_max_coverage(&sample.sets, n, self.config.k);
        Ok(QueryAnswer {
            seeds,
            spread_estimate: n as f64 * covered as f64 / rr_count as f64,
        })
    }

    fn graph(&self) -> &InfluenceGraph {
        &self.graph
    }

    fn counters(&self) -> Counters {
        Counters {
            total_steps: self.steps,
            rebuilds: self.queries,
            ..Counters::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOptions {
    pub mode: String,
    pub engine: EngineConfig,
    /// Monte Carlo trials for an independent spread check per query; 0 disables it.
    pub mc_trials: u64,
    /// Record wall-clock times (makes reports non-reproducible).
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            mode: "engine".into(),
            engine: EngineConfig::default(),
            mc_trials: 0,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryRecord {
    /// Updates applied before this query.
    pub step: u64,
    pub seeds: Vec<NodeId>,
    pub spread_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_spread: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc_std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub mode: String,
    pub model: Model,
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub c: f64,
    pub seed: u64,
    pub updates: u64,
    pub queries: u64,
    pub total_steps: u64,
    /// `total_steps / updates`; 0 for an update-free stream.
    pub steps_per_update: f64,
    pub rebuilds: u64,
    pub phases: u64,
    pub iterations: u64,
    pub restarts: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub queries: Vec<QueryRecord>,
    pub summary: Summary,
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line<'a> {
    Query(&'a QueryRecord),
    Summary(&'a Summary),
}

impl RunReport {
    /// One JSON object per query, then the summary object.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        let lines = self
            .queries
            .iter()
            .map(Line::Query)
            .chain(std::iter::once(Line::Summary(&self.summary)));
        for line in lines {
            out.push_str(&serde_json::to_string(&line).expect("report serializes"));
            out.push('\n');
        }
        out
    }
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Replays `events` in order against the maintainer named by `options.mode`.
pub fn run(options: &RunOptions, events: &[UpdateEvent]) -> Result<RunReport, RunError> {
    let at = |event: usize| move |source: EngineError| RunError { event, source };
    let mut m = maintainer(&options.mode, &options.engine).map_err(at(0))?;
    let mc_source = RandomSource::new(options.engine.rng_seed).split(LABEL_MC);
    let start = Instant::now();
    let mut updates = 0u64;
    let mut queries = Vec::new();
    for (i, event) in events.iter().enumerate() {
        if event.is_update() {
            m.apply(event).map_err(at(i + 1))?;
            updates += 1;
            continue;
        }
        let t = Instant::now();
        let answer = m.query().map_err(at(i + 1))?;
        let wall_ms = options.timing.then(|| elapsed_ms(t));
        let mc = if options.mc_trials > 0 && m.graph().node_count() > 0 {
            let src = mc_source.split(queries.len() as u64);
            let est = mc_spread(m.graph(), &answer.seeds, options.mc_trials, src)
                .map_err(|e| at(i + 1)(e.into()))?;
            Some(est)
        } else {
            None
        };
        queries.push(QueryRecord {
            step: updates,
            seeds: answer.seeds,
            spread_estimate: answer.spread_estimate,
            mc_spread: mc.map(|e| e.mean),
            mc_std_error: mc.map(|e| e.std_error),
            wall_ms,
        });
    }
    let c = m.counters();
    let cfg = &options.engine;
    let summary = Summary {
        mode: m.name().to_string(),
        model: cfg.model,
        k: cfg.k,
        epsilon: cfg.epsilon,
        delta: cfg.delta,
        c: cfg.c,
        seed: cfg.rng_seed,
        updates,
        queries: queries.len() as u64,
        total_steps: c.total_steps,
        steps_per_update: if updates == 0 { 0.0 } else { c.total_steps as f64 / updates as f64 },
        rebuilds: c.rebuilds,
        phases: c.phases,
        iterations: c.iterations,
        restarts: c.restarts,
        wall_ms: options.timing.then(|| elapsed_ms(start)),
    };
    Ok(RunReport { queries, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::parse_stream;

    fn opts(mode: &str, k: usize) -> RunOptions {
        RunOptions {
            mode: mode.into(),
            engine: EngineConfig { k, ..EngineConfig::default() },
            mc_trials: 2000,
            timing: false,
        }
    }

    #[test]
    fn registry_lists_modes() {
        let names: Vec<_> = registered_modes().iter().map(|(n, _)| *n).collect();
        assert_eq!(names, ["engine", "baseline"]);
        let cfg = EngineConfig::default();
        assert!(matches!(maintainer("nope", &cfg), Err(EngineError::UnknownMode(_))));
        for (name, _) in registered_modes() {
            assert_eq!(maintainer(name, &cfg).unwrap().name(), *name);
        }
    }

    #[test]
    fn single_edge_example() {
        let events = parse_stream("node\nnode\nedge 0 1 1.0\nquery\n").unwrap();
        for mode in ["engine", "baseline"] {
            let r = run(&opts(mode, 1), &events).unwrap();
            assert_eq!(r.queries.len(), 1);
            let q = &r.queries[0];
            assert_eq!(q.seeds, vec![NodeId(0)], "{mode}");
            assert_eq!(q.step, 3);
            assert!(q.spread_estimate >= 2.0 - 0.1, "{mode}: {q:?}");
            assert_eq!(q.mc_spread, Some(2.0));
            assert_eq!(r.summary.updates, 3);
        }
    }

    #[test]
    fn empty_stream() {
        let r = run(&opts("engine", 3), &[]).unwrap();
        assert_eq!(r.summary.updates, 0);
        assert_eq!(r.summary.steps_per_update, 0.0);
        let text = r.to_json_lines();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("{\"type\":\"summary\""));
    }

    #[test]
    fn deletion_rules() {
        let events = parse_stream("node\nnode\nedge 0 1 0.5\ndel 0 1\nquery\n").unwrap();
        let err = run(&opts("engine", 1), &events).unwrap_err();
        assert_eq!(err.event, 4);
        assert_eq!(err.source, EngineError::DeletionUnsupported);
        let r = run(&opts("baseline", 1), &events).unwrap();
        assert_eq!(r.summary.rebuilds, 1);
        assert_eq!(r.queries[0].mc_spread, Some(1.0));
    }

    #[test]
    fn report_is_deterministic_and_exact() {
        let mut text = String::from("node\n".repeat(30));
        let mut rng = RandomSource::new(1).rng();
        use rand::Rng as _;
        for i in 0..150 {
            let (u, v) = (rng.gen_range(0..30), rng.gen_range(0..30));
            if u != v {
                text.push_str(&format!("edge {u} {v} 0.05\n"));
            }
            if i % 50 == 49 {
                text.push_str("query\n");
            }
        }
        // Duplicates would fail; keep the first occurrence only.
        let mut seen = std::collections::HashSet::new();
        let text: String = text
            .lines()
            .filter(|l| !l.starts_with("edge") || seen.insert(l.to_string()))
            .map(|l| format!("{l}\n"))
            .collect();
        let events = parse_stream(&text).unwrap();
        let mut o = opts("engine", 3);
        o.engine.model = Model::Lt;
        let a = run(&o, &events).unwrap();
        let b = run(&o, &events).unwrap();
        assert_eq!(a.to_json_lines(), b.to_json_lines());
        let s = &a.summary;
        assert_eq!(s.steps_per_update, s.total_steps as f64 / s.updates as f64);
        assert_eq!(a.queries.len(), 3);
    }
}
