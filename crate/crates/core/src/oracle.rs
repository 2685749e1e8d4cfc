//! Ground-truth references used by tests and by the baseline runner.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng as _;
use serde::Serialize;

use crate::coverage::CoverageGraph;
use crate::diffusion::{self, Scratch};
use crate::error::OracleError;
use crate::graph::{InfluenceGraph, NodeId};
use crate::random::RandomSource;
use crate::rr::{sample_members, sample_steps};

/// Largest number of candidate subsets [`bruteforce_maxk`] will enumerate.
pub const BRUTEFORCE_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpreadEstimate {
    pub mean: f64,
    pub trials: u64,
    /// Sample standard deviation over `sqrt(trials)`.
    pub std_error: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64).sqrt() / (self.n as f64).sqrt()
    }
}

/// Monte Carlo estimate of the expected spread of `seeds`.
pub fn mc_spread(
    graph: &InfluenceGraph,
    seeds: &[NodeId],
    trials: u64,
    source: RandomSource,
) -> Result<SpreadEstimate, OracleError> {
    if trials == 0 {
        return Err(OracleError::NoTrials);
    }
    if let Some(&bad) = seeds.iter().find(|&&s| !graph.contains_node(s)) {
        return Err(OracleError::UnknownNode(bad));
    }
    if seeds.is_empty() {
        return Ok(SpreadEstimate { mean: 0.0, trials, std_error: 0.0 });
    }
    let model = diffusion::strategy(graph.model());
    let mut rng = source.rng();
    let mut scratch = Scratch::new();
    let mut m = Moments::default();
    for _ in 0..trials {
        m.push(model.simulate(graph, seeds, &mut rng, &mut scratch) as f64);
    }
    Ok(SpreadEstimate {
        mean: m.mean,
        trials,
        std_error: m.std_error(),
    })
}

/// Greedy on marginal coverage with lazy re-evaluation. Ties go to the
/// smaller node id. Returns `min(k, n)` seeds in pick order and their
/// coverage.
pub fn greedy_max_coverage(sets: &[Vec<NodeId>], n: usize, k: usize) -> (Vec<NodeId>, usize) {
    let mut member_of: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (i, set) in sets.iter().enumerate() {
        for &v in set {
            member_of[v.index()].push(i as u32);
        }
    }
    let mut covered = vec![false; sets.len()];
    let mut heap: BinaryHeap<(usize, Reverse<u32>)> = member_of
        .iter()
        .enumerate()
        .map(|(v, s)| (s.len(), Reverse(v as u32)))
        .collect();
    let mut seeds = Vec::with_capacity(k.min(n));
    let mut value = 0;
    while seeds.len() < k {
        let Some((stale, Reverse(v))) = heap.pop() else { break };
        let gain = member_of[v as usize].iter().filter(|&&i| !covered[i as usize]).count();
        if gain < stale {
            heap.push((gain, Reverse(v)));
            continue;
        }
        // Re-evaluated gain equals the cached bound, so it is the maximum.
        for &i in &member_of[v as usize] {
            covered[i as usize] = true;
        }
        value += gain;
        seeds.push(NodeId(v));
    }
    (seeds, value)
}

/// Uniform-root RR sets with the steps they cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RRSample {
    pub sets: Vec<Vec<NodeId>>,
    pub steps: u64,
}

/// Samples `rr_count` RR sets with uniform roots.
pub fn sample_uniform_rr_sets(
    graph: &InfluenceGraph,
    rr_count: u64,
    source: RandomSource,
) -> Result<RRSample, OracleError> {
    let n = graph.node_count();
    if n == 0 {
        return Err(OracleError::EmptyGraph);
    }
    let mut rng = source.rng();
    let mut scratch = Scratch::new();
    let mut out = RRSample {
        sets: Vec::with_capacity(rr_count as usize),
        steps: 0,
    };
    for _ in 0..rr_count {
        let root = NodeId::from(rng.gen_range(0..n));
        let (members, steps) = sample_members(graph, root, &mut rng, &mut scratch);
        out.sets.push(members.to_vec());
        out.steps += steps;
    }
    Ok(out)
}

/// Static RIS baseline: greedy max coverage over `rr_count` uniform RR sets.
pub fn greedy_im(
    graph: &InfluenceGraph,
    k: usize,
    rr_count: u64,
    source: RandomSource,
) -> Result<Vec<NodeId>, OracleError> {
    let sample = sample_uniform_rr_sets(graph, rr_count.max(1), source)?;
    Ok(greedy_max_coverage(&sample.sets, graph.node_count(), k).0)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Exact MAX-k coverage by enumeration. Subsets are visited in
/// lexicographic order of sorted left ids and the first maximum wins.
pub fn bruteforce_maxk(
    graph: &CoverageGraph,
    k: usize,
) -> Result<(Vec<NodeId>, usize), OracleError> {
    let mut lefts = graph.lefts().to_vec();
    lefts.sort_unstable();
    let size = k.min(lefts.len());
    let count = binomial(lefts.len(), size);
    if count > BRUTEFORCE_LIMIT {
        return Err(OracleError::TooLarge(count));
    }
    let rights = graph.rights();
    let words = rights.len().div_ceil(64);
    let index_of = |r| rights.iter().position(|&x| x == r).unwrap();
    let masks: Vec<Vec<u64>> = lefts
        .iter()
        .map(|&u| {
            let mut m = vec![0u64; words];
            for r in graph.neighbors(u) {
                let i = index_of(r);
                m[i / 64] |= 1 << (i % 64);
            }
            m
        })
        .collect();

    let mut best: Option<(Vec<usize>, usize)> = None;
    let mut pick: Vec<usize> = (0..size).collect();
    let mut acc = vec![0u64; words];
    loop {
        acc.iter_mut().for_each(|w| *w = 0);
        for &i in &pick {
            for (a, m) in acc.iter_mut().zip(&masks[i]) {
                *a |= m;
            }
        }
        let value = acc.iter().map(|w| w.count_ones() as usize).sum();
        if best.as_ref().map_or(true, |(_, b)| value > *b) {
            best = Some((pick.clone(), value));
        }
        // Next combination in lexicographic order.
        let Some(pos) = (0..size).rev().find(|&j| pick[j] < lefts.len() - size + j) else {
            break;
        };
        pick[pos] += 1;
        for j in pos + 1..size {
            pick[j] = pick[j - 1] + 1;
        }
    }
    let (pick, value) = best.unwrap_or_default();
    Ok((pick.into_iter().map(|i| lefts[i]).collect(), value))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AvgSteps {
    /// Mean charged steps per uniform-root RR sample.
    pub raw: f64,
    pub std_error: f64,
    /// `raw / m`, the expected fraction of edges examined; `None` when `m = 0`.
    pub per_edge: Option<f64>,
}

/// Monte Carlo estimate of the expected cost of one uniform-root RR sample.
pub fn avg_steps(
    graph: &InfluenceGraph,
    trials: u64,
    source: RandomSource,
) -> Result<AvgSteps, OracleError> {
    let n = graph.node_count();
    if n == 0 {
        return Err(OracleError::EmptyGraph);
    }
    if trials == 0 {
        return Err(OracleError::NoTrials);
    }
    let mut rng = source.rng();
    let mut scratch = Scratch::new();
    let mut m = Moments::default();
    for _ in 0..trials {
        let root = NodeId::from(rng.gen_range(0..n));
        m.push(sample_steps(graph, root, &mut rng, &mut scratch) as f64);
    }
    let edges = graph.edge_count();
    Ok(AvgSteps {
        raw: m.mean,
        std_error: m.std_error(),
        per_edge: (edges > 0).then(|| m.mean / edges as f64),
    })
}
