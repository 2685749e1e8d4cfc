//! Fully dynamic hard instances built from two set collections.
//!
//! Given collections `A = (A_i)` and `B = (B_tau)` of subsets of `[m]` and a
//! gap parameter `t`, the graph has
//!
//! * `V1`: one node per `A_i`, with an edge to `v2_j` for every `j in A_i`;
//! * `V2`: one node per ground element;
//! * `V3`: `m * t` children `v3_{j,l}` per element `j`;
//! * `V4` (LT only): `n` children per `V3` node.
//!
//! Epoch `tau` detaches every `V2 -> V3` edge and reattaches the children
//! of `j in B_tau`, then queries. Some `B_tau ⊆ A_i` makes the best spread
//! exceed `2 m |B_tau|`; if every `|A_i ∩ B_tau| < |B_tau| / t` it stays
//! below.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::HardnessError;
use crate::graph::{EdgeParam, InfluenceGraph, Model, NodeId};
use crate::random::RandomSource;
use crate::stream::UpdateEvent;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardInstance {
    pub model: Model,
    /// Universe size.
    pub m: usize,
    /// Gap parameter.
    pub t: usize,
    pub a: Vec<BTreeSet<usize>>,
    pub b: Vec<BTreeSet<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
}

impl HardInstance {
    /// Validates the instance. If some `|B_tau| < t`, every ground element
    /// is duplicated `t` times (element `j` becomes `j*t .. j*t + t`).
    pub fn new(
        model: Model,
        m: usize,
        t: usize,
        a: Vec<BTreeSet<usize>>,
        b: Vec<BTreeSet<usize>>,
    ) -> Result<Self, HardnessError> {
        let bad = |s: String| Err(HardnessError::InvalidInstance(s));
        if m == 0 || t == 0 {
            return bad("m and t must be positive".into());
        }
        if a.len() != b.len() {
            return bad(format!("|A| = {} differs from |B| = {}", a.len(), b.len()));
        }
        if let Some(j) = a.iter().chain(&b).flatten().find(|&&j| j >= m) {
            return bad(format!("element {j} outside [0, {m})"));
        }
        if b.iter().any(BTreeSet::is_empty) {
            return bad("every B_tau must be non-empty".into());
        }
        let inst = HardInstance { model, m, t, a, b };
        if inst.b.iter().all(|s| s.len() >= t) {
            return Ok(inst);
        }
        let dup = |s: &BTreeSet<usize>| -> BTreeSet<usize> {
            s.iter().flat_map(|&j| j * t..(j + 1) * t).collect()
        };
        Ok(HardInstance {
            model,
            m: m * t,
            t,
            a: inst.a.iter().map(dup).collect(),
            b: inst.b.iter().map(dup).collect(),
        })
    }

    /// Number of sets per collection (and of epochs).
    pub fn n(&self) -> usize {
        self.a.len()
    }

    fn mt(&self) -> usize {
        self.m * self.t
    }

    pub fn v1(&self, i: usize) -> NodeId {
        NodeId::from(i)
    }

    pub fn v2(&self, j: usize) -> NodeId {
        NodeId::from(self.n() + j)
    }

    pub fn v3(&self, j: usize, l: usize) -> NodeId {
        NodeId::from(self.n() + self.m + j * self.mt() + l)
    }

    pub fn v4(&self, j: usize, l: usize, b: usize) -> NodeId {
        let base = self.n() + self.m + self.m * self.mt();
        NodeId::from(base + (j * self.mt() + l) * self.n() + b)
    }

    pub fn node_count(&self) -> usize {
        let v3 = self.m * self.mt();
        let v4 = if self.model == Model::Lt { self.n() * v3 } else { 0 };
        self.n() + self.m + v3 + v4
    }

    fn v1_param(&self) -> EdgeParam {
        match self.model {
            Model::Ic => EdgeParam::new(1.0),
            Model::Lt => EdgeParam::new(1.0 / self.n() as f64),
        }
        .expect("n >= 1 whenever V1 edges exist")
    }

    fn attach(&self, j: usize, out: &mut Vec<UpdateEvent>) {
        let one = EdgeParam::new(1.0).expect("1 is valid");
        for l in 0..self.mt() {
            out.push(UpdateEvent::Edge(self.v2(j), self.v3(j, l), one));
        }
    }

    fn detach(&self, j: usize, out: &mut Vec<UpdateEvent>) {
        for l in 0..self.mt() {
            out.push(UpdateEvent::Del(self.v2(j), self.v3(j, l)));
        }
    }

    /// Events that load the initial graph (every `V2 -> V3` edge present).
    pub fn load_events(&self) -> Vec<UpdateEvent> {
        let mut out = vec![UpdateEvent::Node; self.node_count()];
        for (i, set) in self.a.iter().enumerate() {
            for &j in set {
                out.push(UpdateEvent::Edge(self.v1(i), self.v2(j), self.v1_param()));
            }
        }
        for j in 0..self.m {
            self.attach(j, &mut out);
        }
        if self.model == Model::Lt {
            let one = EdgeParam::new(1.0).expect("1 is valid");
            for j in 0..self.m {
                for l in 0..self.mt() {
                    for b in 0..self.n() {
                        out.push(UpdateEvent::Edge(self.v3(j, l), self.v4(j, l, b), one));
                    }
                }
            }
        }
        out
    }

    /// The full stream: load, then one epoch per `B_tau`, each ending in a query.
    pub fn emit_stream(&self) -> Vec<UpdateEvent> {
        let mut out = self.load_events();
        let mut attached: BTreeSet<usize> = (0..self.m).collect();
        for set in &self.b {
            for &j in &attached {
                self.detach(j, &mut out);
            }
            for &j in set {
                self.attach(j, &mut out);
            }
            attached = set.clone();
            out.push(UpdateEvent::Query);
        }
        out
    }

    /// The graph as it stands at epoch `tau`'s query.
    pub fn epoch_graph(&self, tau: usize) -> Result<InfluenceGraph, HardnessError> {
        if tau >= self.n() {
            return Err(HardnessError::BadEpoch(tau));
        }
        let mut g = InfluenceGraph::new(self.model);
        let mut events = self.load_events();
        let keep: BTreeSet<usize> = self.b[tau].clone();
        for j in (0..self.m).filter(|j| !keep.contains(j)) {
            self.detach(j, &mut events);
        }
        for e in events {
            match e {
                UpdateEvent::Node => {
                    g.add_node();
                }
                UpdateEvent::Edge(u, v, p) => g.add_edge(u, v, p).expect("generated edge"),
                UpdateEvent::Del(u, v) => {
                    g.remove_edge(u, v).expect("generated deletion");
                }
                UpdateEvent::Query => {}
            }
        }
        Ok(g)
    }

    /// Exact expected spread of `{v1_i}` in epoch `tau`.
    pub fn exact_spread(&self, tau: usize, i: usize) -> Result<f64, HardnessError> {
        if tau >= self.n() {
            return Err(HardnessError::BadEpoch(tau));
        }
        if i >= self.n() {
            return Err(HardnessError::BadSeed(i));
        }
        let a = &self.a[i];
        let hit = a.intersection(&self.b[tau]).count() as f64;
        let mt = self.mt() as f64;
        let n = self.n() as f64;
        Ok(match self.model {
            Model::Ic => 1.0 + a.len() as f64 + hit * mt,
            Model::Lt => 1.0 + (a.len() as f64 + hit * (mt + mt * n)) / n,
        })
    }

    /// Best single-`V1`-seed spread in every epoch.
    pub fn best_spread_per_epoch(&self) -> Vec<f64> {
        (0..self.n())
            .map(|tau| {
                (0..self.n())
                    .map(|i| self.exact_spread(tau, i).expect("indices in range"))
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    /// Spread threshold `2 m |B_tau|` of epoch `tau`.
    pub fn threshold(&self, tau: usize) -> f64 {
        2.0 * self.m as f64 * self.b[tau].len() as f64
    }

    /// Whether some `B_tau ⊆ A_i`.
    pub fn has_containment(&self) -> bool {
        self.b.iter().any(|bt| self.a.iter().any(|ai| bt.is_subset(ai)))
    }

    /// Whether every `|A_i ∩ B_tau| < |B_tau| / t`.
    pub fn is_separated(&self) -> bool {
        self.b.iter().all(|bt| {
            self.a
                .iter()
                .all(|ai| (ai.intersection(bt).count() * self.t) < bt.len())
        })
    }
}

/// YES iff some epoch's best spread exceeds `2 m |B_tau|`.
pub fn decide(inst: &HardInstance, spread_per_epoch: &[f64]) -> Answer {
    assert_eq!(spread_per_epoch.len(), inst.n(), "one value per epoch");
    let yes = spread_per_epoch
        .iter()
        .enumerate()
        .any(|(tau, &s)| s > inst.threshold(tau));
    if yes {
        Answer::Yes
    } else {
        Answer::No
    }
}

fn random_subset(m: usize, size: usize, rng: &mut impl rand::Rng) -> BTreeSet<usize> {
    let mut all: Vec<usize> = (0..m).collect();
    all.shuffle(rng);
    all.into_iter().take(size).collect()
}

/// A random instance with a planted pair `B_tau ⊆ A_i`. Needs `t <= m`.
pub fn planted_yes(
    model: Model,
    n: usize,
    m: usize,
    t: usize,
    source: RandomSource,
) -> Result<HardInstance, HardnessError> {
    if n == 0 || t > m {
        return Err(HardnessError::InvalidInstance("need n >= 1 and t <= m".into()));
    }
    let mut rng = source.rng();
    let b: Vec<_> = (0..n)
        .map(|_| random_subset(m, rng.gen_range(t..=m), &mut rng))
        .collect();
    let mut a: Vec<_> = (0..n)
        .map(|_| random_subset(m, rng.gen_range(0..=m), &mut rng))
        .collect();
    let (i, tau) = (rng.gen_range(0..n), rng.gen_range(0..n));
    a[i].extend(b[tau].iter().copied());
    HardInstance::new(model, m, t, a, b)
}

/// A random instance with every `|A_i ∩ B_tau| < |B_tau| / t`. Needs `t <= m`.
pub fn planted_no(
    model: Model,
    n: usize,
    m: usize,
    t: usize,
    source: RandomSource,
) -> Result<HardInstance, HardnessError> {
    if n == 0 || t > m {
        return Err(HardnessError::InvalidInstance("need n >= 1 and t <= m".into()));
    }
    let mut rng = source.rng();
    let b: Vec<_> = (0..n)
        .map(|_| random_subset(m, rng.gen_range(t..=m), &mut rng))
        .collect();
    let a = (0..n)
        .map(|_| {
            // Rejection sampling; the empty set always qualifies.
            (0..100)
                .map(|_| random_subset(m, rng.gen_range(0..=m), &mut rng))
                .find(|ai| b.iter().all(|bt| ai.intersection(bt).count() * t < bt.len()))
                .unwrap_or_default()
        })
        .collect();
    HardInstance::new(model, m, t, a, b)
}
