//! Regression guard on amortized cost: total charged steps per update must stay
//! below `C * k * eps^-2 * (ln n)^3` on random growing graphs.

use dim_core::random::RandomSource;
use dim_core::{EdgeParam, Engine, EngineConfig, Model, NodeId};
use rand::Rng;

/// Calibrated once on these streams (observed ratios 0.94-1.35 over 6 seeds per model), ~2x headroom.
const C: f64 = 3.0;

const NODES: usize = 1000;
const UPDATES: usize = 10_000;

/// Runs a stream of `UPDATES` insertions over `NODES` nodes and returns
/// steps per update divided by `k * eps^-2 * (ln n)^3`.
fn normalized_cost(model: Model, seed: u64) -> f64 {
    let config = EngineConfig {
        k: 2,
        epsilon: 0.3,
        model,
        rng_seed: seed,
        ..EngineConfig::default()
    };
    let mut e = Engine::new(config.clone()).unwrap();
    let mut rng = RandomSource::new(seed).split(1).rng();
    e.insert_node().unwrap();
    let mut updates = 1;
    while updates < UPDATES {
        let n = e.graph().node_count();
        // Interleave node arrivals evenly with edge arrivals.
        if n < NODES && rng.gen_range(0..UPDATES - updates) < NODES - n {
            e.insert_node().unwrap();
            updates += 1;
            continue;
        }
        let (u, v) = (NodeId(rng.gen_range(0..n as u32)), NodeId(rng.gen_range(0..n as u32)));
        if u == v || e.graph().has_edge(u, v) {
            continue;
        }
        let w = match model {
            Model::Ic => rng.gen_range(0.01..0.2),
            Model::Lt => (1.0 - e.graph().in_weight(v)) * 0.2,
        };
        if w <= 1e-9 {
            continue;
        }
        e.insert_edge(u, v, EdgeParam::new(w).unwrap()).unwrap();
        updates += 1;
    }
    let n = e.graph().node_count() as f64;
    let per_update = e.stats().total_steps() as f64 / updates as f64;
    per_update / (config.k as f64 * config.epsilon.powi(-2) * n.ln().powi(3))
}

#[test]
fn steps_per_update_are_polylogarithmic() {
    for model in [Model::Ic, Model::Lt] {
        for seed in 0..2 {
            let ratio = normalized_cost(model, seed);
            eprintln!("{model} seed {seed}: {ratio:.4}");
            assert!(ratio <= C, "{model} seed {seed}: normalized cost {ratio:.4} exceeds {C}");
        }
    }
}
