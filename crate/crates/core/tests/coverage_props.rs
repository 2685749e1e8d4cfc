use dim_core::coverage::{CoverageSolver, RootId};
use dim_core::oracle::bruteforce_maxk;
use dim_core::NodeId;
use proptest::prelude::*;

#[derive(Debug, Clone)]
enum Op {
    Left,
    Right,
    Edge(usize, usize),
}

fn ops() -> impl Strategy<Value = Vec<Op>> {
    proptest::collection::vec(
        prop_oneof![
            1 => Just(Op::Left),
            2 => Just(Op::Right),
            6 => (0usize..12, 0usize..24).prop_map(|(u, r)| Op::Edge(u, r)),
        ],
        1..120,
    )
}

/// Applies `op` if it is valid for the current graph; returns whether it was applied.
fn apply(s: &mut CoverageSolver, op: &Op) -> bool {
    let g = s.graph();
    let (nl, nr) = (g.left_count(), g.right_count());
    match *op {
        Op::Left if nl < 12 => s.insert_left(NodeId(nl as u32)).is_ok(),
        Op::Right if nr < 24 => s.insert_right(RootId(nr as u32)).is_ok(),
        Op::Edge(u, r) if u < nl && r < nr => s.insert_edge(NodeId(u as u32), RootId(r as u32)).is_ok(),
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn approximation_and_invariants_hold_at_every_step(
        ops in ops(),
        k in 1usize..=3,
        eps_idx in 0usize..3,
        hinted in any::<bool>(),
    ) {
        let eps = [0.05, 0.1, 0.2][eps_idx];
        let mut s = CoverageSolver::new(k, eps, if hinted { 24 } else { 0 }).unwrap();
        let bound = 1.0 - (-1.0f64).exp() - eps;
        let mut prev: Vec<(Vec<NodeId>, usize)> = Vec::new();
        for op in &ops {
            if !apply(&mut s, op) {
                continue;
            }
            s.check_invariants().map_err(TestCaseError::fail)?;
            let best = s.best_solution().1 as f64;
            let opt = bruteforce_maxk(s.graph(), k).unwrap().1 as f64;
            prop_assert!(best + 1e-9 >= bound * opt, "best {best} < bound x OPT {opt}");

            for (i, t) in s.threads().iter().enumerate() {
                prop_assert!(t.ops() <= 5 * t.events());
                // Seeds, and the value, only grow.
                if let Some((seeds, value)) = prev.get(i) {
                    prop_assert!(t.seeds().starts_with(seeds));
                    prop_assert!(t.value() >= *value);
                }
                if t.seeds().len() == k {
                    for a in t.history() {
                        prop_assert!((k * a.gain) as f64 >= t.guess() - a.value_before as f64);
                    }
                    let floor = 1.0 - (1.0 - 1.0 / k as f64).powi(k as i32);
                    prop_assert!(t.value() as f64 >= floor * t.guess() - 1e-9);
                }
            }
            prev = s.threads().iter().map(|t| (t.seeds().to_vec(), t.value())).collect();
        }
    }
}
