use dim_core::random::RandomSource;
use dim_core::{augment_rr, sample_rr, EdgeParam, InfluenceGraph, Model, NodeId};
use proptest::prelude::*;

fn edges() -> impl Strategy<Value = Vec<(u32, u32, u32)>> {
    proptest::collection::vec((0u32..8, 0u32..8, 1u32..=100), 0..20)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// Steps only grow, equal the sum of charged units, and the set stays
    /// consistent with the graph after every insertion.
    #[test]
    fn steps_accumulate_and_sets_stay_valid(
        raw in edges(),
        lt in any::<bool>(),
        root in 0u32..8,
        seed in any::<u64>(),
    ) {
        let model = if lt { Model::Lt } else { Model::Ic };
        let mut g = InfluenceGraph::new(model);
        for _ in 0..8 {
            g.add_node();
        }
        let mut set = sample_rr(&g, NodeId(root), RandomSource::new(seed)).unwrap();
        let mut total = set.steps();
        prop_assert_eq!(total, 1);
        for (u, v, p) in raw {
            // LT weights scaled down so a few parents fit under 1.
            let value = if lt { p as f64 / 400.0 } else { p as f64 / 100.0 };
            let param = EdgeParam::new(value).unwrap();
            if g.add_edge(NodeId(u), NodeId(v), param).is_err() {
                continue;
            }
            let before = set.len();
            let aug = augment_rr(&mut set, &g, (NodeId(u), NodeId(v), param)).unwrap();
            total += aug.steps;
            prop_assert_eq!(set.steps(), total);
            prop_assert_eq!(set.len(), before + aug.added.len());
            set.validate(&g).map_err(|e| TestCaseError::fail(e.to_string()))?;
        }
        prop_assert!(set.contains(NodeId(root)));
    }
}
