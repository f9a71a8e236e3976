mod support;

use proptest::prelude::*;
use proptest::test_runner::Config;
use support::{run_engine, scenario, Scenario};
use sue_core::analytics::RunStore;
use sue_core::model::BeliefThresholds;

pub fn store_for(s: &Scenario) -> RunStore {
    let mut store = RunStore::new(BeliefThresholds::default());
    for e in &s.events {
        store.record_simple(e.clone());
    }
    for out in &run_engine(s).outputs {
        store.record_output(out);
    }
    store
}

fn query() -> impl Strategy<Value = (i64, i64, i64)> {
    (-2_000i64..12_000, 0i64..14_000, 1i64..5_000).prop_map(|(start, len, width)| (start, start + len, width))
}

proptest! {
    #![proptest_config(Config { cases: 100, failure_persistence: None, ..Config::default() })]

    #[test]
    fn bucket_sums_equal_summary_totals(s in scenario(), queries in prop::collection::vec(query(), 10)) {
        let store = store_for(&s);
        for (start, end, width) in queries {
            let summary = store.summary(start, end).unwrap();
            let buckets = store.timeline(start, end, width).unwrap();
            let sum: u64 = buckets.iter().map(|b| b.total()).sum();
            prop_assert_eq!(sum, summary.total);
            prop_assert_eq!(summary.by_level.values().sum::<u64>(), summary.total);
            prop_assert_eq!(summary.by_type.values().sum::<u64>(), summary.total);
            if let Some(last) = buckets.last() {
                prop_assert_eq!(last.start_ms + last.width_ms, end);
            }
        }
    }
}
