use adfg_core::{
    discover, discover_dfg, fitness, is_acyclic, merge_pair, parse_log, perfectly_fits, synth, write_log, Dfg,
    EventLog, LogConfig, MergeMode, PipelineConfig, END, START,
};
use proptest::prelude::*;

fn pool(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// Two acyclic single-label models over a shared pool of activities.
fn model_pair(seed: u64) -> (EventLog, EventLog, Dfg, Dfg) {
    let mut rng = synth::rng(seed);
    let names = pool(8);
    let l1 = synth::ordered_log(&mut rng, &names[..6], 4);
    let l2 = synth::ordered_log(&mut rng, &names[2..], 4);
    let (m1, m2) = (discover_dfg(&l1).unwrap(), discover_dfg(&l2).unwrap());
    (l1, l2, m1, m2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn merged_models_are_acyclic_and_fit(seed in any::<u64>(), accurate in any::<bool>()) {
        let (l1, l2, m1, m2) = model_pair(seed);
        let mode = if accurate { MergeMode::Accurate } else { MergeMode::Naive };
        let r = merge_pair(&m1, &m2, mode, 1_000_000).unwrap();
        prop_assert!(is_acyclic(&r.model));
        let renamed = adfg_core::conformance::rename_sources(&[l1, l2], &r.rename_map, &r.model).unwrap();
        prop_assert!(perfectly_fits(&r.model, &renamed));
        prop_assert_eq!(r.model.node_count(), m1.node_count() + m2.node_count() - r.fused_total());
    }

    #[test]
    fn accurate_fuses_at_least_as_much_as_naive(seed in any::<u64>()) {
        let (_, _, m1, m2) = model_pair(seed);
        let naive = merge_pair(&m1, &m2, MergeMode::Naive, 1_000_000).unwrap();
        let accurate = merge_pair(&m1, &m2, MergeMode::Accurate, 1_000_000).unwrap();
        prop_assert!(accurate.fused_total() >= naive.fused_total());
    }

    #[test]
    fn self_merge_only_splits_vertices_without_common_arcs(seed in any::<u64>()) {
        let (_, _, m1, _) = model_pair(seed);
        let r = merge_pair(&m1, &m1, MergeMode::Accurate, 1_000_000).unwrap();
        let lonely = m1
            .labelled()
            .filter(|&v| m1.successors(v).iter().chain(m1.predecessors(v)).all(|&w| w == START || w == END))
            .count();
        prop_assert_eq!(r.model.node_count(), m1.node_count() + lonely);
        if lonely == 0 {
            prop_assert!(r.model.same_shape(&m1));
        }
    }

    #[test]
    fn pipeline_fits_every_acyclic_log(seed in any::<u64>()) {
        let log = synth::random_acyclic_log(&mut synth::rng(seed), 20, 10);
        let d = discover(&log, None, &PipelineConfig::default()).unwrap();
        prop_assert!(is_acyclic(&d.merged.model));
        prop_assert_eq!(fitness(&d.merged.model, &d.renamed_log), 1.0);
        prop_assert_eq!(d.renamed_log.len(), log.len());
    }

    #[test]
    fn standard_model_round_trips_through_json(seed in any::<u64>()) {
        let log = synth::random_acyclic_log(&mut synth::rng(seed), 15, 10);
        let m = discover_dfg(&log).unwrap();
        prop_assert_eq!(Dfg::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn log_round_trips_through_csv(seed in any::<u64>()) {
        let log = synth::random_acyclic_log(&mut synth::rng(seed), 15, 10);
        let mut buf = Vec::new();
        write_log(&log, &mut buf, &LogConfig::default()).unwrap();
        let back = parse_log(buf.as_slice(), &LogConfig::default()).unwrap();
        prop_assert!(back.same_multiset(&log));
    }
}
