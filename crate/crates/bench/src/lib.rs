//! Instances shared by the benches.

use adfg_core::{discover_dfg, synth, Dfg, EventLog};

/// The two department-style models over `n` activities built from `seed`.
pub fn department_pair(seed: u64, n: usize) -> (Dfg, Dfg) {
    let (l1, l2) = synth::department_logs(&mut synth::rng(seed), n);
    (discover_dfg(&l1).expect("nonempty"), discover_dfg(&l2).expect("nonempty"))
}

/// A three-group log with one reversed segment per extra group.
pub fn grouped_log(seed: u64) -> EventLog {
    synth::conflict_log(&mut synth::rng(seed), 3).0
}
