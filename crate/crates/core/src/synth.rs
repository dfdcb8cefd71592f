//! Seeded generators of synthetic logs for tests, benches and the CLI.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::event_log::{EventLog, Trace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i:02}")).collect()
}

fn trace(case: String, events: &[String]) -> Trace {
    Trace::from_names(case, events).expect("generated names are valid")
}

/// Keeps each event with probability `1 - drop`, never returning an empty
/// sequence.
fn thin(rng: &mut impl Rng, seq: &[String], drop: f64) -> Vec<String> {
    let kept: Vec<String> = seq.iter().filter(|_| !rng.gen_bool(drop)).cloned().collect();
    if kept.is_empty() {
        vec![seq[rng.gen_range(0..seq.len())].clone()]
    } else {
        kept
    }
}

/// A log of up to `max_traces` traces over up to `max_activities`
/// activities. Traces follow a shared base order with a few adjacent swaps
/// and random omissions, so conflicts are common but not universal.
pub fn random_acyclic_log(rng: &mut impl Rng, max_traces: usize, max_activities: usize) -> EventLog {
    let n = rng.gen_range(2..=max_activities.max(2));
    let mut base = names("a", n);
    base.shuffle(rng);
    let traces = (0..rng.gen_range(1..=max_traces.max(1)))
        .map(|i| {
            let mut seq = base.clone();
            for _ in 0..rng.gen_range(0..=2) {
                let j = rng.gen_range(0..n - 1);
                seq.swap(j, j + 1);
            }
            trace(format!("c{i}"), &thin(rng, &seq, 0.3))
        })
        .collect();
    EventLog::new(traces)
}

/// A log whose traces all respect one random order of `activities`, so its
/// DFG is acyclic.
pub fn ordered_log(rng: &mut impl Rng, activities: &[String], traces: usize) -> EventLog {
    let mut base = activities.to_vec();
    base.shuffle(rng);
    EventLog::new((0..traces.max(1)).map(|i| trace(format!("c{i}"), &thin(rng, &base, 0.35))).collect())
}

/// Groups that share an ordering of classes, except that every group after
/// the first reverses one short segment of it. Returns the log and the
/// case-to-group assignment.
pub fn conflict_log(rng: &mut impl Rng, groups: usize) -> (EventLog, HashMap<String, String>) {
    let n = rng.gen_range(8..=12);
    let base = names("e", n);
    let mut traces = Vec::new();
    let mut grouping = HashMap::new();
    for g in 0..groups.max(1) {
        let mut order = base.clone();
        if g > 0 {
            let len = rng.gen_range(2..=3);
            let at = rng.gen_range(0..=n - len);
            order[at..at + len].reverse();
        }
        for i in 0..rng.gen_range(4..=8) {
            let case = format!("g{g}-{i}");
            grouping.insert(case.clone(), format!("g{g}"));
            traces.push(trace(case, &thin(rng, &order, 0.15)));
        }
    }
    (EventLog::new(traces), grouping)
}

/// Two logs over `n` activities whose models disagree the way department
/// schedules do: some adjacent classes swap, and in some blocks a class
/// that the first model schedules after a seminar pair comes before it in
/// the second. Both models are acyclic.
pub fn department_logs(rng: &mut impl Rng, n: usize) -> (EventLog, EventLog) {
    let n = n.max(12);
    let blocks = (n / 12).max(1);
    let filler = n - 6 * blocks;
    // Split the filler into blocks + 1 nonempty segments.
    let mut cuts: Vec<usize> = (1..filler).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(blocks).collect();
    cuts.sort_unstable();
    let mut sizes = Vec::new();
    let mut prev = 0;
    for c in cuts.into_iter().chain([filler]) {
        sizes.push(c - prev);
        prev = c;
    }
    let all = names("d", n);
    let mut next = all.iter().cloned();
    let mut take = |k: usize| -> Vec<String> { next.by_ref().take(k).collect() };
    let (mut a1, mut b1, mut a2, mut b2) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (k, &size) in sizes.iter().enumerate() {
        let seg = take(size);
        let mut swapped = seg.clone();
        if seg.len() >= 2 && rng.gen_bool(0.5) {
            let j = rng.gen_range(0..seg.len() - 1);
            swapped.swap(j, j + 1);
        }
        a1.extend(seg.iter().cloned());
        b1.extend(seg.iter().cloned());
        a2.extend(swapped.iter().cloned());
        b2.extend(swapped);
        if k == blocks {
            break;
        }
        let g = take(6);
        let (s0, s1, x, u0, u1, u2) = (&g[0], &g[1], &g[2], &g[3], &g[4], &g[5]);
        a1.extend([s0, s1, x, u1, u2].map(String::clone));
        b1.extend([u0, u1, u2].map(String::clone));
        a2.extend([u0, s0, s1, u1, u2, x].map(String::clone));
        b2.extend([u0, u1, u2].map(String::clone));
    }
    let log = |a: &[String], b: &[String], tag: &str| {
        EventLog::new(vec![trace(format!("{tag}-a"), a), trace(format!("{tag}-b"), b)])
    };
    (log(&a1, &b1, "m1"), log(&a2, &b2, "m2"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfg::{discover_dfg, is_acyclic};

    #[test]
    fn generators_are_seeded() {
        assert_eq!(random_acyclic_log(&mut rng(1), 10, 8), random_acyclic_log(&mut rng(1), 10, 8));
        assert_eq!(conflict_log(&mut rng(2), 3).0, conflict_log(&mut rng(2), 3).0);
    }

    #[test]
    fn random_logs_are_acyclic() {
        let mut r = rng(3);
        for _ in 0..50 {
            let l = random_acyclic_log(&mut r, 30, 15);
            assert!(crate::event_log::is_acyclic_log(&l));
            assert!(l.len() <= 30 && l.activities().len() <= 15);
        }
    }

    #[test]
    fn department_models_are_acyclic() {
        let mut r = rng(4);
        for n in [36, 40, 120] {
            let (l1, l2) = department_logs(&mut r, n);
            for l in [&l1, &l2] {
                let m = discover_dfg(l).unwrap();
                assert!(is_acyclic(&m));
                assert_eq!(m.node_count(), n);
            }
        }
    }

    #[test]
    fn conflict_groups() {
        let (log, grouping) = conflict_log(&mut rng(5), 2);
        assert_eq!(grouping.len(), log.len());
        assert!(grouping.values().all(|g| g == "g0" || g == "g1"));
    }
}
