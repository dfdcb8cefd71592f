//! Replay fitness, escaping-edges precision and log relabelling.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::dfg::{model_stats, step, Dfg, ModelStats, VertexId, END, START};
use crate::event_log::{Activity, EventLog, Trace};
use crate::merge::RenameMap;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConformanceError {
    #[error("case `{case}`: label `{label}` is neither renamed nor a label of the model")]
    UnknownLabel { case: String, label: String },
    #[error("rename map has no entry for source {0}")]
    MissingSource(usize),
}

/// Replaces each event by its label in the merged model. Events already
/// named after a model vertex pass through unchanged.
pub fn rename_log(log: &EventLog, map: &BTreeMap<String, String>, model: &Dfg) -> Result<EventLog, ConformanceError> {
    let traces = log
        .traces()
        .iter()
        .map(|t| {
            let events = t
                .events()
                .iter()
                .map(|e| match map.get(e.as_str()) {
                    Some(to) => Ok(Activity::new(to).expect("display labels are valid names")),
                    None if model.find_display(e.as_str()).is_some() => Ok(e.clone()),
                    None => Err(ConformanceError::UnknownLabel { case: t.case_id().to_string(), label: e.to_string() }),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(t.relabelled(events))
        })
        .collect::<Result<Vec<Trace>, _>>()?;
    Ok(EventLog::new(traces))
}

/// Renames sublog `i` with source `i` of `map` and sums the results.
pub fn rename_sources(sublogs: &[EventLog], map: &RenameMap, model: &Dfg) -> Result<EventLog, ConformanceError> {
    let renamed = sublogs
        .iter()
        .enumerate()
        .map(|(i, l)| rename_log(l, map.source(i).ok_or(ConformanceError::MissingSource(i))?, model))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EventLog::sum(&renamed))
}

/// Event-level replay fitness. Each trace is replayed from start, tracking
/// every vertex consistent with the events consumed so far; an event that
/// cannot be consumed is skipped. Fitness is (consumed events + traces that
/// can reach end) / (events + traces).
pub fn fitness(model: &Dfg, log: &EventLog) -> f64 {
    let (mut num, mut den) = (0usize, 0usize);
    for t in log.traces() {
        let mut states = BTreeSet::from([START]);
        for e in t.events() {
            let next = step(model, &states, e.as_str());
            if !next.is_empty() {
                states = next;
                num += 1;
            }
        }
        if states.iter().any(|&v| model.has_arc(v, END)) {
            num += 1;
        }
        den += t.len() + 1;
    }
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Default)]
struct TrieNode {
    children: BTreeMap<Activity, usize>,
    visits: usize,
    ends: usize,
}

/// Escaping-edges precision. Every prefix in the log is replayed on the
/// model; the arcs leaving the reached vertices are enabled, and those
/// matching no continuation observed in the log after that prefix escape.
/// Both counts are weighted by how many traces share the prefix.
pub fn precision(model: &Dfg, log: &EventLog) -> f64 {
    let mut trie = vec![TrieNode::default()];
    for t in log.traces() {
        let mut at = 0;
        trie[0].visits += 1;
        for e in t.events() {
            at = match trie[at].children.get(e) {
                Some(&c) => c,
                None => {
                    trie.push(TrieNode::default());
                    let c = trie.len() - 1;
                    trie[at].children.insert(e.clone(), c);
                    c
                }
            };
            trie[at].visits += 1;
        }
        trie[at].ends += 1;
    }
    let (mut escaping, mut enabled) = (0usize, 0usize);
    let mut stack: Vec<(usize, BTreeSet<VertexId>)> = vec![(0, BTreeSet::from([START]))];
    while let Some((node, states)) = stack.pop() {
        let n = &trie[node];
        let out: BTreeSet<VertexId> = states.iter().flat_map(|&v| model.successors(v).iter().copied()).collect();
        let mut covered: BTreeSet<VertexId> = BTreeSet::new();
        for (e, &child) in &n.children {
            covered.extend(out.iter().copied().filter(|&w| model.accepts(w, e.as_str())));
            let next = step(model, &states, e.as_str());
            if !next.is_empty() {
                stack.push((child, next));
            }
        }
        if n.ends > 0 && out.contains(&END) {
            covered.insert(END);
        }
        enabled += n.visits * out.len();
        escaping += n.visits * (out.len() - covered.len());
    }
    if enabled == 0 {
        1.0
    } else {
        1.0 - escaping as f64 / enabled as f64
    }
}

/// Mean and population standard deviation of per-loop wall time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timing {
    pub mean_ms: f64,
    pub std_ms: f64,
    pub runs: usize,
    pub loops: usize,
}

/// Runs `f` `loops` times per run for `runs` runs and reports the time per
/// loop.
pub fn measure<T>(runs: usize, loops: usize, mut f: impl FnMut() -> T) -> Timing {
    let (runs, loops) = (runs.max(1), loops.max(1));
    let samples: Vec<f64> = (0..runs)
        .map(|_| {
            let t0 = Instant::now();
            for _ in 0..loops {
                std::hint::black_box(f());
            }
            t0.elapsed().as_secs_f64() * 1000.0 / loops as f64
        })
        .collect();
    let mean = samples.iter().sum::<f64>() / runs as f64;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / runs as f64;
    Timing { mean_ms: mean, std_ms: var.sqrt(), runs, loops }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub fitness: f64,
    pub precision: f64,
    pub stats: ModelStats,
    pub timing: Option<Timing>,
}

impl Serialize for MetricsReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("fitness", &self.fitness)?;
        m.serialize_entry("precision", &self.precision)?;
        m.serialize_entry("nodes", &self.stats.node_count)?;
        m.serialize_entry("arcs", &self.stats.arc_count)?;
        m.serialize_entry("simple_cycles", &self.stats.simple_cycle_count)?;
        m.serialize_entry("duplicate_labels", &self.stats.duplicate_label_count)?;
        m.serialize_entry("time_ms_mean", &self.timing.map(|t| t.mean_ms))?;
        m.serialize_entry("time_ms_std", &self.timing.map(|t| t.std_ms))?;
        m.end()
    }
}

/// Fitness, precision and model statistics; the log is renamed first when
/// a map is given.
pub fn evaluate(
    model: &Dfg,
    log: &EventLog,
    rename: Option<&BTreeMap<String, String>>,
    cycle_cap: u64,
) -> Result<MetricsReport, ConformanceError> {
    let renamed;
    let log = match rename {
        Some(map) => {
            renamed = rename_log(log, map, model)?;
            &renamed
        }
        None => log,
    };
    Ok(MetricsReport {
        fitness: fitness(model, log),
        precision: precision(model, log),
        stats: model_stats(model, cycle_cap),
        timing: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfg::{discover_dfg, is_run, perfectly_fits, CycleCount};
    use crate::fixtures;
    use crate::merge::{merge_pair, MergeMode};
    use rand::{Rng, SeedableRng};

    fn log(seqs: &[&[&str]]) -> EventLog {
        EventLog::from_sequences(seqs).unwrap()
    }

    /// Every run of an acyclic model, by depth-first path enumeration.
    fn runs(model: &Dfg) -> BTreeSet<Vec<String>> {
        fn walk(m: &Dfg, v: VertexId, path: &mut Vec<String>, out: &mut BTreeSet<Vec<String>>) {
            for &w in m.successors(v) {
                if w == END {
                    out.insert(path.clone());
                } else {
                    path.push(m.display(w));
                    walk(m, w, path, out);
                    path.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(model, START, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn chain_is_perfect() {
        let l = log(&[&["A", "B", "C"]]);
        let m = discover_dfg(&l).unwrap();
        assert_eq!(fitness(&m, &l), 1.0);
        assert_eq!(precision(&m, &l), 1.0);
        assert!(fitness(&m, &log(&[&["B", "A"]])) < 1.0);
    }

    #[test]
    fn two_order_standard_precision_below_one() {
        let l = fixtures::two_order_log();
        let m = discover_dfg(&l).unwrap();
        assert_eq!(fitness(&m, &l), 1.0);
        let p = precision(&m, &l);
        assert!(p < 1.0 && p > 0.0, "{p}");
    }

    #[test]
    fn renaming_for_naive_worked_merge() {
        let (l1, _) = fixtures::worked_logs();
        let (m1, m2) = fixtures::worked_models();
        let r = merge_pair(&m1, &m2, MergeMode::Naive, 1000).unwrap();
        let t = log(&[&["A", "B", "C", "F", "G", "H", "J", "K"]]);
        let renamed = rename_log(&t, r.rename_map.source(0).unwrap(), &r.model).unwrap();
        let names: Vec<&str> = renamed.traces()[0].events().iter().map(Activity::as_str).collect();
        assert_eq!(names, ["A", "B", "C", "F.1", "G.1", "H.1", "J", "K"]);
        let renamed = rename_log(&l1, r.rename_map.source(0).unwrap(), &r.model).unwrap();
        assert_eq!(renamed.len(), l1.len());
        for (a, b) in renamed.traces().iter().zip(l1.traces()) {
            assert_eq!((a.case_id(), a.len()), (b.case_id(), b.len()));
        }
        let missing = log(&[&["Z"]]);
        assert!(matches!(
            rename_log(&missing, r.rename_map.source(0).unwrap(), &r.model),
            Err(ConformanceError::UnknownLabel { .. })
        ));
    }

    #[test]
    fn identity_rename_is_a_no_op() {
        let l = fixtures::two_order_log();
        let m = discover_dfg(&l).unwrap();
        let id = RenameMap::identity(0, &m);
        assert_eq!(rename_log(&l, id.source(0).unwrap(), &m).unwrap(), l);
        let empty = BTreeMap::new();
        assert_eq!(evaluate(&m, &l, Some(&empty), 100).unwrap(), evaluate(&m, &l, None, 100).unwrap());
    }

    #[test]
    fn report_json_layout() {
        let l = log(&[&["A", "B"]]);
        let m = discover_dfg(&l).unwrap();
        let r = evaluate(&m, &l, None, 10).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["fitness"], 1.0);
        assert_eq!(json["nodes"], 2);
        assert_eq!(json["simple_cycles"], 0);
        assert!(json["time_ms_mean"].is_null());
        let t = measure(1, 1, || 0);
        assert_eq!(t.std_ms, 0.0);
        assert_eq!(r.stats.simple_cycle_count, CycleCount::Exact(0));
    }

    fn random_model(rng: &mut impl Rng) -> (Dfg, EventLog) {
        let names = ["A", "B", "C", "D", "E"];
        let n = rng.gen_range(1..=4);
        let seqs: Vec<Vec<&str>> = (0..n)
            .map(|_| {
                let len = rng.gen_range(1..=4);
                let mut s: Vec<&str> = names.to_vec();
                for i in (1..s.len()).rev() {
                    s.swap(i, rng.gen_range(0..=i));
                }
                s.truncate(len);
                s
            })
            .collect();
        let refs: Vec<&[&str]> = seqs.iter().map(Vec::as_slice).collect();
        let l = EventLog::from_sequences(&refs).unwrap();
        (discover_dfg(&l).unwrap(), l)
    }

    #[test]
    fn fitness_one_iff_perfect_fit() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let (m, _) = random_model(&mut rng);
            let (_, probe) = random_model(&mut rng);
            assert_eq!(fitness(&m, &probe) == 1.0, perfectly_fits(&m, &probe));
            let p = precision(&m, &probe);
            assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn precision_one_when_log_is_the_language() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let mut checked = 0;
        for _ in 0..300 {
            let (m, _) = random_model(&mut rng);
            if m.vertex_count() > 8 || !crate::dfg::is_acyclic(&m) {
                continue;
            }
            let language = runs(&m);
            for r in &language {
                assert!(is_run(&m, r));
            }
            let seqs: Vec<&[String]> = language.iter().map(Vec::as_slice).collect();
            let full = EventLog::from_sequences(&seqs).unwrap();
            assert_eq!(precision(&m, &full), 1.0);
            checked += 1;
        }
        assert!(checked > 50);
    }
}
