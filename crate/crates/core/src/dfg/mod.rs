//! Directly-follows graphs.
//!
//! Vertex `0` is the artificial start and vertex `1` the artificial end. Every
//! other vertex carries a [`VertexLabel`]: the event name it stands for plus
//! an ordinal that tells duplicated vertices of the same event apart. A
//! [`Dfg`] is always stored in canonical form (labelled vertices sorted by
//! display label) so that two structurally identical models compare equal
//! and serialize identically.

mod cycles;
mod io;

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::cmp::Reverse;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::event_log::{Activity, EventLog};

pub use cycles::{count_elementary_circuits, CycleCount};
pub use io::{DfgJson, NodeJson};

pub type VertexId = usize;
pub const START: VertexId = 0;
pub const END: VertexId = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("cannot discover a model from an empty log")]
    EmptyLog,
    #[error("label `{0}` is used by more than one vertex")]
    DuplicateVertex(String),
    #[error("arc ({0}, {1}) refers to an unknown vertex")]
    DanglingArc(usize, usize),
    #[error("the start vertex must not have incoming arcs")]
    ArcIntoStart,
    #[error("the end vertex must not have outgoing arcs")]
    ArcFromEnd,
    #[error("vertex `{0}` has no incoming arcs")]
    NoIncoming(String),
    #[error("vertex `{0}` has no outgoing arcs")]
    NoOutgoing(String),
    #[error("the start vertex has no outgoing arcs")]
    EmptyModel,
    #[error("display label `{display}` does not match label `{label}`")]
    BadDisplayLabel { label: String, display: String },
    #[error("invalid model json: {0}")]
    Json(String),
}

/// Event name of a vertex plus the index used to tell duplicates apart.
/// Ordinal `0` means the vertex is the only one carrying its event name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexLabel {
    pub base: Activity,
    pub ordinal: u32,
}

impl VertexLabel {
    pub fn plain(base: Activity) -> Self {
        VertexLabel { base, ordinal: 0 }
    }

    pub fn indexed(base: Activity, ordinal: u32) -> Self {
        VertexLabel { base, ordinal }
    }

    /// `base` for unique vertices, `base.ordinal` for duplicated ones.
    pub fn display(&self) -> String {
        if self.ordinal == 0 {
            self.base.to_string()
        } else {
            format!("{}.{}", self.base, self.ordinal)
        }
    }
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfg {
    labels: Vec<VertexLabel>,
    succ: Vec<BTreeSet<VertexId>>,
    pred: Vec<BTreeSet<VertexId>>,
    freq: BTreeMap<(VertexId, VertexId), u64>,
}

/// Accumulates vertices and arcs, then validates and canonicalizes them.
#[derive(Debug, Clone, Default)]
pub struct DfgBuilder {
    labels: Vec<VertexLabel>,
    arcs: BTreeMap<(usize, usize), u64>,
}

impl DfgBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the builder-local id of the new vertex (ids start at 2).
    pub fn add_vertex(&mut self, label: VertexLabel) -> usize {
        self.labels.push(label);
        self.labels.len() + 1
    }

    /// Adds an arc; repeated arcs accumulate their frequency.
    pub fn add_arc(&mut self, from: usize, to: usize, freq: u64) {
        *self.arcs.entry((from, to)).or_insert(0) += freq;
    }

    /// Validates the graph against the DFG shape rules and returns it along
    /// with the map from builder ids to canonical vertex ids.
    pub fn build(self) -> Result<(Dfg, Vec<VertexId>), ModelError> {
        let n = self.labels.len() + 2;
        let mut seen = BTreeSet::new();
        for l in &self.labels {
            if !seen.insert(l) {
                return Err(ModelError::DuplicateVertex(l.display()));
            }
        }
        let mut order: Vec<usize> = (0..self.labels.len()).collect();
        order.sort_by(|&a, &b| {
            let (la, lb) = (&self.labels[a], &self.labels[b]);
            la.display().cmp(&lb.display()).then_with(|| la.cmp(lb))
        });
        let mut remap = vec![0; n];
        remap[START] = START;
        remap[END] = END;
        for (new, &old) in order.iter().enumerate() {
            remap[old + 2] = new + 2;
        }
        let labels = order.iter().map(|&i| self.labels[i].clone()).collect();
        let mut succ = vec![BTreeSet::new(); n];
        let mut pred = vec![BTreeSet::new(); n];
        let mut freq = BTreeMap::new();
        for (&(u, v), &f) in &self.arcs {
            if u >= n || v >= n {
                return Err(ModelError::DanglingArc(u, v));
            }
            if v == START {
                return Err(ModelError::ArcIntoStart);
            }
            if u == END {
                return Err(ModelError::ArcFromEnd);
            }
            let (u, v) = (remap[u], remap[v]);
            succ[u].insert(v);
            pred[v].insert(u);
            freq.insert((u, v), f);
        }
        let dfg = Dfg { labels, succ, pred, freq };
        if dfg.succ[START].is_empty() {
            return Err(ModelError::EmptyModel);
        }
        for v in dfg.labelled() {
            if dfg.pred[v].is_empty() {
                return Err(ModelError::NoIncoming(dfg.display(v)));
            }
            if dfg.succ[v].is_empty() {
                return Err(ModelError::NoOutgoing(dfg.display(v)));
            }
        }
        Ok((dfg, remap))
    }
}

impl Dfg {
    pub fn vertex_count(&self) -> usize {
        self.labels.len() + 2
    }

    /// Number of labelled vertices (start and end excluded).
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn arc_count(&self) -> usize {
        self.freq.len()
    }

    /// Ids of labelled vertices in canonical order.
    pub fn labelled(&self) -> std::ops::Range<VertexId> {
        2..self.vertex_count()
    }

    pub fn label(&self, v: VertexId) -> Option<&VertexLabel> {
        v.checked_sub(2).and_then(|i| self.labels.get(i))
    }

    /// Display text; `start` and `end` for the artificial vertices.
    pub fn display(&self, v: VertexId) -> String {
        match v {
            START => "start".into(),
            END => "end".into(),
            _ => self.label(v).map(VertexLabel::display).unwrap_or_default(),
        }
    }

    pub fn successors(&self, v: VertexId) -> &BTreeSet<VertexId> {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: VertexId) -> &BTreeSet<VertexId> {
        &self.pred[v]
    }

    pub fn has_arc(&self, u: VertexId, v: VertexId) -> bool {
        self.succ.get(u).is_some_and(|s| s.contains(&v))
    }

    /// Arcs in lexicographic order of canonical ids.
    pub fn arcs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.freq.keys().copied()
    }

    /// Optional arc frequency annotation (0 when unknown).
    pub fn frequency(&self, u: VertexId, v: VertexId) -> u64 {
        self.freq.get(&(u, v)).copied().unwrap_or(0)
    }

    pub fn find(&self, label: &VertexLabel) -> Option<VertexId> {
        self.labels.iter().position(|l| l == label).map(|i| i + 2)
    }

    pub fn find_display(&self, display: &str) -> Option<VertexId> {
        self.labelled().find(|&v| self.display(v) == display)
    }

    /// Whether an event name in a log may be replayed on vertex `v`: either
    /// its display label (renamed logs) or its event name (raw logs).
    pub fn accepts(&self, v: VertexId, event: &str) -> bool {
        self.label(v).is_some_and(|l| l.base.as_str() == event || l.display() == event)
    }

    /// Event names carried by more than one vertex, with those vertices.
    pub fn duplicate_families(&self) -> BTreeMap<Activity, Vec<VertexId>> {
        let mut by_base: BTreeMap<Activity, Vec<VertexId>> = BTreeMap::new();
        for v in self.labelled() {
            by_base.entry(self.labels[v - 2].base.clone()).or_default().push(v);
        }
        by_base.retain(|_, vs| vs.len() > 1);
        by_base
    }

    pub fn has_duplicate_labels(&self) -> bool {
        !self.duplicate_families().is_empty()
    }

    /// Topological order, smallest display label first among ready vertices.
    /// Returns `None` for cyclic graphs.
    pub fn topological_order(&self) -> Option<Vec<VertexId>> {
        let mut indeg: Vec<usize> = self.pred.iter().map(BTreeSet::len).collect();
        let key = |v: VertexId| (v != START, self.display(v), v);
        let mut ready: BinaryHeap<Reverse<(bool, String, VertexId)>> =
            (0..self.vertex_count()).filter(|&v| indeg[v] == 0).map(|v| Reverse(key(v))).collect();
        let mut out = Vec::with_capacity(self.vertex_count());
        while let Some(Reverse((_, _, v))) = ready.pop() {
            out.push(v);
            for &w in &self.succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(Reverse(key(w)));
                }
            }
        }
        (out.len() == self.vertex_count()).then_some(out)
    }

    /// Same labels and arcs, frequencies ignored. Canonical form makes this
    /// an isomorphism test for label-preserving isomorphisms.
    pub fn same_shape(&self, other: &Dfg) -> bool {
        self.labels == other.labels && self.succ == other.succ
    }

    pub fn adjacency(&self) -> Vec<Vec<VertexId>> {
        self.succ.iter().map(|s| s.iter().copied().collect()).collect()
    }
}

/// The standard DFG of a log: one vertex per activity, an arc for each
/// directly-follows pair, plus start and end arcs for first and last events.
pub fn discover_dfg(log: &EventLog) -> Result<Dfg, ModelError> {
    if log.is_empty() {
        return Err(ModelError::EmptyLog);
    }
    let mut b = DfgBuilder::new();
    let mut ids: BTreeMap<&Activity, usize> = BTreeMap::new();
    for a in log.traces().iter().flat_map(|t| t.events()) {
        if !ids.contains_key(a) {
            let id = b.add_vertex(VertexLabel::plain(a.clone()));
            ids.insert(a, id);
        }
    }
    for t in log.traces() {
        let ev = t.events();
        b.add_arc(START, ids[&ev[0]], 1);
        for w in ev.windows(2) {
            b.add_arc(ids[&w[0]], ids[&w[1]], 1);
        }
        b.add_arc(ids[&ev[ev.len() - 1]], END, 1);
    }
    Ok(b.build()?.0)
}

/// Does some start-to-end path spell `sequence`? Labels may repeat, so the
/// search tracks every vertex consistent with the prefix read so far.
pub fn is_run<S: AsRef<str>>(model: &Dfg, sequence: &[S]) -> bool {
    let mut states: BTreeSet<VertexId> = BTreeSet::from([START]);
    for e in sequence {
        states = step(model, &states, e.as_ref());
        if states.is_empty() {
            return false;
        }
    }
    states.iter().any(|&v| model.has_arc(v, END))
}

/// Vertices reachable from `states` by one arc whose target accepts `event`.
pub(crate) fn step(model: &Dfg, states: &BTreeSet<VertexId>, event: &str) -> BTreeSet<VertexId> {
    states
        .iter()
        .flat_map(|&v| model.successors(v).iter().copied())
        .filter(|&w| model.accepts(w, event))
        .collect()
}

pub fn perfectly_fits(model: &Dfg, log: &EventLog) -> bool {
    log.traces().iter().all(|t| {
        let names: Vec<&str> = t.events().iter().map(Activity::as_str).collect();
        is_run(model, &names)
    })
}

pub fn is_acyclic(model: &Dfg) -> bool {
    model.topological_order().is_some()
}

pub fn count_simple_cycles(model: &Dfg, cap: u64) -> CycleCount {
    count_elementary_circuits(&model.adjacency(), cap)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelStats {
    pub node_count: usize,
    pub arc_count: usize,
    pub simple_cycle_count: CycleCount,
    pub duplicate_label_count: usize,
}

pub fn model_stats(model: &Dfg, cap: u64) -> ModelStats {
    ModelStats {
        node_count: model.node_count(),
        arc_count: model.arc_count(),
        simple_cycle_count: count_simple_cycles(model, cap),
        duplicate_label_count: model.duplicate_families().len(),
    }
}

impl Serialize for CycleCount {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CycleCount::Exact(n) => s.serialize_u64(*n),
            CycleCount::Saturated(cap) => s.serialize_str(&format!(">{cap}")),
        }
    }
}

pub use io::to_dot;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn chain_ab() -> Dfg {
        discover_dfg(&EventLog::from_sequences(&[&["A", "B"]]).unwrap()).unwrap()
    }

    #[test]
    fn chain_model() {
        let m = chain_ab();
        assert_eq!(m.node_count(), 2);
        assert_eq!(m.arc_count(), 3);
        assert!(is_acyclic(&m));
        assert_eq!(count_simple_cycles(&m, 10), CycleCount::Exact(0));
        assert!(is_run(&m, &["A", "B"]));
        assert!(!is_run(&m, &["B", "A"]));
        assert!(!is_run(&m, &["A"]));
        let stats = model_stats(&m, 10);
        assert_eq!((stats.node_count, stats.arc_count, stats.duplicate_label_count), (2, 3, 0));
    }

    #[test]
    fn empty_log_rejected() {
        assert_eq!(discover_dfg(&EventLog::default()).unwrap_err(), ModelError::EmptyLog);
    }

    #[test]
    fn guard_model_is_acyclic() {
        let mut b = DfgBuilder::new();
        b.add_arc(START, END, 1);
        let (m, _) = b.build().unwrap();
        assert!(is_acyclic(&m));
        assert!(is_run::<&str>(&m, &[]));
    }

    #[test]
    fn two_order_model_has_mutual_arcs() {
        let log = fixtures::two_order_log();
        let m = discover_dfg(&log).unwrap();
        let c = m.find_display("C").unwrap();
        let d = m.find_display("D").unwrap();
        assert!(m.has_arc(c, d) && m.has_arc(d, c));
        assert!(!is_acyclic(&m));
        assert!(is_run(&m, &["A", "B", "D", "E", "F"]));
        assert!(is_run(&m, &["A", "B", "C", "D", "C", "E", "F"]));
        assert!(perfectly_fits(&m, &log));
    }

    #[test]
    fn lms_model_is_cyclic() {
        let m = discover_dfg(&fixtures::lms_log()).unwrap();
        assert!(!is_acyclic(&m));
        let l2 = m.find_display("bmgc lecture_2").unwrap();
        let s1 = m.find_display("bmgc seminar_1").unwrap();
        assert!(m.has_arc(l2, s1) && m.has_arc(s1, l2));
        match count_simple_cycles(&m, 1000) {
            CycleCount::Exact(n) => assert!(n >= 3, "{n}"),
            c => panic!("{c:?}"),
        }
    }

    #[test]
    fn fit_failure() {
        let m = chain_ab();
        assert!(!perfectly_fits(&m, &EventLog::from_sequences(&[&["A", "B"], &["B", "A"]]).unwrap()));
    }

    #[test]
    fn builder_rejects_malformed_graphs() {
        let a = || VertexLabel::plain(Activity::new("A").unwrap());
        let mut b = DfgBuilder::new();
        let x = b.add_vertex(a());
        b.add_arc(START, x, 1);
        assert_eq!(b.build().unwrap_err(), ModelError::NoOutgoing("A".into()));

        let mut b = DfgBuilder::new();
        let x = b.add_vertex(a());
        b.add_arc(x, END, 1);
        b.add_arc(START, END, 1);
        assert_eq!(b.build().unwrap_err(), ModelError::NoIncoming("A".into()));

        let mut b = DfgBuilder::new();
        b.add_vertex(a());
        b.add_vertex(a());
        assert!(matches!(b.build().unwrap_err(), ModelError::DuplicateVertex(_)));

        let mut b = DfgBuilder::new();
        b.add_arc(START, END, 1);
        b.add_arc(END, START, 1);
        assert!(matches!(b.build().unwrap_err(), ModelError::ArcIntoStart | ModelError::ArcFromEnd));
    }

    #[test]
    fn duplicated_labels_need_path_search() {
        // start -> F.1 -> G -> end and start -> F.2 -> H -> end
        let act = |s: &str| Activity::new(s).unwrap();
        let mut b = DfgBuilder::new();
        let f1 = b.add_vertex(VertexLabel::indexed(act("F"), 1));
        let f2 = b.add_vertex(VertexLabel::indexed(act("F"), 2));
        let g = b.add_vertex(VertexLabel::plain(act("G")));
        let h = b.add_vertex(VertexLabel::plain(act("H")));
        for (u, v) in [(START, f1), (START, f2), (f1, g), (f2, h), (g, END), (h, END)] {
            b.add_arc(u, v, 1);
        }
        let (m, _) = b.build().unwrap();
        assert!(is_run(&m, &["F", "H"]));
        assert!(is_run(&m, &["F", "G"]));
        assert!(is_run(&m, &["F.2", "H"]));
        assert!(!is_run(&m, &["F.1", "H"]));
        assert_eq!(model_stats(&m, 10).duplicate_label_count, 1);
    }

    #[test]
    fn canonical_order_is_by_display() {
        let log = EventLog::from_sequences(&[&["Z", "A", "M"]]).unwrap();
        let m = discover_dfg(&log).unwrap();
        let names: Vec<String> = m.labelled().map(|v| m.display(v)).collect();
        assert_eq!(names, ["A", "M", "Z"]);
        assert_eq!(m.topological_order().unwrap().iter().map(|&v| m.display(v)).collect::<Vec<_>>(),
            ["start", "Z", "A", "M", "end"]);
    }
}
