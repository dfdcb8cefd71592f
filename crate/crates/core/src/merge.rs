//! Merging two acyclic DFGs without creating cycles.
//!
//! Labels shared by both models are grouped into common subgraphs: weakly
//! connected components of the arcs both models have. A connectivity graph
//! over those subgraphs (naive mode) or over their vertices (accurate mode)
//! records which shared vertices reach which others in either model; any
//! cycle in it would become a cycle once the shared vertices are fused. A
//! minimum feedback vertex set of the connectivity graph picks what to keep
//! apart, and everything else is fused.
//!
//! Internally vertices are matched through atomic keys (a [`VertexLabel`]
//! per vertex, unique within each model), which lets the rename step align
//! duplicated labels before calling the same machinery.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dfg::{is_acyclic, Dfg, DfgBuilder, ModelError, VertexId, VertexLabel, END, START};
use crate::event_log::Activity;
use crate::fvs::{min_fvs, Digraph, FvsResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MergeMode {
    Naive,
    #[default]
    Accurate,
}

impl fmt::Display for MergeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MergeMode::Naive => "naive",
            MergeMode::Accurate => "accurate",
        })
    }
}

impl FromStr for MergeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(MergeMode::Naive),
            "accurate" => Ok(MergeMode::Accurate),
            _ => Err(format!("unknown strategy `{s}` (expected naive or accurate)")),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MergeError {
    #[error("model {model} has duplicated labels {labels:?}; use the rename-aware merge")]
    DuplicateLabels { model: usize, labels: Vec<String> },
    #[error("model {0} is not acyclic")]
    CyclicInput(usize),
    #[error("nothing to merge")]
    NoModels,
    #[error("merge order is not a permutation of 0..{0}")]
    BadOrder(usize),
    #[error("internal error: merged model is cyclic")]
    CyclicResult,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Shared vertices connected by arcs present in both models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonSubgraph {
    /// (vertex in model 1, vertex in model 2), by model-1 display label.
    pub vertex_pairs: Vec<(VertexId, VertexId)>,
    /// Common arcs in model-1 ids.
    pub arcs: Vec<(VertexId, VertexId)>,
    /// Model-1 display labels of the vertices, sorted.
    pub labels: Vec<String>,
}

/// A node of the connectivity graph: a whole subgraph in naive mode, a
/// single shared vertex in accurate mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unit {
    pub subgraph: usize,
    pub members: Vec<(VertexId, VertexId)>,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityGraph {
    pub mode: MergeMode,
    pub units: Vec<Unit>,
    pub graph: Digraph,
}

/// `{source model index -> {label in that model -> label in the merge}}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RenameMap(pub BTreeMap<usize, BTreeMap<String, String>>);

impl RenameMap {
    pub fn identity(source: usize, model: &Dfg) -> Self {
        let labels = model.labelled().map(|v| (model.display(v), model.display(v))).collect();
        RenameMap(BTreeMap::from([(source, labels)]))
    }

    pub fn source(&self, source: usize) -> Option<&BTreeMap<String, String>> {
        self.0.get(&source)
    }

    pub fn get(&self, source: usize, label: &str) -> Option<&str> {
        self.0.get(&source)?.get(label).map(String::as_str)
    }
}

/// Diagnostics of one pairwise merge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergeStep {
    pub mode: MergeMode,
    pub common_subgraphs: usize,
    pub connectivity_nodes: usize,
    pub connectivity_arcs: usize,
    /// Unit names dropped by the feedback vertex set.
    pub removed: Vec<String>,
    pub fvs_optimal: bool,
    pub fused: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedModel {
    pub model: Dfg,
    pub rename_map: RenameMap,
    /// Display labels, in `model`, of vertices fused from two models.
    pub merged_labels: BTreeSet<String>,
    pub steps: Vec<MergeStep>,
}

impl MergedModel {
    /// Fused vertices summed over all pairwise steps.
    pub fn fused_total(&self) -> usize {
        self.steps.iter().map(|s| s.fused).sum()
    }
}

/// A model plus one atomic key per labelled vertex.
pub(crate) struct Keyed<'a> {
    pub model: &'a Dfg,
    keys: Vec<Option<VertexLabel>>,
    by_key: HashMap<VertexLabel, VertexId>,
}

impl<'a> Keyed<'a> {
    pub fn plain(model: &'a Dfg) -> Self {
        Self::with_keys(model, |v| model.label(v).cloned().expect("labelled"))
    }

    pub fn with_keys(model: &'a Dfg, mut key: impl FnMut(VertexId) -> VertexLabel) -> Self {
        let mut keys = vec![None; model.vertex_count()];
        let mut by_key = HashMap::new();
        for v in model.labelled() {
            let k = key(v);
            let old = by_key.insert(k.clone(), v);
            assert!(old.is_none(), "atomic keys must be unique within a model");
            keys[v] = Some(k);
        }
        Keyed { model, keys, by_key }
    }

    fn key(&self, v: VertexId) -> Option<&VertexLabel> {
        self.keys[v].as_ref()
    }

    /// Counterpart of `v` (a vertex of `self`) in `other`; start and end
    /// always correspond.
    fn counterpart(&self, v: VertexId, other: &Keyed<'_>) -> Option<VertexId> {
        match v {
            START | END => Some(v),
            _ => self.key(v).and_then(|k| other.by_key.get(k).copied()),
        }
    }
}

fn check_unique(model: &Dfg, idx: usize) -> Result<(), MergeError> {
    let fam = model.duplicate_families();
    if fam.is_empty() {
        Ok(())
    } else {
        Err(MergeError::DuplicateLabels { model: idx, labels: fam.keys().map(Activity::to_string).collect() })
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub(crate) fn keyed_common_subgraphs(a: &Keyed<'_>, b: &Keyed<'_>) -> Vec<CommonSubgraph> {
    let m1 = a.model;
    let n = m1.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut common = Vec::new();
    for (u, v) in m1.arcs() {
        if u == START || v == END {
            continue;
        }
        if let (Some(u2), Some(v2)) = (a.counterpart(u, b), a.counterpart(v, b)) {
            if b.model.has_arc(u2, v2) {
                common.push((u, v));
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
    for &(u, v) in &common {
        for x in [u, v] {
            let r = find(&mut parent, x);
            let g = groups.entry(r).or_default();
            if !g.contains(&x) {
                g.push(x);
            }
        }
    }
    let mut out: Vec<CommonSubgraph> = groups
        .into_values()
        .filter(|g| g.len() >= 2)
        .map(|mut g| {
            g.sort_by_key(|&v| m1.display(v));
            let root = find(&mut parent, g[0]);
            let arcs = common.iter().copied().filter(|&(u, _)| find(&mut parent, u) == root).collect();
            CommonSubgraph {
                vertex_pairs: g.iter().map(|&v| (v, a.counterpart(v, b).expect("shared"))).collect(),
                labels: g.iter().map(|&v| m1.display(v)).collect(),
                arcs,
            }
        })
        .collect();
    out.sort_by(|x, y| x.labels[0].cmp(&y.labels[0]));
    out
}

/// Common subgraphs of two models with unique labels, ordered by their
/// smallest label.
pub fn common_subgraphs(m1: &Dfg, m2: &Dfg) -> Result<Vec<CommonSubgraph>, MergeError> {
    check_unique(m1, 0)?;
    check_unique(m2, 1)?;
    Ok(keyed_common_subgraphs(&Keyed::plain(m1), &Keyed::plain(m2)))
}

/// Vertices of `targets` reachable from each of `sources` by a nonempty path.
fn reach_sets(model: &Dfg, sources: &[VertexId], targets: &HashMap<VertexId, usize>) -> Vec<BTreeSet<usize>> {
    sources
        .iter()
        .map(|&s| {
            let mut seen = vec![false; model.vertex_count()];
            let mut q: VecDeque<VertexId> = model.successors(s).iter().copied().collect();
            let mut hit = BTreeSet::new();
            while let Some(v) = q.pop_front() {
                if std::mem::replace(&mut seen[v], true) {
                    continue;
                }
                if let Some(&t) = targets.get(&v) {
                    hit.insert(t);
                }
                q.extend(model.successors(v).iter().copied());
            }
            hit
        })
        .collect()
}

/// Vertex-level graph over all subgraph vertices: `i -> j` when the vertex
/// `i` reaches vertex `j` in either model. Arcs inside a subgraph are kept.
fn vertex_reachability(a: &Keyed<'_>, b: &Keyed<'_>, pairs: &[(VertexId, VertexId)]) -> Digraph {
    let idx1: HashMap<VertexId, usize> = pairs.iter().enumerate().map(|(i, p)| (p.0, i)).collect();
    let idx2: HashMap<VertexId, usize> = pairs.iter().enumerate().map(|(i, p)| (p.1, i)).collect();
    let r1 = reach_sets(a.model, &pairs.iter().map(|p| p.0).collect::<Vec<_>>(), &idx1);
    let r2 = reach_sets(b.model, &pairs.iter().map(|p| p.1).collect::<Vec<_>>(), &idx2);
    let mut g = Digraph::new(pairs.len());
    for i in 0..pairs.len() {
        for &j in r1[i].iter().chain(r2[i].iter()) {
            if i != j {
                g.add_arc(i, j);
            }
        }
    }
    g
}

pub(crate) fn keyed_connectivity(
    a: &Keyed<'_>,
    b: &Keyed<'_>,
    subgraphs: &[CommonSubgraph],
    mode: MergeMode,
) -> ConnectivityGraph {
    let pairs: Vec<(VertexId, VertexId)> = subgraphs.iter().flat_map(|s| s.vertex_pairs.iter().copied()).collect();
    let owner: Vec<usize> =
        subgraphs.iter().enumerate().flat_map(|(i, s)| std::iter::repeat_n(i, s.vertex_pairs.len())).collect();
    let vg = vertex_reachability(a, b, &pairs);
    match mode {
        MergeMode::Accurate => ConnectivityGraph {
            mode,
            units: pairs
                .iter()
                .zip(&owner)
                .map(|(&p, &s)| Unit { subgraph: s, members: vec![p], name: a.model.display(p.0) })
                .collect(),
            graph: vg,
        },
        MergeMode::Naive => {
            let mut g = Digraph::new(subgraphs.len());
            for (i, j) in vg.arcs() {
                if owner[i] != owner[j] {
                    g.add_arc(owner[i], owner[j]);
                }
            }
            // A subgraph whose own vertices are ordered inconsistently by the
            // two models cannot be fused at all.
            for s in 0..subgraphs.len() {
                let members: Vec<usize> = (0..pairs.len()).filter(|&i| owner[i] == s).collect();
                let local: HashMap<usize, usize> = members.iter().enumerate().map(|(k, &i)| (i, k)).collect();
                let inner = Digraph::from_arcs(
                    members.len(),
                    vg.arcs().filter_map(|(i, j)| Some((*local.get(&i)?, *local.get(&j)?))),
                );
                if !inner.is_acyclic() {
                    g.add_arc(s, s);
                }
            }
            ConnectivityGraph {
                mode,
                units: subgraphs
                    .iter()
                    .enumerate()
                    .map(|(i, s)| Unit { subgraph: i, members: s.vertex_pairs.clone(), name: s.labels.join("-") })
                    .collect(),
                graph: g,
            }
        }
    }
}

pub fn build_connectivity_graph(
    m1: &Dfg,
    m2: &Dfg,
    subgraphs: &[CommonSubgraph],
    mode: MergeMode,
) -> ConnectivityGraph {
    keyed_connectivity(&Keyed::plain(m1), &Keyed::plain(m2), subgraphs, mode)
}

pub(crate) struct KeyedMerge {
    pub model: Dfg,
    /// Merged id of every model-1 vertex (start and end included).
    pub map1: Vec<VertexId>,
    pub map2: Vec<VertexId>,
    pub fused: BTreeSet<VertexId>,
    pub step: MergeStep,
}

struct NodeDesc {
    base: Activity,
    /// Model of origin (0 for model 1 and fused vertices), then the
    /// label the vertex had there.
    rank: (u8, VertexLabel),
}

pub(crate) fn keyed_merge(a: &Keyed<'_>, b: &Keyed<'_>, mode: MergeMode, fvs_budget: u64) -> Result<KeyedMerge, MergeError> {
    for (i, k) in [a, b].iter().enumerate() {
        if !is_acyclic(k.model) {
            return Err(MergeError::CyclicInput(i));
        }
    }
    let (m1, m2) = (a.model, b.model);
    let subgraphs = keyed_common_subgraphs(a, b);
    let conn = keyed_connectivity(a, b, &subgraphs, mode);
    let FvsResult { removed, optimal, .. } = min_fvs(&conn.graph, fvs_budget);
    let fused_pairs: Vec<(VertexId, VertexId)> = conn
        .units
        .iter()
        .enumerate()
        .filter(|(i, _)| !removed.contains(i))
        .flat_map(|(_, u)| u.members.iter().copied())
        .collect();
    let partner: HashMap<VertexId, VertexId> = fused_pairs.iter().map(|&(x, y)| (y, x)).collect();

    let mut nodes: Vec<NodeDesc> = Vec::new();
    let mut node1 = vec![usize::MAX; m1.vertex_count()];
    let mut node2 = vec![usize::MAX; m2.vertex_count()];
    for v in m1.labelled() {
        let l = m1.label(v).expect("labelled").clone();
        node1[v] = nodes.len();
        nodes.push(NodeDesc { base: l.base.clone(), rank: (0, l) });
    }
    for w in m2.labelled() {
        node2[w] = match partner.get(&w) {
            Some(&v) => node1[v],
            None => {
                let l = m2.label(w).expect("labelled").clone();
                nodes.push(NodeDesc { base: l.base.clone(), rank: (1, l) });
                nodes.len() - 1
            }
        };
    }
    let mut families: BTreeMap<&Activity, Vec<usize>> = BTreeMap::new();
    for (i, d) in nodes.iter().enumerate() {
        families.entry(&d.base).or_default().push(i);
    }
    let mut ordinal = vec![0u32; nodes.len()];
    for members in families.values_mut() {
        if members.len() > 1 {
            members.sort_by(|&x, &y| {
                let (rx, ry) = (&nodes[x].rank, &nodes[y].rank);
                (rx.0, rx.1.ordinal, rx.1.display()).cmp(&(ry.0, ry.1.ordinal, ry.1.display()))
            });
            for (k, &i) in members.iter().enumerate() {
                ordinal[i] = k as u32 + 1;
            }
        }
    }
    let mut builder = DfgBuilder::new();
    let bid: Vec<usize> =
        nodes.iter().zip(&ordinal).map(|(d, &o)| builder.add_vertex(VertexLabel::indexed(d.base.clone(), o))).collect();
    let to_builder = |node: &[usize], v: VertexId| if v == START || v == END { v } else { bid[node[v]] };
    for (u, v) in m1.arcs() {
        builder.add_arc(to_builder(&node1, u), to_builder(&node1, v), m1.frequency(u, v));
    }
    for (u, v) in m2.arcs() {
        builder.add_arc(to_builder(&node2, u), to_builder(&node2, v), m2.frequency(u, v));
    }
    let (model, remap) = builder.build()?;
    if !is_acyclic(&model) {
        return Err(MergeError::CyclicResult);
    }
    let map1: Vec<VertexId> = (0..m1.vertex_count()).map(|v| remap[to_builder(&node1, v)]).collect();
    let map2: Vec<VertexId> = (0..m2.vertex_count()).map(|v| remap[to_builder(&node2, v)]).collect();
    let fused: BTreeSet<VertexId> = fused_pairs.iter().map(|&(v, _)| map1[v]).collect();
    let step = MergeStep {
        mode,
        common_subgraphs: subgraphs.len(),
        connectivity_nodes: conn.graph.node_count(),
        connectivity_arcs: conn.graph.arc_count(),
        removed: removed.iter().map(|&i| conn.units[i].name.clone()).collect(),
        fvs_optimal: optimal,
        fused: fused.len(),
    };
    Ok(KeyedMerge { model, map1, map2, fused, step })
}

pub(crate) fn pair_result(m1: &Dfg, m2: &Dfg, merged: KeyedMerge) -> MergedModel {
    let mut map = RenameMap::default();
    for (i, (m, vmap)) in [(m1, &merged.map1), (m2, &merged.map2)].into_iter().enumerate() {
        map.0.insert(i, m.labelled().map(|v| (m.display(v), merged.model.display(vmap[v]))).collect());
    }
    MergedModel {
        merged_labels: merged.fused.iter().map(|&v| merged.model.display(v)).collect(),
        model: merged.model,
        rename_map: map,
        steps: vec![merged.step],
    }
}

/// Merges two acyclic models whose labels are unique.
pub fn merge_pair(m1: &Dfg, m2: &Dfg, mode: MergeMode, fvs_budget: u64) -> Result<MergedModel, MergeError> {
    check_unique(m1, 0)?;
    check_unique(m2, 1)?;
    let merged = keyed_merge(&Keyed::plain(m1), &Keyed::plain(m2), mode, fvs_budget)?;
    Ok(pair_result(m1, m2, merged))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfg::{discover_dfg, perfectly_fits};
    use crate::event_log::EventLog;
    use crate::fixtures;

    fn dfg(seqs: &[&[&str]]) -> Dfg {
        discover_dfg(&EventLog::from_sequences(seqs).unwrap()).unwrap()
    }

    fn names(labels: &BTreeSet<String>) -> Vec<&str> {
        labels.iter().map(String::as_str).collect()
    }

    #[test]
    fn worked_subgraphs() {
        let (m1, m2) = fixtures::worked_models();
        let subs = common_subgraphs(&m1, &m2).unwrap();
        let labels: Vec<Vec<String>> = subs.iter().map(|s| s.labels.clone()).collect();
        assert_eq!(labels, [vec!["A", "B", "C"], vec!["F", "G", "H"], vec!["J", "K"]]);
    }

    #[test]
    fn worked_connectivity_graphs() {
        let (m1, m2) = fixtures::worked_models();
        let subs = common_subgraphs(&m1, &m2).unwrap();
        let naive = build_connectivity_graph(&m1, &m2, &subs, MergeMode::Naive);
        assert_eq!(naive.units.len(), 3);
        assert!(naive.graph.has_arc(0, 1) && naive.graph.has_arc(1, 0));
        assert_eq!(min_fvs(&naive.graph, 1000).removed, BTreeSet::from([1]));
        let acc = build_connectivity_graph(&m1, &m2, &subs, MergeMode::Accurate);
        assert_eq!(acc.units.len(), 8);
        let removed: Vec<&str> = min_fvs(&acc.graph, 1000).removed.iter().map(|&i| acc.units[i].name.as_str()).collect();
        assert_eq!(removed, ["F"]);
    }

    #[test]
    fn worked_merges() {
        let (l1, l2) = fixtures::worked_logs();
        let (m1, m2) = fixtures::worked_models();
        let naive = merge_pair(&m1, &m2, MergeMode::Naive, 1000).unwrap();
        assert_eq!(names(&naive.merged_labels), ["A", "B", "C", "J", "K"]);
        assert_eq!(naive.steps[0].removed, ["F-G-H"]);
        assert_eq!(naive.model.duplicate_families().len(), 3);
        let acc = merge_pair(&m1, &m2, MergeMode::Accurate, 1000).unwrap();
        assert_eq!(names(&acc.merged_labels), ["A", "B", "C", "G", "H", "J", "K"]);
        assert_eq!(acc.steps[0].removed, ["F"]);
        assert_eq!(acc.model.duplicate_families().len(), 1);
        for r in [&naive, &acc] {
            assert!(is_acyclic(&r.model));
            assert_eq!(r.rename_map.get(0, "F"), Some("F.1"));
            assert_eq!(r.rename_map.get(1, "F"), Some("F.2"));
            assert_eq!(r.model.node_count(), m1.node_count() + m2.node_count() - r.merged_labels.len());
            for (i, l) in [&l1, &l2].into_iter().enumerate() {
                let renamed = crate::conformance::rename_log(l, r.rename_map.source(i).unwrap(), &r.model).unwrap();
                assert!(perfectly_fits(&r.model, &renamed));
            }
        }
    }

    #[test]
    fn self_merge_is_identity() {
        let (m1, _) = fixtures::worked_models();
        for mode in [MergeMode::Naive, MergeMode::Accurate] {
            let r = merge_pair(&m1, &m1, mode, 1000).unwrap();
            assert!(r.model.same_shape(&m1));
            assert_eq!(r.merged_labels.len(), m1.node_count());
        }
    }

    #[test]
    fn disjoint_labels() {
        let m1 = dfg(&[&["A", "B"]]);
        let m2 = dfg(&[&["C", "D"]]);
        assert!(common_subgraphs(&m1, &m2).unwrap().is_empty());
        let conn = build_connectivity_graph(&m1, &m2, &[], MergeMode::Naive);
        assert_eq!(conn.graph.node_count(), 0);
        let r = merge_pair(&m1, &m2, MergeMode::Accurate, 10).unwrap();
        assert_eq!(r.model.node_count(), 4);
        assert!(r.model.has_arc(START, r.model.find_display("C").unwrap()));
    }

    #[test]
    fn shared_singletons_stay_apart() {
        // B is shared but has no common arc, so both copies remain.
        let m1 = dfg(&[&["A", "B"]]);
        let m2 = dfg(&[&["B", "C"]]);
        let r = merge_pair(&m1, &m2, MergeMode::Accurate, 10).unwrap();
        assert!(r.merged_labels.is_empty());
        assert!(r.model.find_display("B.1").is_some() && r.model.find_display("B.2").is_some());
    }

    #[test]
    fn inconsistent_order_inside_one_subgraph() {
        // A->B and A->C are common, but B and C come in opposite orders.
        let m1 = dfg(&[&["A", "B", "C"], &["A", "C"]]);
        let m2 = dfg(&[&["A", "C", "B"], &["A", "B"]]);
        let subs = common_subgraphs(&m1, &m2).unwrap();
        assert_eq!(subs.len(), 1);
        let naive = build_connectivity_graph(&m1, &m2, &subs, MergeMode::Naive);
        assert!(naive.graph.has_arc(0, 0));
        for mode in [MergeMode::Naive, MergeMode::Accurate] {
            let r = merge_pair(&m1, &m2, mode, 100).unwrap();
            assert!(is_acyclic(&r.model), "{mode}");
        }
        let acc = merge_pair(&m1, &m2, MergeMode::Accurate, 100).unwrap();
        assert_eq!(acc.merged_labels.len(), 2);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (m1, _) = fixtures::duplicate_models();
        let m2 = dfg(&[&["A"]]);
        assert!(matches!(merge_pair(&m1, &m2, MergeMode::Naive, 10), Err(MergeError::DuplicateLabels { model: 0, .. })));
        let cyclic = discover_dfg(&fixtures::two_order_log()).unwrap();
        assert_eq!(merge_pair(&m2, &cyclic, MergeMode::Naive, 10).unwrap_err(), MergeError::CyclicInput(1));
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("naive".parse::<MergeMode>().unwrap(), MergeMode::Naive);
        assert_eq!(MergeMode::default().to_string(), "accurate");
        assert!("fast".parse::<MergeMode>().is_err());
    }
}
