//! Splitting an acyclic log into sublogs whose standard DFGs are acyclic.
//!
//! Traces are grouped into classes of identical event sequences. Two classes
//! are compatible when no pair of shared activities occurs in opposite
//! orders; a greedy clique cover of the compatibility graph gives candidate
//! sublogs. Pairwise compatibility does not imply that a group of three or
//! more traces has an acyclic DFG (take AB, BC, CA), so every candidate is
//! checked and re-split when needed.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dfg::{discover_dfg, is_acyclic};
use crate::event_log::{Activity, EventLog, LogError, Trace};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionError {
    #[error("log is not acyclic: cases {0:?} repeat an activity")]
    CyclicLog(Vec<String>),
    #[error("trace `{0}` repeats an activity")]
    CyclicTrace(String),
}

/// True iff no two shared activities appear in opposite orders.
pub fn compatible(t1: &Trace, t2: &Trace) -> Result<bool, PartitionError> {
    for t in [t1, t2] {
        if !t.is_acyclic() {
            return Err(PartitionError::CyclicTrace(t.case_id().to_string()));
        }
    }
    Ok(compatible_unchecked(t1.events(), t2.events()))
}

fn compatible_unchecked(a: &[Activity], b: &[Activity]) -> bool {
    let pos: HashMap<&Activity, usize> = b.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let mut last = None;
    for x in a {
        if let Some(&p) = pos.get(x) {
            if last.is_some_and(|l| p < l) {
                return false;
            }
            last = Some(p);
        }
    }
    true
}

/// One node per distinct event sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceClass {
    pub events: Vec<Activity>,
    /// Indices into the source log, in log order.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityGraph {
    pub nodes: Vec<TraceClass>,
    adjacency: Vec<BTreeSet<usize>>,
}

impl CompatibilityGraph {
    /// Graph over an explicit node count and edge list; used for testing the
    /// cover heuristic on arbitrary graphs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            if u != v {
                adjacency[u].insert(v);
                adjacency[v].insert(u);
            }
        }
        let nodes = (0..n).map(|i| TraceClass { events: Vec::new(), members: vec![i] }).collect();
        CompatibilityGraph { nodes, adjacency }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(&v)
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.node_count())
            .flat_map(|u| self.adjacency[u].iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect()
    }
}

pub fn build_compatibility_graph(log: &EventLog) -> Result<CompatibilityGraph, PartitionError> {
    let cyclic = log.cyclic_cases();
    if !cyclic.is_empty() {
        return Err(PartitionError::CyclicLog(cyclic));
    }
    let mut index: HashMap<&[Activity], usize> = HashMap::new();
    let mut nodes: Vec<TraceClass> = Vec::new();
    for (i, t) in log.traces().iter().enumerate() {
        let k = *index.entry(t.events()).or_insert_with(|| {
            nodes.push(TraceClass { events: t.events().to_vec(), members: Vec::new() });
            nodes.len() - 1
        });
        nodes[k].members.push(i);
    }
    let n = nodes.len();
    let mut adjacency = vec![BTreeSet::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            if compatible_unchecked(&nodes[u].events, &nodes[v].events) {
                adjacency[u].insert(v);
                adjacency[v].insert(u);
            }
        }
    }
    Ok(CompatibilityGraph { nodes, adjacency })
}

/// Greedy first-fit clique cover: nodes in descending degree order (ties by
/// index) join the first clique they are fully adjacent to.
pub fn clique_cover(graph: &CompatibilityGraph) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..graph.node_count()).collect();
    order.sort_by_key(|&u| std::cmp::Reverse(graph.degree(u)));
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    for u in order {
        match cliques.iter_mut().find(|c| c.iter().all(|&v| graph.adjacent(u, v))) {
            Some(c) => c.push(u),
            None => cliques.push(vec![u]),
        }
    }
    cliques
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub sublogs: Vec<EventLog>,
    /// Case ids of each sublog, in the same order as `sublogs`.
    pub origin: Vec<Vec<String>>,
}

/// `{sublog index -> case ids}`, the manifest written next to sublog files.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Manifest(pub BTreeMap<usize, Vec<String>>);

impl Manifest {
    /// Sublog index for each case id.
    pub fn case_index(&self) -> HashMap<&str, usize> {
        self.0.iter().flat_map(|(&i, cs)| cs.iter().map(move |c| (c.as_str(), i))).collect()
    }
}

impl Partition {
    pub fn manifest(&self) -> Manifest {
        Manifest(self.origin.iter().cloned().enumerate().collect())
    }

    /// Groups a log by an external assignment of case ids to group keys.
    /// Groups are ordered by first appearance in the log.
    pub fn from_grouping(log: &EventLog, group_of: &HashMap<String, String>) -> Result<Self, String> {
        let mut order: Vec<&str> = Vec::new();
        let mut groups: HashMap<&str, Vec<Trace>> = HashMap::new();
        for t in log.traces() {
            let g = group_of.get(t.case_id()).ok_or_else(|| format!("case `{}` has no group", t.case_id()))?;
            groups
                .entry(g.as_str())
                .or_insert_with(|| {
                    order.push(g.as_str());
                    Vec::new()
                })
                .push(t.clone());
        }
        let sublogs: Vec<EventLog> = order.iter().map(|g| EventLog::new(groups.remove(g).unwrap_or_default())).collect();
        let origin = sublogs.iter().map(|l| l.traces().iter().map(|t| t.case_id().to_string()).collect()).collect();
        Ok(Partition { sublogs, origin })
    }

    /// Rebuilds a partition of `log` from a manifest, which must cover every
    /// case exactly once.
    pub fn from_manifest(log: &EventLog, manifest: &Manifest) -> Result<Self, String> {
        let by_case: HashMap<&str, &Trace> = log.traces().iter().map(|t| (t.case_id(), t)).collect();
        let mut seen = BTreeSet::new();
        let mut sublogs = Vec::new();
        for cases in manifest.0.values() {
            let mut traces = Vec::with_capacity(cases.len());
            for c in cases {
                let t = by_case.get(c.as_str()).ok_or_else(|| format!("case `{c}` is not in the log"))?;
                if !seen.insert(c.as_str()) {
                    return Err(format!("case `{c}` appears twice in the manifest"));
                }
                traces.push((*t).clone());
            }
            sublogs.push(EventLog::new(traces));
        }
        if let Some(t) = log.traces().iter().find(|t| !seen.contains(t.case_id())) {
            return Err(format!("case `{}` is missing from the manifest", t.case_id()));
        }
        Ok(Partition { sublogs, origin: manifest.0.values().cloned().collect() })
    }
}

/// Reads a `case_id,group` CSV (with a header row) into a case-to-group map.
pub fn read_grouping<R: Read>(reader: R) -> Result<HashMap<String, String>, LogError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out = HashMap::new();
    for row in rdr.records() {
        let row = row?;
        match (row.get(0), row.get(1)) {
            (Some(c), Some(g)) => {
                out.insert(c.to_string(), g.to_string());
            }
            _ => return Err(LogError::MissingColumn("group".into())),
        }
    }
    Ok(out)
}

pub fn write_grouping<W: Write>(grouping: &HashMap<String, String>, writer: W) -> Result<(), LogError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["case_id", "group"])?;
    let sorted: BTreeMap<&String, &String> = grouping.iter().collect();
    for (c, g) in sorted {
        w.write_record([c, g])?;
    }
    w.flush()?;
    Ok(())
}

fn dfg_acyclic(classes: &[&TraceClass], log: &EventLog) -> bool {
    let traces = classes.iter().map(|c| log.traces()[c.members[0]].clone()).collect();
    discover_dfg(&EventLog::new(traces)).map(|m| is_acyclic(&m)).unwrap_or(true)
}

/// Partitions an acyclic log into DFG-acyclic sublogs.
pub fn partition_log(log: &EventLog) -> Result<Partition, PartitionError> {
    let graph = build_compatibility_graph(log)?;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for clique in clique_cover(&graph) {
        let mut members: Vec<&TraceClass> = clique.iter().map(|&c| &graph.nodes[c]).collect();
        members.sort_by_key(|c| c.members[0]);
        if dfg_acyclic(&members, log) {
            groups.push(clique);
            continue;
        }
        // Re-split: classes join the first piece that stays acyclic.
        let mut pieces: Vec<Vec<usize>> = Vec::new();
        let mut ordered = clique.clone();
        ordered.sort_by_key(|&c| graph.nodes[c].members[0]);
        for c in ordered {
            let fits = pieces.iter_mut().find(|p| {
                let trial: Vec<&TraceClass> = p.iter().chain([&c]).map(|&k| &graph.nodes[k]).collect();
                dfg_acyclic(&trial, log)
            });
            match fits {
                Some(p) => p.push(c),
                None => pieces.push(vec![c]),
            }
        }
        groups.extend(pieces);
    }
    let mut sublogs = Vec::with_capacity(groups.len());
    let mut origin = Vec::with_capacity(groups.len());
    for g in groups {
        let mut idx: Vec<usize> = g.iter().flat_map(|&c| graph.nodes[c].members.iter().copied()).collect();
        idx.sort_unstable();
        let traces: Vec<Trace> = idx.iter().map(|&i| log.traces()[i].clone()).collect();
        origin.push(traces.iter().map(|t| t.case_id().to_string()).collect());
        sublogs.push(EventLog::new(traces));
    }
    Ok(Partition { sublogs, origin })
}
