//! Merging models that already contain duplicated labels.
//!
//! One model (the incoming one) has its vertices relabelled toward the
//! other's duplicate families before the ordinary merge runs. Each
//! relabelling choice is scored by the common arcs it creates given the
//! choices made before it; the choices form a tree with one level per
//! renameable vertex, searched greedily.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::dfg::{is_acyclic, Dfg, VertexId, VertexLabel, END, START};
use crate::event_log::Activity;
use crate::merge::{keyed_merge, pair_result, Keyed, MergeError, MergeMode, MergedModel, RenameMap};

/// Frontier size at which the zero-gain lookahead stops widening.
const LOOKAHEAD_LIMIT: usize = 4096;

/// Ordinals of fresh keys for vertices left unchanged; far above any real
/// duplicate index.
const FRESH: u32 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Incoming {
    First,
    Second,
}

/// Tie-break key of one option; smaller is preferred.
type Rank = (bool, bool, u32);

/// One choice for a renameable vertex: match it to `target` in the other
/// model, or leave it unchanged (`target = None`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenameOption {
    pub node: VertexId,
    pub target: Option<VertexId>,
    pub target_label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenameLevel {
    pub node: VertexId,
    /// Targets by ascending ordinal, the unchanged option last.
    pub options: Vec<RenameOption>,
}

/// The levels of the rename tree plus what is needed to score options.
#[derive(Debug, Clone)]
pub struct RenameTree<'a> {
    pub incoming: Incoming,
    pub levels: Vec<RenameLevel>,
    inc: &'a Dfg,
    other: &'a Dfg,
    /// Counterparts of incoming vertices that are matched without a choice.
    fixed: HashMap<VertexId, VertexId>,
    level_of: HashMap<VertexId, usize>,
}

/// One complete root-to-leaf path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenamePlan {
    pub choices: Vec<Option<VertexId>>,
    pub total_gain: usize,
}

fn bases(m: &Dfg) -> BTreeMap<&Activity, Vec<VertexId>> {
    let mut out: BTreeMap<&Activity, Vec<VertexId>> = BTreeMap::new();
    for v in m.labelled() {
        out.entry(&m.label(v).expect("labelled").base).or_default().push(v);
    }
    out
}

impl<'a> RenameTree<'a> {
    pub fn new(m1: &'a Dfg, m2: &'a Dfg) -> Self {
        let incoming = if m1.duplicate_families().len() < m2.duplicate_families().len() {
            Incoming::First
        } else {
            Incoming::Second
        };
        let (inc, other) = match incoming {
            Incoming::First => (m1, m2),
            Incoming::Second => (m2, m1),
        };
        let (bi, bo) = (bases(inc), bases(other));
        let mut fixed = HashMap::new();
        let mut nodes = Vec::new();
        for (base, ws) in &bi {
            let Some(us) = bo.get(base) else { continue };
            if ws.len() == 1 && us.len() == 1 {
                fixed.insert(ws[0], us[0]);
            } else {
                nodes.extend(ws.iter().copied());
            }
        }
        let topo = inc.topological_order().unwrap_or_else(|| inc.labelled().collect());
        let pos: HashMap<VertexId, usize> = topo.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        nodes.sort_by_key(|&v| (pos[&v], inc.display(v)));
        let levels: Vec<RenameLevel> = nodes
            .iter()
            .map(|&w| {
                let base = &inc.label(w).expect("labelled").base;
                let mut targets = bo[base].clone();
                targets.sort_by_key(|&u| other.label(u).map(|l| l.ordinal));
                let mut options: Vec<RenameOption> = targets
                    .into_iter()
                    .map(|u| RenameOption { node: w, target: Some(u), target_label: other.display(u) })
                    .collect();
                options.push(RenameOption { node: w, target: None, target_label: inc.display(w) });
                RenameLevel { node: w, options }
            })
            .collect();
        let level_of = levels.iter().enumerate().map(|(i, l)| (l.node, i)).collect();
        RenameTree { incoming, levels, inc, other, fixed, level_of }
    }

    /// Number of root-to-leaf paths, ignoring the injectivity constraint.
    pub fn option_count(&self) -> u128 {
        option_count(self.levels.iter().map(|l| l.options.len() - 1))
    }

    fn counterpart(&self, x: VertexId, prefix: &[Option<VertexId>]) -> Option<VertexId> {
        match x {
            START | END => Some(x),
            _ => self.fixed.get(&x).copied().or_else(|| {
                let &j = self.level_of.get(&x)?;
                prefix.get(j).copied().flatten()
            }),
        }
    }

    /// New common arcs created by matching level `i`'s vertex to `target`,
    /// given the choices in `prefix` (levels `0..i`).
    pub fn gain(&self, prefix: &[Option<VertexId>], i: usize, target: Option<VertexId>) -> usize {
        let Some(t) = target else { return 0 };
        let w = self.levels[i].node;
        let outs = self.inc.successors(w).iter().filter_map(|&x| self.counterpart(x, prefix)).filter(|&y| self.other.has_arc(t, y));
        let ins = self.inc.predecessors(w).iter().filter_map(|&x| self.counterpart(x, prefix)).filter(|&y| self.other.has_arc(y, t));
        outs.count() + ins.count()
    }

    /// Options at level `i` whose target is not taken earlier in `prefix`.
    fn valid(&self, prefix: &[Option<VertexId>], i: usize) -> impl Iterator<Item = Option<VertexId>> + '_ {
        let used: BTreeSet<VertexId> = prefix.iter().flatten().copied().collect();
        self.levels[i].options.iter().map(|o| o.target).filter(move |t| t.is_none_or(|u| !used.contains(&u)))
    }

    /// Tie-break rank, smaller first: match the parent's index, then lowest
    /// index, unchanged last.
    fn rank(&self, parent: Option<Option<VertexId>>, target: Option<VertexId>) -> Rank {
        let ord = |u: VertexId| self.other.label(u).map_or(0, |l| l.ordinal);
        match target {
            None => (true, true, 0),
            Some(u) => {
                let matches = matches!(parent, Some(Some(p)) if ord(p) == ord(u));
                (!matches, false, ord(u))
            }
        }
    }

    /// Every injective assignment; intended for small trees.
    pub fn all_plans(&self) -> Vec<RenamePlan> {
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.enumerate(&mut prefix, 0, &mut out);
        out
    }

    fn enumerate(&self, prefix: &mut Vec<Option<VertexId>>, gain: usize, out: &mut Vec<RenamePlan>) {
        let i = prefix.len();
        if i == self.levels.len() {
            out.push(RenamePlan { choices: prefix.clone(), total_gain: gain });
            return;
        }
        for t in self.valid(prefix, i).collect::<Vec<_>>() {
            let g = self.gain(prefix, i, t);
            prefix.push(t);
            self.enumerate(prefix, gain + g, out);
            prefix.pop();
        }
    }

    /// Chosen display label (in the other model, or unchanged) per incoming
    /// vertex on the plan's path.
    pub fn labels(&self, plan: &RenamePlan) -> BTreeMap<VertexId, String> {
        self.levels
            .iter()
            .zip(&plan.choices)
            .map(|(l, c)| (l.node, c.map_or_else(|| self.inc.display(l.node), |u| self.other.display(u))))
            .collect()
    }

    /// Atomic key of each incoming vertex under `plan`.
    fn incoming_keys(&self, plan: &RenamePlan) -> impl FnMut(VertexId) -> VertexLabel + '_ {
        let chosen: HashMap<VertexId, Option<VertexId>> =
            self.levels.iter().zip(&plan.choices).map(|(l, &c)| (l.node, c)).collect();
        move |w| {
            let own = self.inc.label(w).expect("labelled").clone();
            let matched = self.fixed.get(&w).copied().or_else(|| chosen.get(&w).copied().flatten());
            match matched {
                Some(u) => self.other.label(u).expect("labelled").clone(),
                None if chosen.contains_key(&w) => VertexLabel::indexed(own.base, FRESH + w as u32),
                None => own,
            }
        }
    }
}

/// Product of (family size + 1) over the renameable vertices.
pub fn option_count(family_sizes: impl IntoIterator<Item = usize>) -> u128 {
    family_sizes.into_iter().map(|s| s as u128 + 1).product()
}

/// Vertices of the incoming model that have a choice to make, in tree order.
pub fn renameable_nodes(m1: &Dfg, m2: &Dfg) -> Vec<VertexId> {
    RenameTree::new(m1, m2).levels.iter().map(|l| l.node).collect()
}

impl RenameTree<'_> {
    /// Greedy descent: take the best-scoring option per level. When a whole
    /// level scores zero, look ahead to the first deeper level where some
    /// path scores, and take that path.
    pub fn greedy(&self) -> RenamePlan {
        let mut chosen: Vec<Option<VertexId>> = Vec::new();
        let mut total = 0;
        while chosen.len() < self.levels.len() {
            let i = chosen.len();
            let parent = chosen.last().copied();
            let best = self
                .valid(&chosen, i)
                .map(|t| (self.gain(&chosen, i, t), t))
                .min_by_key(|&(g, t)| (std::cmp::Reverse(g), self.rank(parent, t)))
                .expect("unchanged is always valid");
            if best.0 == 0 && i + 1 < self.levels.len() {
                if let Some((path, g)) = self.lookahead(&chosen) {
                    total += g;
                    chosen.extend(path);
                    continue;
                }
            }
            total += best.0;
            chosen.push(best.1);
        }
        RenamePlan { choices: chosen, total_gain: total }
    }

    /// Breadth-first over zero-scoring paths below `chosen`; returns the
    /// path reaching the best positive score at the shallowest depth.
    fn lookahead(&self, chosen: &[Option<VertexId>]) -> Option<(Vec<Option<VertexId>>, usize)> {
        let start = chosen.len();
        let mut frontier: Vec<Vec<Option<VertexId>>> = vec![Vec::new()];
        let mut prefix = chosen.to_vec();
        for depth in 0..self.levels.len() - start {
            let i = start + depth;
            let mut next = Vec::new();
            let mut best: Option<(usize, Vec<Rank>, Vec<Option<VertexId>>)> = None;
            for path in &frontier {
                prefix.truncate(start);
                prefix.extend(path);
                for t in self.valid(&prefix, i).collect::<Vec<_>>() {
                    let g = self.gain(&prefix, i, t);
                    let mut p = path.clone();
                    p.push(t);
                    if g > 0 {
                        let ranks = self.path_ranks(chosen.last().copied(), &p);
                        let better = best.as_ref().is_none_or(|(bg, br, _)| g > *bg || (g == *bg && ranks < *br));
                        if better {
                            best = Some((g, ranks, p));
                        }
                    } else {
                        next.push(p);
                    }
                }
            }
            if let Some((g, _, p)) = best {
                return Some((p, g));
            }
            if next.len() > LOOKAHEAD_LIMIT || depth + 1 == self.levels.len() - start {
                return None;
            }
            frontier = next;
        }
        None
    }

    fn path_ranks(&self, mut parent: Option<Option<VertexId>>, path: &[Option<VertexId>]) -> Vec<Rank> {
        path.iter()
            .map(|&t| {
                let r = self.rank(parent, t);
                parent = Some(t);
                r
            })
            .collect()
    }
}

pub fn greedy_rename(m1: &Dfg, m2: &Dfg) -> RenamePlan {
    RenameTree::new(m1, m2).greedy()
}

/// Relabels the incoming model per `plan`, then merges.
pub fn merge_with_plan(
    m1: &Dfg,
    m2: &Dfg,
    tree: &RenameTree<'_>,
    plan: &RenamePlan,
    mode: MergeMode,
    fvs_budget: u64,
) -> Result<MergedModel, MergeError> {
    let (k1, k2) = match tree.incoming {
        Incoming::First => (Keyed::with_keys(m1, tree.incoming_keys(plan)), Keyed::plain(m2)),
        Incoming::Second => (Keyed::plain(m1), Keyed::with_keys(m2, tree.incoming_keys(plan))),
    };
    let merged = keyed_merge(&k1, &k2, mode, fvs_budget)?;
    Ok(pair_result(m1, m2, merged))
}

/// Merges two acyclic models that may contain duplicated labels.
pub fn merge_with_duplicates(m1: &Dfg, m2: &Dfg, mode: MergeMode, fvs_budget: u64) -> Result<MergedModel, MergeError> {
    let tree = RenameTree::new(m1, m2);
    let plan = tree.greedy();
    merge_with_plan(m1, m2, &tree, &plan, mode, fvs_budget)
}

/// Left fold of [`merge_with_duplicates`] over `models` in the given order.
/// Rename map sources are indices into `models`.
pub fn merge_in_order(models: &[Dfg], order: &[usize], mode: MergeMode, fvs_budget: u64) -> Result<MergedModel, MergeError> {
    let mut seen = vec![false; models.len()];
    if order.len() != models.len() || order.iter().any(|&k| k >= models.len() || std::mem::replace(&mut seen[k], true)) {
        return Err(MergeError::BadOrder(models.len()));
    }
    let Some(&first) = order.first() else { return Err(MergeError::NoModels) };
    if let Some(k) = (0..models.len()).find(|&k| !is_acyclic(&models[k])) {
        return Err(MergeError::CyclicInput(k));
    }
    let mut acc = MergedModel {
        model: models[first].clone(),
        rename_map: RenameMap::identity(first, &models[first]),
        merged_labels: BTreeSet::new(),
        steps: Vec::new(),
    };
    for &k in &order[1..] {
        let r = merge_with_duplicates(&acc.model, &models[k], mode, fvs_budget)?;
        let forward = |l: &String| r.rename_map.get(0, l).expect("every vertex is mapped").to_string();
        let mut map = RenameMap::default();
        for (&src, labels) in &acc.rename_map.0 {
            map.0.insert(src, labels.iter().map(|(o, c)| (o.clone(), forward(c))).collect());
        }
        map.0.insert(k, r.rename_map.source(1).cloned().unwrap_or_default());
        let mut merged_labels: BTreeSet<String> = acc.merged_labels.iter().map(forward).collect();
        merged_labels.extend(r.merged_labels);
        let mut steps = std::mem::take(&mut acc.steps);
        steps.extend(r.steps);
        acc = MergedModel { model: r.model, rename_map: map, merged_labels, steps };
    }
    Ok(acc)
}

pub fn merge_many(models: &[Dfg], mode: MergeMode, fvs_budget: u64) -> Result<MergedModel, MergeError> {
    let order: Vec<usize> = (0..models.len()).collect();
    merge_in_order(models, &order, mode, fvs_budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfg::{discover_dfg, perfectly_fits};
    use crate::event_log::EventLog;
    use crate::fixtures;
    use crate::merge::merge_pair;

    fn dfg(seqs: &[&[&str]]) -> Dfg {
        discover_dfg(&EventLog::from_sequences(seqs).unwrap()).unwrap()
    }

    #[test]
    fn duplicate_families_tree_shape() {
        let (m1, m2) = fixtures::duplicate_models();
        let tree = RenameTree::new(&m1, &m2);
        assert_eq!(tree.incoming, Incoming::Second);
        let names: Vec<String> = renameable_nodes(&m1, &m2).iter().map(|&v| m2.display(v)).collect();
        assert_eq!(names, ["K", "L", "N", "P"]);
        assert_eq!(tree.option_count(), 81);
        assert_eq!(tree.all_plans().len(), 81);
    }

    #[test]
    fn duplicate_families_first_level_is_all_zero_and_lookahead_picks_first_copies() {
        let (m1, m2) = fixtures::duplicate_models();
        let tree = RenameTree::new(&m1, &m2);
        let zero: Vec<usize> = tree.levels[0].options.iter().map(|o| tree.gain(&[], 0, o.target)).collect();
        assert_eq!(zero, [0, 0, 0]);
        let plan = tree.greedy();
        let labels: Vec<String> = tree.labels(&plan).into_values().collect();
        let mut sorted = labels.clone();
        sorted.sort();
        assert_eq!(sorted, ["K.1", "L.1", "N.1", "P.1"]);
        let k1 = tree.levels[0].options[0].target;
        assert_eq!(tree.gain(&[k1], 1, tree.levels[1].options[0].target), 1);
    }

    #[test]
    fn duplicate_families_greedy_matches_exhaustive_optimum() {
        let (m1, m2) = fixtures::duplicate_models();
        let tree = RenameTree::new(&m1, &m2);
        let fused = |p: &RenamePlan| merge_with_plan(&m1, &m2, &tree, p, MergeMode::Accurate, 10_000).unwrap().merged_labels.len();
        let best = tree.all_plans().iter().map(fused).max().unwrap();
        let greedy = tree.greedy();
        assert_eq!(fused(&greedy), best);
        let unchanged = RenamePlan { choices: vec![None; 4], total_gain: 0 };
        assert!(greedy.total_gain >= unchanged.total_gain);
        let r = merge_with_duplicates(&m1, &m2, MergeMode::Accurate, 10_000).unwrap();
        assert!(is_acyclic(&r.model));
        for l in ["A", "B", "C", "D", "E", "F"] {
            assert!(r.merged_labels.contains(l), "{l}");
        }
    }

    #[test]
    fn parent_index_breaks_ties() {
        // Incoming chain A -> B; other model has A.1 -> B.1, A.1 -> B.2 and
        // a second copy A.2 feeding both B copies too.
        let act = |s: &str| Activity::new(s).unwrap();
        let mut b = crate::dfg::DfgBuilder::new();
        let a1 = b.add_vertex(VertexLabel::indexed(act("A"), 1));
        let a2 = b.add_vertex(VertexLabel::indexed(act("A"), 2));
        let b1 = b.add_vertex(VertexLabel::indexed(act("B"), 1));
        let b2 = b.add_vertex(VertexLabel::indexed(act("B"), 2));
        let x = b.add_vertex(VertexLabel::plain(act("X")));
        for (u, v) in [(START, a1), (START, x), (x, a2), (a1, b1), (a1, b2), (a2, b1), (a2, b2), (b1, END), (b2, END)] {
            b.add_arc(u, v, 1);
        }
        let other = b.build().unwrap().0;
        let inc = dfg(&[&["A", "B"]]);
        let tree = RenameTree::new(&other, &inc);
        let plan = tree.greedy();
        let labels: Vec<String> = tree.labels(&plan).into_values().collect();
        assert_eq!(labels, ["A.1", "B.1"]);
    }

    #[test]
    fn single_level_argmax() {
        // X is duplicated in the other model; only X.2 shares both arcs.
        let act = |s: &str| Activity::new(s).unwrap();
        let mut b = crate::dfg::DfgBuilder::new();
        let x1 = b.add_vertex(VertexLabel::indexed(act("X"), 1));
        let x2 = b.add_vertex(VertexLabel::indexed(act("X"), 2));
        let y = b.add_vertex(VertexLabel::plain(act("Y")));
        for (u, v) in [(START, x1), (x1, END), (START, x2), (x2, y), (y, END)] {
            b.add_arc(u, v, 1);
        }
        let other = b.build().unwrap().0;
        let inc = dfg(&[&["X", "Y"]]);
        let tree = RenameTree::new(&other, &inc);
        let gains: Vec<usize> = tree.levels[0].options.iter().map(|o| tree.gain(&[], 0, o.target)).collect();
        assert_eq!(gains, [1, 2, 0]);
        assert_eq!(tree.labels(&tree.greedy()).into_values().collect::<Vec<_>>(), ["X.2"]);
    }

    #[test]
    fn no_duplicates_matches_merge_pair() {
        let (m1, m2) = fixtures::worked_models();
        assert!(renameable_nodes(&m1, &m2).is_empty());
        assert_eq!(RenameTree::new(&m1, &m2).option_count(), 1);
        for mode in [MergeMode::Naive, MergeMode::Accurate] {
            assert_eq!(merge_with_duplicates(&m1, &m2, mode, 1000).unwrap(), merge_pair(&m1, &m2, mode, 1000).unwrap());
        }
    }

    #[test]
    fn option_counts() {
        assert_eq!(option_count([]), 1);
        assert_eq!(option_count([2]), 3);
        assert_eq!(option_count([2, 2, 2, 2]), 81);
    }

    #[test]
    fn folding_models() {
        let (l1, l2) = fixtures::worked_logs();
        let (m1, m2) = fixtures::worked_models();
        let single = merge_many(std::slice::from_ref(&m1), MergeMode::Accurate, 100).unwrap();
        assert_eq!(single.model, m1);
        assert_eq!(single.rename_map, RenameMap::identity(0, &m1));

        let twice = merge_many(&[m1.clone(), m1.clone()], MergeMode::Accurate, 100).unwrap();
        assert!(twice.model.same_shape(&m1));

        let l3 = EventLog::from_sequences(&[&["F", "G", "H", "E"], &["J", "K"]]).unwrap();
        let m3 = discover_dfg(&l3).unwrap();
        let models = [m1, m2, m3];
        let r = merge_many(&models, MergeMode::Accurate, 10_000).unwrap();
        assert!(is_acyclic(&r.model));
        let total: usize = models.iter().map(Dfg::node_count).sum();
        assert_eq!(r.model.node_count(), total - r.fused_total());
        for (i, l) in [&l1, &l2, &l3].into_iter().enumerate() {
            let renamed = crate::conformance::rename_log(l, r.rename_map.source(i).unwrap(), &r.model).unwrap();
            assert!(perfectly_fits(&r.model, &renamed), "source {i}");
        }
        let rev = merge_in_order(&models, &[2, 0, 1], MergeMode::Accurate, 10_000).unwrap();
        assert!(is_acyclic(&rev.model));
        assert_eq!(rev.rename_map.0.keys().copied().collect::<Vec<_>>(), [0, 1, 2]);
        assert!(matches!(merge_in_order(&models, &[0, 0, 1], MergeMode::Naive, 10), Err(MergeError::BadOrder(3))));
        assert_eq!(merge_many(&[], MergeMode::Naive, 10).unwrap_err(), MergeError::NoModels);
    }
}
