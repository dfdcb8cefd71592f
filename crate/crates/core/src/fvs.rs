//! Exact minimum directed feedback vertex set by bounded search.
//!
//! Each search node first applies the classic reductions:
//!
//! * a vertex with a self-loop must be in the solution;
//! * a vertex with no predecessor or no successor lies on no cycle and is
//!   dropped;
//! * a vertex with a single predecessor (or successor) is bypassed: its
//!   arcs are rerouted through that neighbour, which then dominates it.
//!
//! What remains is split into strongly connected components, each solved by
//! iterative deepening on the solution size, branching over the vertices of
//! a shortest cycle. A greedy packing of vertex-disjoint cycles gives the
//! lower bound used for pruning.

use std::collections::{BTreeSet, VecDeque};

/// Plain digraph over ids `0..n`. Self-loops are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Digraph {
    succ: Vec<BTreeSet<usize>>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph { succ: vec![BTreeSet::new(); n] }
    }

    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Digraph::new(n);
        for (u, v) in arcs {
            g.add_arc(u, v);
        }
        g
    }

    pub fn add_arc(&mut self, u: usize, v: usize) {
        assert!(u < self.succ.len() && v < self.succ.len(), "arc endpoint out of range");
        self.succ[u].insert(v);
    }

    pub fn node_count(&self) -> usize {
        self.succ.len()
    }

    pub fn arc_count(&self) -> usize {
        self.succ.iter().map(BTreeSet::len).sum()
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.succ[u].contains(&v)
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(u, s)| s.iter().map(move |&v| (u, v)))
    }

    /// Acyclicity of the subgraph induced by nodes not in `removed`.
    pub fn is_acyclic_without(&self, removed: &BTreeSet<usize>) -> bool {
        let n = self.node_count();
        let alive: Vec<bool> = (0..n).map(|v| !removed.contains(&v)).collect();
        let mut indeg = vec![0usize; n];
        for (u, v) in self.arcs() {
            if alive[u] && alive[v] {
                indeg[v] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| alive[v] && indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(u) = stack.pop() {
            seen += 1;
            for &v in &self.succ[u] {
                if alive[v] {
                    indeg[v] -= 1;
                    if indeg[v] == 0 {
                        stack.push(v);
                    }
                }
            }
        }
        seen == alive.iter().filter(|&&a| a).count()
    }

    pub fn is_acyclic(&self) -> bool {
        self.is_acyclic_without(&BTreeSet::new())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FvsResult {
    pub removed: BTreeSet<usize>,
    /// False when the budget ran out and the set was completed greedily.
    pub optimal: bool,
    pub explored_nodes: u64,
}

/// Working copy used during search: alive vertices with both adjacency
/// directions.
#[derive(Clone)]
struct Work {
    alive: Vec<bool>,
    succ: Vec<BTreeSet<usize>>,
    pred: Vec<BTreeSet<usize>>,
}

impl Work {
    fn from_graph(g: &Digraph) -> Self {
        let n = g.node_count();
        let mut pred = vec![BTreeSet::new(); n];
        for (u, v) in g.arcs() {
            pred[v].insert(u);
        }
        Work { alive: vec![true; n], succ: g.succ.clone(), pred }
    }

    fn alive_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.alive.iter().enumerate().filter(|(_, &a)| a).map(|(v, _)| v)
    }

    fn is_empty(&self) -> bool {
        !self.alive.iter().any(|&a| a)
    }

    fn remove(&mut self, v: usize) {
        self.alive[v] = false;
        for u in std::mem::take(&mut self.pred[v]) {
            self.succ[u].remove(&v);
        }
        for w in std::mem::take(&mut self.succ[v]) {
            self.pred[w].remove(&v);
        }
    }

    fn add_arc(&mut self, u: usize, v: usize) {
        self.succ[u].insert(v);
        self.pred[v].insert(u);
    }

    /// Applies the reductions to a fixpoint; returns vertices forced into
    /// the solution.
    fn reduce(&mut self) -> Vec<usize> {
        let mut forced = Vec::new();
        loop {
            let mut changed = false;
            // Self-loops.
            let looped: Vec<usize> = self.alive_nodes().filter(|&v| self.succ[v].contains(&v)).collect();
            for v in looped {
                forced.push(v);
                self.remove(v);
                changed = true;
            }
            // Sources and sinks, to a fixpoint.
            let mut queue: Vec<usize> =
                self.alive_nodes().filter(|&v| self.pred[v].is_empty() || self.succ[v].is_empty()).collect();
            while let Some(v) = queue.pop() {
                if !self.alive[v] {
                    continue;
                }
                let nbrs: Vec<usize> = self.pred[v].iter().chain(self.succ[v].iter()).copied().collect();
                self.remove(v);
                changed = true;
                for u in nbrs {
                    if self.alive[u] && (self.pred[u].is_empty() || self.succ[u].is_empty()) {
                        queue.push(u);
                    }
                }
            }
            // Bypass one vertex with a single in- or out-neighbour, largest id
            // first, then start over so that self-loops are caught.
            let bypass = self
                .alive_nodes()
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .find(|&v| self.pred[v].len() == 1 || self.succ[v].len() == 1);
            if let Some(v) = bypass {
                if self.pred[v].len() == 1 {
                    let p = *self.pred[v].iter().next().expect("one predecessor");
                    let outs: Vec<usize> = self.succ[v].iter().copied().collect();
                    self.remove(v);
                    for s in outs {
                        self.add_arc(p, s);
                    }
                } else {
                    let s = *self.succ[v].iter().next().expect("one successor");
                    let ins: Vec<usize> = self.pred[v].iter().copied().collect();
                    self.remove(v);
                    for p in ins {
                        self.add_arc(p, s);
                    }
                }
                changed = true;
            }
            if !changed {
                return forced;
            }
        }
    }

    /// A shortest cycle; among equal lengths, the one found from the
    /// smallest start vertex. Assumes no self-loops.
    fn shortest_cycle(&self) -> Option<Vec<usize>> {
        for u in self.alive_nodes() {
            if let Some(&v) = self.succ[u].iter().find(|&&v| v > u && self.succ[v].contains(&u)) {
                return Some(vec![u, v]);
            }
        }
        let n = self.alive.len();
        let mut best: Option<Vec<usize>> = None;
        for s in self.alive_nodes() {
            // BFS from s; the first arc back into s closes its shortest cycle.
            let mut parent = vec![usize::MAX; n];
            let mut dist = vec![usize::MAX; n];
            dist[s] = 0;
            let mut q = VecDeque::from([s]);
            let mut closing = None;
            'bfs: while let Some(u) = q.pop_front() {
                if best.as_ref().is_some_and(|b| dist[u] + 1 >= b.len()) {
                    break;
                }
                for &w in &self.succ[u] {
                    if w == s {
                        closing = Some(u);
                        break 'bfs;
                    }
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        parent[w] = u;
                        q.push_back(w);
                    }
                }
            }
            if let Some(mut u) = closing {
                let mut cyc = vec![u];
                while u != s {
                    u = parent[u];
                    cyc.push(u);
                }
                if best.as_ref().is_none_or(|b| cyc.len() < b.len()) {
                    best = Some(cyc);
                }
            }
        }
        best
    }

    /// Size of a greedy packing of vertex-disjoint cycles.
    fn lower_bound(&self) -> usize {
        let mut used = vec![false; self.alive.len()];
        let mut count = 0;
        for u in self.alive_nodes() {
            if used[u] {
                continue;
            }
            if let Some(&v) = self.succ[u].iter().find(|&&v| !used[v] && v != u && self.succ[v].contains(&u)) {
                used[u] = true;
                used[v] = true;
                count += 1;
            }
        }
        // Longer cycles among the rest, found by DFS.
        loop {
            match self.find_cycle_avoiding(&used) {
                Some(c) => {
                    for v in c {
                        used[v] = true;
                    }
                    count += 1;
                }
                None => return count,
            }
        }
    }

    fn find_cycle_avoiding(&self, used: &[bool]) -> Option<Vec<usize>> {
        let n = self.alive.len();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; n];
        for root in self.alive_nodes() {
            if used[root] || state[root] != 0 {
                continue;
            }
            let mut path = vec![root];
            let mut iters: Vec<std::collections::btree_set::Iter<'_, usize>> = vec![self.succ[root].iter()];
            state[root] = 1;
            while let Some(it) = iters.last_mut() {
                match it.next() {
                    Some(&w) if used[w] || !self.alive[w] => {}
                    Some(&w) if state[w] == 1 => {
                        let at = path.iter().position(|&x| x == w).expect("on stack");
                        return Some(path[at..].to_vec());
                    }
                    Some(&w) if state[w] == 0 => {
                        state[w] = 1;
                        path.push(w);
                        iters.push(self.succ[w].iter());
                    }
                    Some(_) => {}
                    None => {
                        let v = path.pop().expect("path");
                        state[v] = 2;
                        iters.pop();
                    }
                }
            }
        }
        None
    }

    /// Nontrivial strongly connected components, each as a separate Work.
    fn components(&self) -> Vec<Work> {
        let n = self.alive.len();
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|v| if self.alive[v] { self.succ[v].iter().copied().collect() } else { Vec::new() })
            .collect();
        let mut comps = tarjan(&adj, &self.alive);
        comps.retain(|c| c.len() > 1);
        for c in &mut comps {
            c.sort_unstable();
        }
        comps.sort();
        comps
            .into_iter()
            .map(|c| {
                let mut w = Work { alive: vec![false; n], succ: vec![BTreeSet::new(); n], pred: vec![BTreeSet::new(); n] };
                for &v in &c {
                    w.alive[v] = true;
                }
                for &v in &c {
                    for &x in &self.succ[v] {
                        if w.alive[x] {
                            w.add_arc(v, x);
                        }
                    }
                }
                w
            })
            .collect()
    }
}

fn tarjan(adj: &[Vec<usize>], alive: &[bool]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if !alive[root] || index[root] != usize::MAX {
            continue;
        }
        let mut call = vec![(root, 0usize)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(comp);
                }
            }
        }
    }
    out
}

enum Outcome {
    Found(Vec<usize>),
    NotFound,
    Aborted,
}

struct Search {
    explored: u64,
    budget: u64,
}

impl Search {
    /// Looks for a solution of size at most `k`.
    fn within(&mut self, w: &Work, k: usize) -> Outcome {
        self.explored += 1;
        if self.explored > self.budget {
            return Outcome::Aborted;
        }
        let mut w = w.clone();
        let mut sol = w.reduce();
        if sol.len() > k {
            return Outcome::NotFound;
        }
        let k = k - sol.len();
        if w.is_empty() {
            return Outcome::Found(sol);
        }
        if k == 0 || w.lower_bound() > k {
            return Outcome::NotFound;
        }
        let mut cycle = w.shortest_cycle().expect("reduced nonempty graph has a cycle");
        cycle.sort_unstable();
        for v in cycle {
            let mut child = w.clone();
            child.remove(v);
            match self.within(&child, k - 1) {
                Outcome::Found(rest) => {
                    sol.push(v);
                    sol.extend(rest);
                    return Outcome::Found(sol);
                }
                Outcome::Aborted => return Outcome::Aborted,
                Outcome::NotFound => {}
            }
        }
        Outcome::NotFound
    }

    fn minimum(&mut self, w: &Work) -> Option<Vec<usize>> {
        let mut k = w.lower_bound();
        loop {
            match self.within(w, k) {
                Outcome::Found(s) => return Some(s),
                Outcome::NotFound => k += 1,
                Outcome::Aborted => return None,
            }
        }
    }
}

/// Repeatedly reduces, then removes the vertex with the largest
/// in-degree × out-degree (smallest id on ties).
fn greedy(w: &Work) -> Vec<usize> {
    let mut w = w.clone();
    let mut sol = Vec::new();
    loop {
        sol.extend(w.reduce());
        if w.is_empty() {
            return sol;
        }
        let v = w
            .alive_nodes()
            .max_by_key(|&v| (w.pred[v].len() * w.succ[v].len(), std::cmp::Reverse(v)))
            .expect("nonempty");
        sol.push(v);
        w.remove(v);
    }
}

/// Minimum feedback vertex set. `budget` caps the number of search nodes;
/// when it runs out the remaining components are solved greedily and
/// `optimal` is false.
pub fn min_fvs(graph: &Digraph, budget: u64) -> FvsResult {
    let mut search = Search { explored: 0, budget: budget.max(1) };
    let mut w = Work::from_graph(graph);
    let mut removed: BTreeSet<usize> = w.reduce().into_iter().collect();
    let mut optimal = true;
    for comp in w.components() {
        let part = if optimal { search.minimum(&comp) } else { None };
        match part {
            Some(s) => removed.extend(s),
            None => {
                optimal = false;
                removed.extend(greedy(&comp));
            }
        }
    }
    debug_assert!(graph.is_acyclic_without(&removed));
    FvsResult { removed, optimal, explored_nodes: search.explored }
}
