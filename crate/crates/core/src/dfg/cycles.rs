//! Elementary circuit counting (Johnson, 1975) with a saturation cap.

/// Number of elementary circuits, or `Saturated(cap)` once the count reaches
/// the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleCount {
    Exact(u64),
    Saturated(u64),
}

impl CycleCount {
    pub fn is_zero(&self) -> bool {
        matches!(self, CycleCount::Exact(0))
    }
}

struct Johnson<'a> {
    adj: &'a [Vec<usize>],
    in_scc: Vec<bool>,
    blocked: Vec<bool>,
    block_map: Vec<Vec<usize>>,
    found: u64,
    cap: u64,
}

impl Johnson<'_> {
    fn unblock(&mut self, u: usize) {
        let mut work = vec![u];
        while let Some(x) = work.pop() {
            if self.blocked[x] {
                self.blocked[x] = false;
                work.append(&mut std::mem::take(&mut self.block_map[x]));
            }
        }
    }

    /// Returns true if a circuit through `start` was closed below `v`.
    fn circuit(&mut self, v: usize, start: usize) -> bool {
        if self.found >= self.cap {
            return true;
        }
        let mut closed = false;
        self.blocked[v] = true;
        for &w in &self.adj[v] {
            if !self.in_scc[w] {
                continue;
            }
            if w == start {
                self.found += 1;
                closed = true;
                if self.found >= self.cap {
                    break;
                }
            } else if !self.blocked[w] && self.circuit(w, start) {
                closed = true;
            }
            if self.found >= self.cap {
                break;
            }
        }
        if closed {
            self.unblock(v);
        } else {
            for &w in &self.adj[v] {
                if self.in_scc[w] && !self.block_map[w].contains(&v) {
                    self.block_map[w].push(v);
                }
            }
        }
        closed
    }
}

/// Strongly connected components of the subgraph induced by `alive`.
fn sccs(adj: &[Vec<usize>], alive: &[bool]) -> Vec<Vec<usize>> {
    // Iterative Tarjan.
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
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if !alive[w] {
                    continue;
                }
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

/// Counts elementary circuits of a digraph given as adjacency lists,
/// stopping at `cap`. Self-loops count as circuits.
pub fn count_elementary_circuits(adj: &[Vec<usize>], cap: u64) -> CycleCount {
    let cap = cap.max(1);
    let n = adj.len();
    let mut j = Johnson {
        adj,
        in_scc: vec![false; n],
        blocked: vec![false; n],
        block_map: vec![Vec::new(); n],
        found: 0,
        cap,
    };
    let mut alive = vec![true; n];
    for s in 0..n {
        // Component of `s` in the subgraph induced by vertices >= s.
        let comp = sccs(adj, &alive).into_iter().find(|c| c.contains(&s)).unwrap_or_default();
        let nontrivial = comp.len() > 1 || adj[s].contains(&s);
        if nontrivial {
            for &v in &comp {
                j.in_scc[v] = true;
                j.blocked[v] = false;
                j.block_map[v].clear();
            }
            j.circuit(s, s);
            for &v in &comp {
                j.in_scc[v] = false;
            }
            if j.found >= cap {
                return CycleCount::Saturated(cap);
            }
        }
        alive[s] = false;
    }
    CycleCount::Exact(j.found)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Enumerates circuits by brute force: every simple path starting at its
    /// minimum vertex that closes back to it.
    fn brute_force(adj: &[Vec<usize>]) -> u64 {
        fn walk(adj: &[Vec<usize>], start: usize, v: usize, on: &mut Vec<bool>) -> u64 {
            let mut c = 0;
            for &w in &adj[v] {
                if w == start {
                    c += 1;
                } else if w > start && !on[w] {
                    on[w] = true;
                    c += walk(adj, start, w, on);
                    on[w] = false;
                }
            }
            c
        }
        (0..adj.len())
            .map(|s| {
                let mut on = vec![false; adj.len()];
                on[s] = true;
                walk(adj, s, s, &mut on)
            })
            .sum()
    }

    #[test]
    fn small_cases() {
        assert_eq!(count_elementary_circuits(&[vec![1], vec![]], 10), CycleCount::Exact(0));
        assert_eq!(count_elementary_circuits(&[vec![1], vec![0]], 10), CycleCount::Exact(1));
        let k3 = vec![vec![1, 2], vec![0, 2], vec![0, 1]];
        assert_eq!(brute_force(&k3), 5);
        assert_eq!(count_elementary_circuits(&k3, 100), CycleCount::Exact(5));
        assert_eq!(count_elementary_circuits(&k3, 3), CycleCount::Saturated(3));
        assert_eq!(count_elementary_circuits(&[vec![0]], 10), CycleCount::Exact(1));
    }

    #[test]
    fn matches_brute_force_on_complete_digraphs() {
        for n in 1..=6 {
            let adj: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| j != i).collect()).collect();
            assert_eq!(count_elementary_circuits(&adj, u64::MAX), CycleCount::Exact(brute_force(&adj)), "K{n}");
        }
    }

    proptest::proptest! {
        #[test]
        fn matches_brute_force(n in 1usize..8, bits in proptest::collection::vec(proptest::bool::weighted(0.3), 64)) {
            let adj: Vec<Vec<usize>> = (0..n)
                .map(|i| (0..n).filter(|&j| bits[i * 8 + j]).collect())
                .collect();
            proptest::prop_assert_eq!(count_elementary_circuits(&adj, u64::MAX), CycleCount::Exact(brute_force(&adj)));
        }
    }
}
