//! Maximum matching, H-packing and minimum edge cover.

use std::collections::VecDeque;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{local_components, Budget, Mode, SolveOptions, SolveResult, Witness};
use crate::error::{Error, Result};
use crate::geograph::{isolated_count, GeometricGraph};

const NONE: usize = usize::MAX;

/// A connected pattern graph `H` on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HPattern {
    pub name: String,
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl HPattern {
    pub fn new(name: &str, n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition("pattern needs at least two vertices".into()));
        }
        if edges.iter().any(|&(a, b)| a >= n || b >= n || a == b) {
            return Err(Error::Precondition("pattern edge out of range or loop".into()));
        }
        // Connectivity by repeated relaxation; patterns are tiny.
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut grew = true;
        while grew {
            grew = false;
            for &(a, b) in &edges {
                if seen[a] != seen[b] {
                    seen[a] = true;
                    seen[b] = true;
                    grew = true;
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Precondition(format!("pattern {name} is not connected")));
        }
        Ok(Self { name: name.to_string(), n, edges })
    }

    pub fn k2() -> Self {
        Self::new("K2", 2, vec![(0, 1)]).expect("valid")
    }

    pub fn k3() -> Self {
        Self::new("K3", 3, vec![(0, 1), (1, 2), (0, 2)]).expect("valid")
    }

    pub fn p3() -> Self {
        Self::new("P3", 3, vec![(0, 1), (1, 2)]).expect("valid")
    }

    /// Looks up a library pattern by name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_uppercase().as_str() {
            "K2" => Ok(Self::k2()),
            "K3" => Ok(Self::k3()),
            "P3" => Ok(Self::p3()),
            _ => Err(Error::Parse(format!("unknown pattern {name}"))),
        }
    }

    fn is_k2(&self) -> bool {
        self.n == 2
    }
}

/// Maximum matching of an arbitrary graph by Edmonds' blossom algorithm.
/// Returns the mate of each vertex (`usize::MAX` when unmatched).
pub(crate) fn max_matching(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut mate = vec![NONE; n];
    // Greedy start.
    for v in 0..n {
        if mate[v] == NONE {
            if let Some(&u) = adj[v].iter().find(|&&u| mate[u] == NONE) {
                mate[v] = u;
                mate[u] = v;
            }
        }
    }
    let mut b = Blossom {
        adj,
        mate,
        parent: vec![NONE; n],
        base: (0..n).collect(),
        used: vec![false; n],
        blossom: vec![false; n],
        queue: VecDeque::new(),
    };
    for v in 0..n {
        if b.mate[v] == NONE {
            let end = b.find_path(v);
            if end != NONE {
                b.augment(end);
            }
        }
    }
    b.mate
}

struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

impl Blossom<'_> {
    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.adj.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.blossom[self.base[v]] = true;
            self.blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn find_path(&mut self, root: usize) -> usize {
        let n = self.adj.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for k in 0..self.adj[v].len() {
                let to = self.adj[v][k];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return to;
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    self.queue.push_back(next);
                }
            }
        }
        NONE
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let ppv = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = ppv;
        }
    }
}

/// Maximum matching `ψ_{K₂}` with its edge set as witness.
pub fn matching_number(g: &GeometricGraph) -> SolveResult {
    let start = Instant::now();
    let edges = matching_edges(g);
    SolveResult::exact(edges.len(), Some(Witness::Edges(edges)), start)
}

fn matching_edges(g: &GeometricGraph) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for local in local_components(g) {
        if local.n() < 2 {
            continue;
        }
        let mate = max_matching(&local.adj);
        for (v, &u) in mate.iter().enumerate() {
            if u != NONE && v < u {
                let (a, b) = (local.verts[v], local.verts[u]);
                edges.push((a.min(b), a.max(b)));
            }
        }
    }
    edges.sort_unstable();
    edges
}

/// `ψ_H(G)`: maximum number of vertex-disjoint copies of `H`.
pub fn h_packing_number(g: &GeometricGraph, h: &HPattern, mode: Mode, opts: &SolveOptions) -> Result<SolveResult> {
    if h.is_k2() {
        let start = Instant::now();
        let edges = matching_edges(g);
        let packing = edges.iter().map(|&(a, b)| vec![a, b]).collect();
        return Ok(SolveResult::exact(edges.len(), Some(Witness::Packing(packing)), start));
    }
    h_packing_weighted(g, &[(h.clone(), 1.0)], mode, opts)
}

/// Maximum of `Σ v_i · (copies of H_i)` over vertex-disjoint copies drawn
/// from a pattern list.
pub fn h_packing_weighted(
    g: &GeometricGraph,
    patterns: &[(HPattern, f64)],
    mode: Mode,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    let start = Instant::now();
    if patterns.iter().any(|(_, v)| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Precondition("pattern values must be nonnegative".into()));
    }
    let mode = if patterns.iter().any(|(h, _)| h.n > 5) { Mode::Heuristic } else { mode };
    let mut budget = Budget::new(opts.node_limit);
    let (mut value, mut upper) = (0.0, 0.0);
    let mut copies = Vec::new();
    let mut aborted = false;
    for local in local_components(g) {
        let mut cands: Vec<(Vec<usize>, f64)> = Vec::new();
        for (h, v) in patterns {
            if *v > 0.0 {
                for s in connected_subsets(&local.adj, h.n) {
                    if embeds(&local.adj, &s, h) {
                        cands.push((s, *v));
                    }
                }
            }
        }
        if cands.is_empty() {
            continue;
        }
        let n = local.n();
        let ratio = cands.iter().map(|(s, v)| v / s.len() as f64).fold(0.0, f64::max);
        let greedy = greedy_packing(n, &cands);
        let mut best = greedy.clone();
        let mut comp_upper = ratio * n as f64;
        if mode == Mode::Exact {
            let mut s = PackingSearch {
                n,
                by_min: {
                    let mut by_min = vec![Vec::new(); n];
                    for (i, (c, _)) in cands.iter().enumerate() {
                        by_min[c[0]].push(i);
                    }
                    by_min
                },
                cands: &cands,
                ratio,
                integral: cands.iter().all(|(_, v)| v.fract() == 0.0),
                coverable: {
                    let mut c = vec![false; n];
                    cands.iter().flat_map(|(s, _)| s).for_each(|&v| c[v] = true);
                    c
                },
                used: vec![false; n],
                chosen: Vec::new(),
                best_value: pack_value(&cands, &greedy),
                best: greedy,
                budget: &mut budget,
                aborted: false,
            };
            s.search(0, 0.0);
            aborted |= s.aborted;
            best = s.best;
            if !s.aborted {
                comp_upper = pack_value(&cands, &best);
            }
        }
        let val = pack_value(&cands, &best);
        value += val;
        upper += comp_upper.max(val);
        copies.extend(best.iter().map(|&i| local.to_global(&cands[i].0)));
    }
    if aborted {
        return Err(Error::BudgetExceeded { nodes: budget.used, lower: value, upper });
    }
    copies.sort();
    Ok(SolveResult::bounded(
        value,
        value,
        if mode == Mode::Exact { value } else { upper },
        Some(Witness::Packing(copies)),
        start,
    ))
}

fn pack_value(cands: &[(Vec<usize>, f64)], chosen: &[usize]) -> f64 {
    chosen.iter().map(|&i| cands[i].1).sum()
}

fn greedy_packing(n: usize, cands: &[(Vec<usize>, f64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..cands.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = cands[a].1 / cands[a].0.len() as f64;
        let rb = cands[b].1 / cands[b].0.len() as f64;
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut used = vec![false; n];
    let mut out = Vec::new();
    for i in order {
        if cands[i].0.iter().all(|&v| !used[v]) {
            cands[i].0.iter().for_each(|&v| used[v] = true);
            out.push(i);
        }
    }
    out
}

struct PackingSearch<'a, 'b> {
    n: usize,
    by_min: Vec<Vec<usize>>,
    cands: &'a [(Vec<usize>, f64)],
    ratio: f64,
    /// All values are integers, so bounds may be rounded down.
    integral: bool,
    /// Vertices lying in at least one candidate copy.
    coverable: Vec<bool>,
    used: Vec<bool>,
    chosen: Vec<usize>,
    best: Vec<usize>,
    best_value: f64,
    budget: &'b mut Budget,
    aborted: bool,
}

impl PackingSearch<'_, '_> {
    fn search(&mut self, from: usize, value: f64) {
        if !self.budget.tick() {
            self.aborted = true;
            return;
        }
        let Some(p) = (from..self.n).find(|&v| !self.used[v]) else {
            if value > self.best_value + 1e-12 {
                self.best_value = value;
                self.best = self.chosen.clone();
            }
            return;
        };
        let free = (p..self.n).filter(|&v| !self.used[v] && self.coverable[v]).count();
        let mut gain = self.ratio * free as f64;
        if self.integral {
            gain = (gain + 1e-9).floor();
        }
        if value + gain <= self.best_value + 1e-12 {
            return;
        }
        for k in 0..self.by_min[p].len() {
            let i = self.by_min[p][k];
            let (set, v) = &self.cands[i];
            if set.iter().all(|&u| !self.used[u]) {
                set.iter().for_each(|&u| self.used[u] = true);
                self.chosen.push(i);
                self.search(p + 1, value + v);
                self.chosen.pop();
                set.iter().for_each(|&u| self.used[u] = false);
                if self.aborted {
                    return;
                }
            }
        }
        // Leave p uncovered.
        self.used[p] = true;
        self.search(p + 1, value);
        self.used[p] = false;
    }
}

/// Connected vertex subsets of size `k`, each sorted, enumerated once
/// (ESU enumeration).
pub(crate) fn connected_subsets(adj: &[Vec<usize>], k: usize) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    for v in 0..n {
        let ext: Vec<usize> = adj[v].iter().copied().filter(|&u| u > v).collect();
        extend(adj, &mut vec![v], ext, v, k, &mut out);
    }
    for s in &mut out {
        s.sort_unstable();
    }
    out
}

fn extend(
    adj: &[Vec<usize>],
    sub: &mut Vec<usize>,
    mut ext: Vec<usize>,
    v: usize,
    k: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if sub.len() == k {
        out.push(sub.clone());
        return;
    }
    while let Some(w) = ext.pop() {
        let mut next = ext.clone();
        for &u in &adj[w] {
            if u > v && !sub.contains(&u) && !next.contains(&u) && u != w && !sub.iter().any(|&s| adj[s].contains(&u)) {
                next.push(u);
            }
        }
        sub.push(w);
        extend(adj, sub, next, v, k, out);
        sub.pop();
    }
}

/// Whether the vertices `set` (sorted, `|set| = h.n`) carry a copy of `h`.
fn embeds(adj: &[Vec<usize>], set: &[usize], h: &HPattern) -> bool {
    let mut perm: Vec<usize> = (0..set.len()).collect();
    let edge = |a: usize, b: usize| adj[set[a]].binary_search(&set[b]).is_ok();
    loop {
        if h.edges.iter().all(|&(a, b)| edge(perm[a], perm[b])) {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// `η(G)`: minimum number of edges covering every non-isolated vertex,
/// `|V| − ψ_{K₂} − σ`.
pub fn edge_cover_number(g: &GeometricGraph) -> SolveResult {
    let start = Instant::now();
    let matching = matching_edges(g);
    let mut covered = vec![false; g.n()];
    for &(a, b) in &matching {
        covered[a] = true;
        covered[b] = true;
    }
    let mut edges = matching.clone();
    for v in 0..g.n() {
        if !covered[v] {
            if let Some(&u) = g.neighbors(v).first() {
                edges.push((v.min(u), v.max(u)));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let value = g.n() - matching.len() - isolated_count(g);
    debug_assert_eq!(value, edges.len());
    SolveResult::exact(value, Some(Witness::Edges(edges)), start)
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::*;

    #[test]
    fn small_cases() {
        let o = SolveOptions::default();
        let k2 = HPattern::k2();
        assert_eq!(h_packing_number(&path3(), &k2, Mode::Exact, &o).unwrap().value, 1.0);
        let k3 = HPattern::k3();
        assert_eq!(h_packing_number(&complete(7), &k3, Mode::Exact, &o).unwrap().value, 2.0);
        assert_eq!(edge_cover_number(&complete(4)).value, 2.0);
        let g = line(&[0.0, 0.5, 5.0], 1.0);
        assert_eq!(edge_cover_number(&g).value, 1.0);
    }

    #[test]
    fn blossom_on_odd_cycle_with_tail() {
        // Triangle 0-1-2, path 2-3-4 and pendant 5 on 0: perfect matching
        // 0-5, 1-2, 3-4 requires leaving the greedy start.
        let adj = vec![vec![1, 2, 5], vec![0, 2], vec![0, 1, 3], vec![2, 4], vec![3], vec![0]];
        let mate = max_matching(&adj);
        assert_eq!(mate.iter().filter(|&&m| m != NONE).count(), 6);
    }

    #[test]
    fn esu_counts_connected_triples_of_a_path() {
        let adj = vec![vec![1], vec![0, 2], vec![1, 3], vec![2]];
        assert_eq!(connected_subsets(&adj, 3).len(), 2);
        assert_eq!(connected_subsets(&adj, 2).len(), 3);
    }

    #[test]
    fn invalid_patterns() {
        assert!(HPattern::new("split", 4, vec![(0, 1), (2, 3)]).is_err());
        assert!(HPattern::new("single", 1, vec![]).is_err());
    }
}
