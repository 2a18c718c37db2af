use std::collections::BinaryHeap;
use std::time::Instant;

use fixedbitset::FixedBitSet;

use super::line::IntervalOrder;
use super::{covering, local_components, Budget, Local, Mode, SolveOptions, SolveResult, Witness};
use crate::error::{Error, Result};
use crate::geograph::GeometricGraph;

/// `γ(G)`: minimum dominating set.
///
/// Heuristic mode returns the smaller of a greedy cover and the
/// covering-net construction, with a packing lower bound.
pub fn domination_number(g: &GeometricGraph, mode: Mode, opts: &SolveOptions) -> Result<SolveResult> {
    let start = Instant::now();
    let mut budget = Budget::new(opts.node_limit);
    let mut set = Vec::new();
    let (mut lower, mut upper) = (0usize, 0usize);
    let mut aborted = false;
    for local in local_components(g) {
        let c = gamma_component(g, &local, mode, &mut budget);
        aborted |= !c.complete && mode == Mode::Exact;
        lower += c.lower;
        upper += c.set.len();
        set.extend(local.to_global(&c.set));
    }
    if aborted {
        return Err(Error::BudgetExceeded { nodes: budget.used, lower: lower as f64, upper: upper as f64 });
    }
    if mode == Mode::Heuristic && lower < upper && g.period().is_none() {
        if let Some(net) = covering::net_dominating_set(g, 0.2) {
            if net.len() < set.len() {
                set = net;
                upper = set.len();
            }
        }
    }
    set.sort_unstable();
    Ok(SolveResult::bounded(upper as f64, lower as f64, upper as f64, Some(Witness::VertexSet(set)), start))
}

pub(crate) struct GammaComponent {
    pub set: Vec<usize>,
    pub lower: usize,
    pub complete: bool,
}

fn gamma_component(g: &GeometricGraph, local: &Local, mode: Mode, budget: &mut Budget) -> GammaComponent {
    if let Some(io) = IntervalOrder::detect(g.points(), local) {
        let set = io.dominating_set();
        return GammaComponent { lower: set.len(), set, complete: true };
    }
    gamma_general(&local.adj, mode, budget)
}

pub(crate) fn gamma_general(adj: &[Vec<usize>], mode: Mode, budget: &mut Budget) -> GammaComponent {
    let n = adj.len();
    let greedy = greedy_dominating(adj);
    let lower = packing_lower_bound(adj);
    if mode == Mode::Heuristic || lower == greedy.len() || n > 4096 {
        return GammaComponent { complete: lower == greedy.len(), lower, set: greedy };
    }
    let closed: Vec<FixedBitSet> = (0..n)
        .map(|v| {
            let mut b = FixedBitSet::with_capacity(n);
            b.insert(v);
            adj[v].iter().for_each(|&u| b.insert(u));
            b
        })
        .collect();
    let mut s = SetCoverSearch { closed, best: greedy, budget, aborted: false, floor: lower };
    let mut und = FixedBitSet::with_capacity(n);
    und.insert_range(..);
    let forb = FixedBitSet::with_capacity(n);
    s.search(&und, &forb, &mut Vec::new());
    let mut set = s.best;
    set.sort_unstable();
    GammaComponent { lower: if s.aborted { lower } else { set.len() }, set, complete: !s.aborted }
}

/// Greedy max-coverage dominating set followed by removal of redundant
/// dominators.
pub(crate) fn greedy_dominating(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut gain: Vec<usize> = adj.iter().map(|a| a.len() + 1).collect();
    let mut dominated = vec![false; n];
    let mut heap: BinaryHeap<(usize, std::cmp::Reverse<usize>)> =
        (0..n).map(|v| (gain[v], std::cmp::Reverse(v))).collect();
    let mut chosen = Vec::new();
    let mut left = n;
    while left > 0 {
        let (gv, std::cmp::Reverse(v)) = heap.pop().expect("undominated vertices remain");
        if gv != gain[v] || gv == 0 {
            continue;
        }
        chosen.push(v);
        for u in std::iter::once(v).chain(adj[v].iter().copied()) {
            if !dominated[u] {
                dominated[u] = true;
                left -= 1;
                for w in std::iter::once(u).chain(adj[u].iter().copied()) {
                    gain[w] -= 1;
                    if w != v && gain[w] > 0 {
                        heap.push((gain[w], std::cmp::Reverse(w)));
                    }
                }
            }
        }
    }
    // Drop dominators whose closed neighborhood is dominated twice.
    let mut count = vec![0usize; n];
    for &v in &chosen {
        count[v] += 1;
        adj[v].iter().for_each(|&u| count[u] += 1);
    }
    let mut keep = Vec::with_capacity(chosen.len());
    for &v in chosen.iter().rev() {
        let redundant = count[v] >= 2 && adj[v].iter().all(|&u| count[u] >= 2);
        if redundant {
            count[v] -= 1;
            adj[v].iter().for_each(|&u| count[u] -= 1);
        } else {
            keep.push(v);
        }
    }
    keep.sort_unstable();
    keep
}

/// Vertices at pairwise distance ≥ 3 need distinct dominators.
pub(crate) fn packing_lower_bound(adj: &[Vec<usize>]) -> usize {
    let n = adj.len();
    let mut blocked = vec![false; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (adj[v].len(), v));
    let mut count = 0;
    for v in order {
        if blocked[v] || adj[v].iter().any(|&u| blocked[u]) {
            continue;
        }
        count += 1;
        // Block the closed neighborhood; any later pick must not touch it.
        blocked[v] = true;
        adj[v].iter().for_each(|&u| blocked[u] = true);
    }
    count
}

/// Set-cover branch and bound: branch on the undominated vertex with the
/// fewest admissible dominators; siblings already tried are excluded.
struct SetCoverSearch<'b> {
    closed: Vec<FixedBitSet>,
    best: Vec<usize>,
    budget: &'b mut Budget,
    aborted: bool,
    floor: usize,
}

impl SetCoverSearch<'_> {
    fn search(&mut self, und: &FixedBitSet, forb: &FixedBitSet, chosen: &mut Vec<usize>) {
        if !self.budget.tick() {
            self.aborted = true;
            return;
        }
        if und.is_clear() {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        }
        if chosen.len() + 1 >= self.best.len() {
            return;
        }
        let n = self.closed.len();
        // Admissible dominators of each undominated vertex.
        let mut pick = usize::MAX;
        let mut pick_count = usize::MAX;
        let mut cand_sets: Vec<(usize, FixedBitSet)> = Vec::new();
        for u in und.ones() {
            let mut c = self.closed[u].clone();
            c.difference_with(forb);
            let k = c.count_ones(..);
            if k == 0 {
                return;
            }
            if k < pick_count {
                pick_count = k;
                pick = u;
            }
            cand_sets.push((k, c));
        }
        let und_count = cand_sets.len();
        let mut max_cover = 0;
        let mut gains = vec![0usize; n];
        for v in 0..n {
            if !forb.contains(v) {
                gains[v] = self.closed[v].intersection_count(und);
                max_cover = max_cover.max(gains[v]);
            }
        }
        let lb1 = und_count.div_ceil(max_cover);
        cand_sets.sort_by_key(|(k, _)| *k);
        let mut used = FixedBitSet::with_capacity(n);
        let mut lb2 = 0;
        for (_, c) in &cand_sets {
            if c.is_disjoint(&used) {
                lb2 += 1;
                used.union_with(c);
            }
        }
        if chosen.len() + lb1.max(lb2) >= self.best.len() {
            return;
        }
        let mut cands: Vec<usize> = self.closed[pick].ones().filter(|&c| !forb.contains(c)).collect();
        cands.sort_by_key(|&c| (std::cmp::Reverse(gains[c]), c));
        let mut local_forb = forb.clone();
        for c in cands {
            let mut next = und.clone();
            next.difference_with(&self.closed[c]);
            chosen.push(c);
            self.search(&next, &local_forb, chosen);
            chosen.pop();
            local_forb.insert(c);
            if self.aborted || self.best.len() == self.floor {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::*;

    #[test]
    fn small_cases() {
        let o = SolveOptions::default();
        assert_eq!(domination_number(&path3(), Mode::Exact, &o).unwrap().value, 1.0);
        assert_eq!(domination_number(&edgeless(4), Mode::Exact, &o).unwrap().value, 4.0);
        assert_eq!(domination_number(&complete(7), Mode::Exact, &o).unwrap().value, 1.0);
    }

    #[test]
    fn general_search_on_cycle() {
        // C6 needs two dominators; C7 needs three.
        for (n, want) in [(6usize, 2usize), (7, 3)] {
            let adj: Vec<Vec<usize>> = (0..n)
                .map(|i| {
                    let mut a = vec![(i + 1) % n, (i + n - 1) % n];
                    a.sort_unstable();
                    a
                })
                .collect();
            let mut b = Budget::new(100_000);
            let c = gamma_general(&adj, Mode::Exact, &mut b);
            assert!(c.complete);
            assert_eq!(c.set.len(), want);
        }
    }
}
