use std::time::Instant;

use fixedbitset::FixedBitSet;

use super::independence::{alpha_general, greedy_independent};
use super::line::IntervalOrder;
use super::{local_components, Budget, Local, Mode, SolveOptions, SolveResult, Witness};
use crate::error::{Error, Result};
use crate::geograph::GeometricGraph;

/// `θ(G)`: minimum number of cliques partitioning the vertices.
pub fn clique_cover_number(g: &GeometricGraph, mode: Mode, opts: &SolveOptions) -> Result<SolveResult> {
    let start = Instant::now();
    let mut budget = Budget::new(opts.node_limit);
    let mut parts = Vec::new();
    let (mut lower, mut upper) = (0usize, 0usize);
    let mut aborted = false;
    for local in local_components(g) {
        let c = theta_component(g, &local, mode, &mut budget);
        aborted |= !c.complete && mode == Mode::Exact;
        lower += c.lower;
        upper += c.partition.len();
        parts.extend(c.partition.iter().map(|p| local.to_global(p)));
    }
    if aborted {
        return Err(Error::BudgetExceeded { nodes: budget.used, lower: lower as f64, upper: upper as f64 });
    }
    parts.sort();
    Ok(SolveResult::bounded(upper as f64, lower as f64, upper as f64, Some(Witness::Partition(parts)), start))
}

pub(crate) struct ThetaComponent {
    pub partition: Vec<Vec<usize>>,
    pub lower: usize,
    pub complete: bool,
}

pub(crate) fn theta_component(g: &GeometricGraph, local: &Local, mode: Mode, budget: &mut Budget) -> ThetaComponent {
    if let Some(io) = IntervalOrder::detect(g.points(), local) {
        let partition = io.clique_partition();
        return ThetaComponent { lower: partition.len(), partition, complete: true };
    }
    theta_general(&local.adj, mode, budget)
}

pub(crate) fn theta_general(adj: &[Vec<usize>], mode: Mode, budget: &mut Budget) -> ThetaComponent {
    let greedy = greedy_clique_partition(adj);
    let lower = if mode == Mode::Heuristic {
        greedy_independent(adj).len()
    } else {
        let a = alpha_general(adj, Mode::Exact, budget);
        if a.complete {
            a.set.len()
        } else {
            return ThetaComponent { lower: a.set.len(), partition: greedy, complete: false };
        }
    };
    if mode == Mode::Heuristic || lower == greedy.len() {
        return ThetaComponent { complete: lower == greedy.len(), lower, partition: greedy };
    }
    let mut s = CliqueColoring::new(adj, lower, greedy, budget);
    s.search(0);
    ThetaComponent { complete: !s.aborted, lower: if s.aborted { lower } else { s.best.len() }, partition: s.best }
}

/// Greedy clique partition: each clique starts at the first uncovered
/// vertex and absorbs uncovered neighbors in index order when compatible.
pub(crate) fn greedy_clique_partition(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut covered = vec![false; n];
    let mut out = Vec::new();
    for v in 0..n {
        if covered[v] {
            continue;
        }
        covered[v] = true;
        let mut clique = vec![v];
        let mut cand: Vec<usize> = adj[v].iter().copied().filter(|&u| !covered[u]).collect();
        cand.sort_unstable();
        for u in cand {
            if clique.iter().all(|&w| adj[u].binary_search(&w).is_ok()) {
                covered[u] = true;
                clique.push(u);
            }
        }
        out.push(clique);
    }
    out
}

/// Exact clique partition by DSATUR-style branching on the complement
/// coloring problem.
struct CliqueColoring<'b> {
    nbr: Vec<FixedBitSet>,
    classes: Vec<FixedBitSet>,
    colored: FixedBitSet,
    lower: usize,
    best: Vec<Vec<usize>>,
    budget: &'b mut Budget,
    aborted: bool,
}

impl<'b> CliqueColoring<'b> {
    fn new(adj: &[Vec<usize>], lower: usize, best: Vec<Vec<usize>>, budget: &'b mut Budget) -> Self {
        let n = adj.len();
        let nbr = adj
            .iter()
            .map(|a| {
                let mut b = FixedBitSet::with_capacity(n);
                a.iter().for_each(|&u| b.insert(u));
                b
            })
            .collect();
        Self { nbr, classes: Vec::new(), colored: FixedBitSet::with_capacity(n), lower, best, budget, aborted: false }
    }

    fn n(&self) -> usize {
        self.nbr.len()
    }

    fn done(&self) -> bool {
        self.aborted || self.best.len() == self.lower
    }

    fn search(&mut self, count: usize) {
        if !self.budget.tick() {
            self.aborted = true;
            return;
        }
        if count == self.n() {
            if self.classes.len() < self.best.len() {
                self.best = self.classes.iter().map(|c| c.ones().collect()).collect();
            }
            return;
        }
        if self.classes.len() >= self.best.len() {
            return;
        }
        // Most constrained vertex: fewest classes it can join.
        let mut pick = None;
        let mut pick_key = (usize::MAX, usize::MAX);
        for v in 0..self.n() {
            if self.colored.contains(v) {
                continue;
            }
            let feasible = self.classes.iter().filter(|c| c.is_subset(&self.nbr[v])).count();
            let key = (feasible, self.nbr[v].count_ones(..));
            if key < pick_key {
                pick_key = key;
                pick = Some(v);
            }
        }
        let v = pick.expect("uncolored vertex exists");
        self.colored.insert(v);
        for c in 0..self.classes.len() {
            if self.classes[c].is_subset(&self.nbr[v]) {
                self.classes[c].insert(v);
                self.search(count + 1);
                self.classes[c].set(v, false);
                if self.done() {
                    self.colored.set(v, false);
                    return;
                }
            }
        }
        if self.classes.len() + 1 < self.best.len() {
            let mut b = FixedBitSet::with_capacity(self.n());
            b.insert(v);
            self.classes.push(b);
            self.search(count + 1);
            self.classes.pop();
        }
        self.colored.set(v, false);
    }
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::*;

    #[test]
    fn small_cases() {
        let o = SolveOptions::default();
        assert_eq!(clique_cover_number(&complete(5), Mode::Exact, &o).unwrap().value, 1.0);
        assert_eq!(clique_cover_number(&edgeless(4), Mode::Exact, &o).unwrap().value, 4.0);
        assert_eq!(clique_cover_number(&path3(), Mode::Exact, &o).unwrap().value, 2.0);
    }

    #[test]
    fn five_cycle_needs_three() {
        let adj = vec![vec![1, 4], vec![0, 2], vec![1, 3], vec![2, 4], vec![0, 3]];
        let mut b = Budget::new(10_000);
        let c = theta_general(&adj, Mode::Exact, &mut b);
        assert!(c.complete);
        assert_eq!(c.partition.len(), 3);
    }
}
