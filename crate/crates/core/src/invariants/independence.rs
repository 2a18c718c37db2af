use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use fixedbitset::FixedBitSet;

use super::line::IntervalOrder;
use super::{local_components, Budget, Local, Mode, SolveOptions, SolveResult, Witness};
use crate::error::{Error, Result};
use crate::geograph::GeometricGraph;

/// `α(G)`: maximum independent set.
pub fn independence_number(g: &GeometricGraph, mode: Mode, opts: &SolveOptions) -> Result<SolveResult> {
    let start = Instant::now();
    let mut budget = Budget::new(opts.node_limit);
    let mut set = Vec::new();
    let (mut lower, mut upper) = (0usize, 0usize);
    let mut aborted = false;
    for local in local_components(g) {
        let c = alpha_component(g, &local, mode, &mut budget);
        aborted |= !c.complete && mode == Mode::Exact;
        lower += c.set.len();
        upper += c.upper;
        set.extend(local.to_global(&c.set));
    }
    set.sort_unstable();
    if aborted {
        return Err(Error::BudgetExceeded { nodes: budget.used, lower: lower as f64, upper: upper as f64 });
    }
    Ok(SolveResult::bounded(lower as f64, lower as f64, upper as f64, Some(Witness::VertexSet(set)), start))
}

/// Vertex cover number `|V| − α(G)`, with the complement witness.
pub fn vertex_cover_number(g: &GeometricGraph, mode: Mode, opts: &SolveOptions) -> Result<SolveResult> {
    let n = g.n() as f64;
    let a = independence_number(g, mode, opts).map_err(|e| match e {
        Error::BudgetExceeded { nodes, lower, upper } => {
            Error::BudgetExceeded { nodes, lower: n - upper, upper: n - lower }
        }
        e => e,
    })?;
    let Some(Witness::VertexSet(ind)) = &a.witness else {
        unreachable!("independence solver always returns a vertex set")
    };
    let mut in_set = vec![false; g.n()];
    ind.iter().for_each(|&v| in_set[v] = true);
    let cover: Vec<usize> = (0..g.n()).filter(|&v| !in_set[v]).collect();
    Ok(SolveResult {
        value: n - a.value,
        exact: a.exact,
        lower: n - a.upper,
        upper: n - a.lower,
        witness: Some(Witness::VertexSet(cover)),
        elapsed: a.elapsed,
    })
}

pub(crate) struct AlphaComponent {
    /// Best independent set found (local indices).
    pub set: Vec<usize>,
    /// Upper bound on `α` of the component.
    pub upper: usize,
    pub complete: bool,
}

pub(crate) fn alpha_component(g: &GeometricGraph, local: &Local, mode: Mode, budget: &mut Budget) -> AlphaComponent {
    let n = local.n();
    if n <= 2 {
        let set = if n == 2 && local.adj[0].is_empty() { vec![0, 1] } else { vec![0] };
        let set = if n == 0 { Vec::new() } else { set };
        return AlphaComponent { upper: set.len(), set, complete: true };
    }
    if let Some(io) = IntervalOrder::detect(g.points(), local) {
        let set = io.independent_set();
        return AlphaComponent { upper: set.len(), set, complete: true };
    }
    alpha_general(&local.adj, mode, budget)
}

/// Branch and bound on an arbitrary adjacency (no interval shortcut).
pub(crate) fn alpha_general(adj: &[Vec<usize>], mode: Mode, budget: &mut Budget) -> AlphaComponent {
    let greedy = greedy_independent(adj);
    let cover = super::clique_cover::greedy_clique_partition(adj).len();
    if mode == Mode::Heuristic || greedy.len() == cover {
        return AlphaComponent { complete: greedy.len() == cover, upper: cover, set: greedy };
    }
    let mut s = MaxClique::on_complement(adj, budget);
    s.best = s.to_internal(&greedy);
    let all = {
        let mut b = FixedBitSet::with_capacity(adj.len());
        b.insert_range(..);
        b
    };
    s.expand(&mut Vec::new(), all);
    let complete = !s.aborted;
    let set = s.to_external(&s.best);
    AlphaComponent { upper: if complete { set.len() } else { cover }, set, complete }
}

/// Minimum-degree greedy independent set.
pub(crate) fn greedy_independent(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..n).map(|v| Reverse((deg[v], v))).collect();
    let mut out = Vec::new();
    while let Some(Reverse((d, v))) = heap.pop() {
        if removed[v] || d != deg[v] {
            continue;
        }
        out.push(v);
        removed[v] = true;
        for &u in &adj[v] {
            if !removed[u] {
                removed[u] = true;
                for &w in &adj[u] {
                    if !removed[w] {
                        deg[w] -= 1;
                        heap.push(Reverse((deg[w], w)));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Maximum clique search with greedy-coloring bounds, run on the
/// complement so that cliques are independent sets of `G`.
struct MaxClique<'b> {
    /// `compat[v]`: internal vertices that may join a set with `v`.
    compat: Vec<FixedBitSet>,
    /// Internal index to external index.
    ext: Vec<usize>,
    best: Vec<usize>,
    budget: &'b mut Budget,
    aborted: bool,
}

impl<'b> MaxClique<'b> {
    fn on_complement(adj: &[Vec<usize>], budget: &'b mut Budget) -> Self {
        let n = adj.len();
        // Vertices of small degree in G come first: they have the most
        // compatible partners.
        let mut ext: Vec<usize> = (0..n).collect();
        ext.sort_by_key(|&v| (adj[v].len(), v));
        let mut int = vec![0usize; n];
        for (k, &v) in ext.iter().enumerate() {
            int[v] = k;
        }
        let compat = (0..n)
            .map(|k| {
                let mut b = FixedBitSet::with_capacity(n);
                b.insert_range(..);
                b.set(k, false);
                for &u in &adj[ext[k]] {
                    b.set(int[u], false);
                }
                b
            })
            .collect();
        Self { compat, ext, best: Vec::new(), budget, aborted: false }
    }

    fn to_internal(&self, set: &[usize]) -> Vec<usize> {
        let mut int = vec![0usize; self.ext.len()];
        for (k, &v) in self.ext.iter().enumerate() {
            int[v] = k;
        }
        set.iter().map(|&v| int[v]).collect()
    }

    fn to_external(&self, set: &[usize]) -> Vec<usize> {
        let mut v: Vec<usize> = set.iter().map(|&k| self.ext[k]).collect();
        v.sort_unstable();
        v
    }

    /// Greedy coloring of `p` into classes of mutually incompatible
    /// vertices; returns vertices by nondecreasing color.
    fn color(&self, p: &FixedBitSet) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(p.count_ones(..));
        let mut colors = Vec::with_capacity(order.capacity());
        let mut u = p.clone();
        let mut k = 0;
        while !u.is_clear() {
            k += 1;
            let mut q = u.clone();
            while let Some(v) = q.minimum() {
                q.set(v, false);
                q.difference_with(&self.compat[v]);
                u.set(v, false);
                order.push(v);
                colors.push(k);
            }
        }
        (order, colors)
    }

    fn expand(&mut self, cur: &mut Vec<usize>, mut p: FixedBitSet) {
        if !self.budget.tick() {
            self.aborted = true;
            return;
        }
        let (order, colors) = self.color(&p);
        for i in (0..order.len()).rev() {
            if cur.len() + colors[i] <= self.best.len() {
                return;
            }
            let v = order[i];
            cur.push(v);
            let mut np = p.clone();
            np.intersect_with(&self.compat[v]);
            if np.is_clear() {
                if cur.len() > self.best.len() {
                    self.best = cur.clone();
                }
            } else {
                self.expand(cur, np);
            }
            cur.pop();
            p.set(v, false);
            if self.aborted {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::*;

    fn alpha(g: &GeometricGraph) -> f64 {
        independence_number(g, Mode::Exact, &SolveOptions::default()).unwrap().value
    }

    #[test]
    fn small_cases() {
        assert_eq!(alpha(&path3()), 2.0);
        assert_eq!(alpha(&complete(6)), 1.0);
        assert_eq!(alpha(&edgeless(5)), 5.0);
        let vc = vertex_cover_number(&complete(6), Mode::Exact, &SolveOptions::default()).unwrap();
        assert_eq!(vc.value, 5.0);
    }

    #[test]
    fn general_solver_on_cycle() {
        // C5 has α = 2 and is not an interval graph.
        let adj = vec![vec![1, 4], vec![0, 2], vec![1, 3], vec![2, 4], vec![0, 3]];
        let mut b = Budget::new(1000);
        let c = alpha_general(&adj, Mode::Exact, &mut b);
        assert!(c.complete);
        assert_eq!(c.set.len(), 2);
    }
}
