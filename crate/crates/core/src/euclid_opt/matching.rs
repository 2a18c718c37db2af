//! Minimum-weight near-perfect matching and bipartite matching.

use super::{check_inputs, EdgeWeights, MatchResult, WeightFunction};
use crate::error::{Error, Result};
use crate::invariants::Mode;
use crate::pointproc::{lex_cmp, PointSet};

/// Largest input solved by the exact subset dynamic program.
pub const MM_EXACT_CAP: usize = 20;
/// Largest side handled by the assignment algorithm.
const BM_CAP: usize = 3000;
/// Above this size the heuristic seeds from a sorted pairing instead of a
/// global greedy over all pairs.
const GREEDY_CAP: usize = 3000;

/// `MM_w(r^{-1} X)`: `⌊|X|/2⌋` disjoint edges of minimum total weight.
pub fn min_matching(ps: &PointSet, w: &WeightFunction, r: f64, mode: Mode) -> Result<MatchResult> {
    check_inputs(ps, w, r)?;
    let ew = EdgeWeights::of(ps, w, r);
    let lex = {
        let mut o: Vec<usize> = (0..ps.len()).collect();
        o.sort_by(|&a, &b| lex_cmp(ps.point(a), ps.point(b)));
        o
    };
    solve(&ew, mode, &lex)
}

fn solve(ew: &EdgeWeights, mode: Mode, lex: &[usize]) -> Result<MatchResult> {
    let n = ew.n();
    if n <= 1 {
        return Ok(finish(ew, Vec::new(), true));
    }
    match mode {
        Mode::Exact => {
            if n > MM_EXACT_CAP {
                return Err(Error::CapExceeded {
                    what: "exact matching (use heuristic mode)",
                    size: n,
                    cap: MM_EXACT_CAP,
                });
            }
            Ok(finish(ew, subset_dp(ew), true))
        }
        Mode::Heuristic => {
            let mut edges = if n <= GREEDY_CAP { greedy(ew) } else { sorted_pairs(lex) };
            exchange(ew, &mut edges);
            Ok(finish(ew, edges, n <= 3))
        }
    }
}

fn finish(ew: &EdgeWeights, mut edges: Vec<(usize, usize)>, exact: bool) -> MatchResult {
    for e in edges.iter_mut() {
        if e.0 > e.1 {
            *e = (e.1, e.0);
        }
    }
    edges.sort_unstable();
    MatchResult { weight: edges.iter().map(|&(a, b)| ew.get(a, b)).sum(), edges, exact }
}

/// Forward dynamic program over matched sets; odd inputs get a dummy vertex
/// joined to everything at zero cost.
fn subset_dp(ew: &EdgeWeights) -> Vec<(usize, usize)> {
    let n = ew.n();
    let big = n + n % 2;
    let wt = |i: usize, j: usize| if j >= n { 0.0 } else { ew.get(i, j) };
    let size = 1usize << big;
    let full = size - 1;
    let mut dp = vec![f64::INFINITY; size];
    let mut choice = vec![(u8::MAX, u8::MAX); size];
    let mut reached = vec![false; size];
    dp[0] = 0.0;
    reached[0] = true;
    for mask in 0..size {
        if !reached[mask] || mask == full {
            continue;
        }
        let i = (!mask).trailing_zeros() as usize;
        let mut rest = !mask & full & !(1 << i);
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let nm = mask | (1 << i) | (1 << j);
            let c = dp[mask] + wt(i, j);
            if !reached[nm] || c < dp[nm] {
                dp[nm] = c;
                choice[nm] = (i as u8, j as u8);
                reached[nm] = true;
            }
        }
    }
    let mut edges = Vec::with_capacity(n / 2);
    let mut mask = full;
    while mask != 0 {
        let (i, j) = (choice[mask].0 as usize, choice[mask].1 as usize);
        if j < n {
            edges.push((i, j));
        }
        mask &= !((1 << i) | (1 << j));
    }
    edges
}

fn greedy(ew: &EdgeWeights) -> Vec<(usize, usize)> {
    let n = ew.n();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((ew.get(i, j), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut used = vec![false; n];
    let mut edges = Vec::with_capacity(n / 2);
    for (_, i, j) in pairs {
        if !used[i] && !used[j] {
            used[i] = true;
            used[j] = true;
            edges.push((i, j));
            if edges.len() == n / 2 {
                break;
            }
        }
    }
    edges
}

fn sorted_pairs(lex: &[usize]) -> Vec<(usize, usize)> {
    lex.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

const EXCHANGE_PASSES: usize = 50;

/// Pairwise swap improvement; on odd inputs the free vertex may also
/// replace an endpoint.
fn exchange(ew: &EdgeWeights, edges: &mut [(usize, usize)]) {
    let n = ew.n();
    let better = |new: f64, old: f64| new < old - 1e-12 * old.abs().max(1.0) || (old.is_infinite() && new.is_finite());
    let mut free = if n % 2 == 1 {
        let mut used = vec![false; n];
        edges.iter().for_each(|&(a, b)| {
            used[a] = true;
            used[b] = true;
        });
        used.iter().position(|&u| !u)
    } else {
        None
    };
    for _ in 0..EXCHANGE_PASSES {
        let mut improved = false;
        for x in 0..edges.len() {
            for y in x + 1..edges.len() {
                let ((a, b), (c, d)) = (edges[x], edges[y]);
                let old = ew.get(a, b) + ew.get(c, d);
                let s1 = ew.get(a, c) + ew.get(b, d);
                let s2 = ew.get(a, d) + ew.get(b, c);
                if better(s1, old) && s1 <= s2 {
                    edges[x] = (a, c);
                    edges[y] = (b, d);
                    improved = true;
                } else if better(s2, old) {
                    edges[x] = (a, d);
                    edges[y] = (b, c);
                    improved = true;
                }
            }
            if let Some(u) = free {
                let (a, b) = edges[x];
                let old = ew.get(a, b);
                if better(ew.get(u, b), old) && ew.get(u, b) <= ew.get(a, u) {
                    edges[x] = (u, b);
                    free = Some(a);
                    improved = true;
                } else if better(ew.get(a, u), old) {
                    edges[x] = (a, u);
                    free = Some(b);
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// `BM_w`: with `|U| = |V|` an exact minimum perfect bipartite matching;
/// otherwise a near-perfect matching of `U ∪ V` under `w*`, exact up to
/// `MM_EXACT_CAP` points. Edge indices: `0..|U|` for `U`, `|U|..` for `V`.
pub fn bipartite_matching(u: &PointSet, v: &PointSet, w: &WeightFunction, r: f64) -> Result<MatchResult> {
    check_inputs(u, w, r)?;
    check_inputs(v, w, r)?;
    let (nu, nv) = (u.len(), v.len());
    let pts: Vec<&[f64]> = u.iter().chain(v.iter()).collect();
    if nu == nv {
        if nu > BM_CAP {
            return Err(Error::CapExceeded { what: "bipartite matching", size: nu, cap: BM_CAP });
        }
        let cost: Vec<f64> = (0..nu)
            .flat_map(|i| (0..nv).map(move |j| (i, j)))
            .map(|(i, j)| w.edge(u.point(i), v.point(j), r))
            .collect();
        let assign = hungarian(&cost, nu);
        let edges: Vec<(usize, usize)> = assign.iter().enumerate().map(|(i, &j)| (i, nu + j)).collect();
        let weight = assign.iter().enumerate().map(|(i, &j)| cost[i * nu + j]).sum();
        return Ok(MatchResult { weight, edges, exact: true });
    }
    if !w.w_max().is_finite() {
        return Err(Error::Precondition("bipartite matching with unequal sides needs a bounded weight".into()));
    }
    let types: Vec<bool> = (0..pts.len()).map(|i| i >= nu).collect();
    let mut lex: Vec<usize> = (0..pts.len()).collect();
    lex.sort_by(|&a, &b| lex_cmp(pts[a], pts[b]));
    let ew = EdgeWeights::new(pts, w, r, Some(types));
    let mode = if ew.n() <= MM_EXACT_CAP { Mode::Exact } else { Mode::Heuristic };
    solve(&ew, mode, &lex)
}

/// Minimum-cost assignment on an `n × n` row-major matrix by the
/// shortest augmenting path method with potentials. Returns the column of
/// each row.
fn hungarian(cost: &[f64], n: usize) -> Vec<usize> {
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        if p[j] != 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_matchings() {
        let w = WeightFunction::power(1, 1.0).unwrap();
        let ps = PointSet::from_line(&[0.0, 1.0, 3.0]).unwrap();
        let m = min_matching(&ps, &w, 1.0, Mode::Exact).unwrap();
        assert_eq!(m.weight, 1.0);
        assert_eq!(m.edges, vec![(0, 1)]);
        assert_eq!(min_matching(&PointSet::empty(1), &w, 1.0, Mode::Exact).unwrap().edges.len(), 0);
    }

    #[test]
    fn bipartite_small() {
        let w = WeightFunction::power(2, 1.0).unwrap().truncate(1.0);
        let u = PointSet::from_points(2, &[[0.0, 0.0]]).unwrap();
        let v = PointSet::from_points(2, &[[0.1, 0.0]]).unwrap();
        assert!((bipartite_matching(&u, &v, &w, 1.0).unwrap().weight - 0.1).abs() < 1e-12);
        let e = PointSet::empty(2);
        assert_eq!(bipartite_matching(&e, &e, &w, 1.0).unwrap().weight, 0.0);
        let inf = WeightFunction::power(2, 1.0).unwrap();
        assert!(bipartite_matching(&u, &e, &inf, 1.0).is_err());
    }
}
