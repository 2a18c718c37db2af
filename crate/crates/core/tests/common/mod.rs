//! Brute-force oracles and instance generators shared by integration tests.
#![allow(dead_code)]

use rand::Rng;
use rgg_limits::geograph::{build_graph, GeometricGraph};
use rgg_limits::pointproc::PointSet;
use rgg_limits::rng;

/// Random instance: `n` uniform points in a box scaled so that the mean
/// degree at radius 1 lies roughly in `[0.5, 6]`.
pub fn random_instance(seed: u64, dim: usize, n_max: usize) -> PointSet {
    let mut r = rng::stream(seed, 7);
    let n = r.random_range(1..=n_max);
    let density = r.random_range(0.15..2.0);
    let side = (n as f64 / density).powf(1.0 / dim as f64).max(0.5);
    let coords: Vec<f64> = (0..n * dim).map(|_| r.random_range(0.0..side)).collect();
    PointSet::from_flat(dim, coords).expect("distinct with probability one")
}

pub fn random_graph(seed: u64, dim: usize, n_max: usize) -> GeometricGraph {
    build_graph(&random_instance(seed, dim, n_max), 1.0).unwrap()
}

pub fn nbr_masks(g: &GeometricGraph) -> Vec<u32> {
    (0..g.n()).map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u))).collect()
}

pub fn brute_alpha(g: &GeometricGraph) -> usize {
    let nb = nbr_masks(g);
    let n = g.n();
    (0u32..1 << n)
        .filter(|&s| (0..n).all(|v| s & (1 << v) == 0 || nb[v] & s == 0))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

pub fn brute_gamma(g: &GeometricGraph) -> usize {
    let nb = nbr_masks(g);
    let n = g.n();
    let full = (1u32 << n) - 1;
    (0u32..1 << n)
        .filter(|&s| (0..n).filter(|v| s & (1 << v) != 0).fold(0, |m, v| m | nb[v] | (1 << v)) == full)
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap_or(0)
}

/// Minimum clique partition by dynamic programming over vertex subsets.
pub fn brute_theta(g: &GeometricGraph) -> usize {
    let nb = nbr_masks(g);
    let n = g.n();
    let size = 1usize << n;
    let mut clique = vec![false; size];
    clique[0] = true;
    for m in 1..size {
        let low = m.trailing_zeros() as usize;
        let rest = m & (m - 1);
        clique[m] = clique[rest] && (nb[low] as usize & rest) == rest;
    }
    let mut dp = vec![usize::MAX; size];
    dp[0] = 0;
    for m in 1..size {
        let low = m & m.wrapping_neg();
        let rest = m ^ low;
        // Submasks of `rest`, each joined with the lowest vertex.
        let mut s = rest;
        loop {
            let c = s | low;
            if clique[c] && dp[m ^ c] != usize::MAX {
                dp[m] = dp[m].min(dp[m ^ c] + 1);
            }
            if s == 0 {
                break;
            }
            s = (s - 1) & rest;
        }
    }
    dp[size - 1]
}

/// Eternal domination number by a fixpoint over all `k`-subsets of the
/// whole vertex set, for `k = 1, 2, …`.
pub fn brute_gammainf(g: &GeometricGraph) -> usize {
    let nb = nbr_masks(g);
    let n = g.n();
    if n == 0 {
        return 0;
    }
    for k in 1..=n {
        let masks: Vec<u32> = (0u32..1 << n).filter(|m| m.count_ones() as usize == k).collect();
        let mut alive = vec![false; 1 << n];
        masks.iter().for_each(|&m| alive[m as usize] = true);
        loop {
            let mut changed = false;
            for &s in &masks {
                if !alive[s as usize] {
                    continue;
                }
                let ok = (0..n).filter(|v| s & (1 << v) == 0).all(|v| {
                    (0..n).any(|u| {
                        s & (1 << u) != 0 && nb[v] & (1 << u) != 0 && alive[((s & !(1 << u)) | (1 << v)) as usize]
                    })
                });
                if !ok {
                    alive[s as usize] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if masks.iter().any(|&m| alive[m as usize]) {
            return k;
        }
    }
    unreachable!()
}

pub fn brute_matching(g: &GeometricGraph) -> usize {
    fn rec(g: &GeometricGraph, used: &mut Vec<bool>, from: usize) -> usize {
        let Some(v) = (from..g.n()).find(|&v| !used[v]) else {
            return 0;
        };
        used[v] = true;
        let mut best = rec(g, used, v + 1);
        for &u in g.neighbors(v) {
            if !used[u] {
                used[u] = true;
                best = best.max(1 + rec(g, used, v + 1));
                used[u] = false;
            }
        }
        used[v] = false;
        best
    }
    rec(g, &mut vec![false; g.n()], 0)
}

/// Minimum edge cover of the non-isolated vertices by memoized search.
pub fn brute_edge_cover(g: &GeometricGraph) -> usize {
    let n = g.n();
    let need: u32 = (0..n).filter(|&v| g.degree(v) > 0).fold(0, |m, v| m | (1 << v));
    let mut memo = vec![usize::MAX; 1 << n];
    fn f(g: &GeometricGraph, m: u32, memo: &mut Vec<usize>) -> usize {
        if m == 0 {
            return 0;
        }
        if memo[m as usize] != usize::MAX {
            return memo[m as usize];
        }
        let v = m.trailing_zeros() as usize;
        let best = g.neighbors(v).iter().map(|&u| 1 + f(g, m & !(1 << v) & !(1 << u), memo)).min().unwrap();
        memo[m as usize] = best;
        best
    }
    f(g, need, &mut memo)
}

/// Maximum number of vertex-disjoint triangles.
pub fn brute_triangles(g: &GeometricGraph) -> usize {
    let n = g.n();
    let mut tris = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c) {
                    tris.push((1u32 << a) | (1 << b) | (1 << c));
                }
            }
        }
    }
    fn rec(t: &[u32], used: u32) -> usize {
        match t.split_first() {
            None => 0,
            Some((&x, rest)) => {
                let skip = rec(rest, used);
                if x & used == 0 {
                    skip.max(1 + rec(rest, used | x))
                } else {
                    skip
                }
            }
        }
    }
    rec(&tris, 0)
}

/// Brute-force optimal tour weight over all permutations fixing vertex 0.
pub fn brute_tsp(w: &dyn Fn(usize, usize) -> f64, n: usize) -> f64 {
    match n {
        0 | 1 => return 0.0,
        2 => return 2.0 * w(0, 1),
        _ => {}
    }
    let mut perm: Vec<usize> = (1..n).collect();
    let mut best = f64::INFINITY;
    loop {
        let mut t = w(0, perm[0]) + w(perm[n - 2], 0);
        for k in 0..n - 2 {
            t += w(perm[k], perm[k + 1]);
        }
        best = best.min(t);
        if !next_perm(&mut perm) {
            break;
        }
    }
    best
}

/// Brute-force minimum near-perfect matching weight.
pub fn brute_mm(w: &dyn Fn(usize, usize) -> f64, n: usize) -> f64 {
    fn rec(w: &dyn Fn(usize, usize) -> f64, left: &mut Vec<usize>, skip_allowed: bool) -> f64 {
        if left.len() <= 1 {
            return 0.0;
        }
        let v = left.remove(0);
        let mut best = f64::INFINITY;
        if skip_allowed {
            best = best.min(rec(w, left, false));
        }
        for k in 0..left.len() {
            let u = left.remove(k);
            best = best.min(w(v, u) + rec(w, left, skip_allowed));
            left.insert(k, u);
        }
        left.insert(0, v);
        best
    }
    let mut left: Vec<usize> = (0..n).collect();
    rec(w, &mut left, n % 2 == 1)
}

/// Brute-force minimum spanning tree weight over all labeled trees
/// (Prüfer sequences).
pub fn brute_mst(w: &dyn Fn(usize, usize) -> f64, n: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    if n == 2 {
        return w(0, 1);
    }
    let mut seq = vec![0usize; n - 2];
    let mut best = f64::INFINITY;
    loop {
        // Decode the Prüfer sequence.
        let mut degree = vec![1usize; n];
        seq.iter().for_each(|&x| degree[x] += 1);
        let mut total = 0.0;
        for &x in &seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
            total += w(leaf, x);
            degree[leaf] -= 1;
            degree[x] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        total += w(rest[0], rest[1]);
        best = best.min(total);
        let mut k = 0;
        while k < seq.len() && seq[k] == n - 1 {
            seq[k] = 0;
            k += 1;
        }
        if k == seq.len() {
            break;
        }
        seq[k] += 1;
    }
    best
}

/// Brute-force minimum perfect bipartite matching over all permutations.
pub fn brute_assignment(w: &dyn Fn(usize, usize) -> f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    loop {
        best = best.min((0..n).map(|i| w(i, perm[i])).sum());
        if !next_perm(&mut perm) {
            break;
        }
    }
    best
}

pub fn next_perm(p: &mut [usize]) -> bool {
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
