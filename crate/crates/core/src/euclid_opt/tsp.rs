//! Travelling salesman: Held-Karp, nearest neighbor, Hilbert order, 2-opt.

use super::{check_inputs, EdgeWeights, TourResult, WeightFunction};
use crate::error::{Error, Result};
use crate::invariants::Mode;
use crate::pointproc::{lex_cmp, PointSet};

/// Largest input solved by the exact dynamic program.
pub const TSP_EXACT_CAP: usize = 18;

/// `TSP_w(r^{-1} X)`. `|X| ≤ 1` gives 0; two points give twice the edge.
pub fn tsp(ps: &PointSet, w: &WeightFunction, r: f64, mode: Mode) -> Result<TourResult> {
    check_inputs(ps, w, r)?;
    let ew = EdgeWeights::of(ps, w, r);
    let hilbert = (ps.dim() <= 3).then(|| hilbert_tour(ps)).transpose()?;
    solve(&ew, mode, hilbert)
}

/// Tour on `U ∪ V` under `w*` (same-type edges weigh `w_max`). Indices
/// `0..|U|` refer to `U`, `|U|..` to `V`.
pub fn bipartite_tsp(u: &PointSet, v: &PointSet, w: &WeightFunction, r: f64, mode: Mode) -> Result<TourResult> {
    check_inputs(u, w, r)?;
    check_inputs(v, w, r)?;
    if !w.w_max().is_finite() && u.len() != v.len() {
        return Err(Error::Precondition("bipartite tour with unequal sides needs a bounded weight".into()));
    }
    let pts: Vec<&[f64]> = u.iter().chain(v.iter()).collect();
    let types: Vec<bool> = (0..pts.len()).map(|i| i >= u.len()).collect();
    let ew = EdgeWeights::new(pts, w, r, Some(types));
    solve(&ew, mode, None)
}

fn solve(ew: &EdgeWeights, mode: Mode, hilbert: Option<Vec<usize>>) -> Result<TourResult> {
    let n = ew.n();
    if n <= 3 {
        return Ok(finish(ew, (0..n).collect(), true));
    }
    match mode {
        Mode::Exact => {
            if n > TSP_EXACT_CAP {
                return Err(Error::CapExceeded { what: "exact TSP (use heuristic mode)", size: n, cap: TSP_EXACT_CAP });
            }
            Ok(finish(ew, held_karp(ew), true))
        }
        Mode::Heuristic => {
            let mut best = improve(ew, nn_order(ew));
            if let Some(h) = hilbert {
                let cand = improve(ew, h);
                if order_weight(ew, &cand) < order_weight(ew, &best) {
                    best = cand;
                }
            }
            Ok(finish(ew, best, false))
        }
    }
}

fn finish(ew: &EdgeWeights, order: Vec<usize>, exact: bool) -> TourResult {
    let n = order.len();
    let edges = match n {
        0 | 1 => Vec::new(),
        _ => (0..n).map(|k| (order[k], order[(k + 1) % n])).collect(),
    };
    TourResult { weight: order_weight(ew, &order), order, edges, exact }
}

fn order_weight(ew: &EdgeWeights, order: &[usize]) -> f64 {
    let n = order.len();
    if n < 2 {
        return 0.0;
    }
    (0..n).map(|k| ew.get(order[k], order[(k + 1) % n])).sum()
}

fn held_karp(ew: &EdgeWeights) -> Vec<usize> {
    let n = ew.n();
    let m = n - 1;
    let size = 1usize << m;
    // dp[mask * m + j]: cheapest path from 0 through `mask` ending at j + 1.
    let mut dp = vec![f64::INFINITY; size * m];
    let mut parent = vec![u8::MAX; size * m];
    for j in 0..m {
        dp[(1 << j) * m + j] = ew.get(0, j + 1);
    }
    for mask in 1..size {
        for j in 0..m {
            if mask & (1 << j) == 0 || (mask.count_ones() > 1 && parent[mask * m + j] == u8::MAX) {
                continue;
            }
            let cur = dp[mask * m + j];
            let mut rest = !mask & (size - 1);
            while rest != 0 {
                let k = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let nm = mask | (1 << k);
                let c = cur + ew.get(j + 1, k + 1);
                if c < dp[nm * m + k] || parent[nm * m + k] == u8::MAX {
                    dp[nm * m + k] = c;
                    parent[nm * m + k] = j as u8;
                }
            }
        }
    }
    let full = size - 1;
    let last = (0..m)
        .min_by(|&a, &b| {
            let ca = dp[full * m + a] + ew.get(a + 1, 0);
            let cb = dp[full * m + b] + ew.get(b + 1, 0);
            ca.total_cmp(&cb)
        })
        .expect("n ≥ 2");
    let mut order = Vec::with_capacity(n);
    let (mut mask, mut j) = (full, last);
    loop {
        order.push(j + 1);
        let p = parent[mask * m + j];
        mask &= !(1 << j);
        if mask == 0 {
            break;
        }
        j = p as usize;
    }
    order.push(0);
    order.reverse();
    order
}

fn nn_order(ew: &EdgeWeights) -> Vec<usize> {
    let n = ew.n();
    let mut used = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cur = 0;
    used[0] = true;
    order.push(0);
    for _ in 1..n {
        let next = (0..n)
            .filter(|&v| !used[v])
            .min_by(|&a, &b| ew.get(cur, a).total_cmp(&ew.get(cur, b)))
            .expect("unvisited vertex");
        used[next] = true;
        order.push(next);
        cur = next;
    }
    order
}

const TWO_OPT_PASSES: usize = 50;

fn improve(ew: &EdgeWeights, mut t: Vec<usize>) -> Vec<usize> {
    let n = t.len();
    if n < 4 {
        return t;
    }
    for _ in 0..TWO_OPT_PASSES {
        let mut improved = false;
        for i in 0..n - 1 {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b, c, d) = (t[i], t[i + 1], t[j], t[(j + 1) % n]);
                let old = ew.get(a, b) + ew.get(c, d);
                let new = ew.get(a, c) + ew.get(b, d);
                if new < old - 1e-12 * old.abs().max(1.0) || (old.is_infinite() && new.is_finite()) {
                    t[i + 1..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    t
}

/// Nearest-neighbor tour starting at vertex 0.
pub fn nearest_neighbor_tour(ps: &PointSet, w: &WeightFunction, r: f64) -> Result<Vec<usize>> {
    check_inputs(ps, w, r)?;
    if ps.is_empty() {
        return Ok(Vec::new());
    }
    Ok(nn_order(&EdgeWeights::of(ps, w, r)))
}

/// 2-opt local search from the given tour.
pub fn two_opt(ps: &PointSet, w: &WeightFunction, r: f64, order: Vec<usize>) -> Result<Vec<usize>> {
    check_inputs(ps, w, r)?;
    Ok(improve(&EdgeWeights::of(ps, w, r), order))
}

/// Weight of the closed tour visiting `order`.
pub fn tour_weight(ps: &PointSet, w: &WeightFunction, r: f64, order: &[usize]) -> f64 {
    let n = order.len();
    if n < 2 {
        return 0.0;
    }
    (0..n).map(|k| w.edge(ps.point(order[k]), ps.point(order[(k + 1) % n]), r)).sum()
}

const HILBERT_BITS: u32 = 16;

/// Orders points along a Hilbert curve over their bounding cube (`d ≤ 3`);
/// coordinate sort in `d = 1`.
pub fn hilbert_tour(ps: &PointSet) -> Result<Vec<usize>> {
    let d = ps.dim();
    if !(1..=3).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut idx: Vec<usize> = (0..ps.len()).collect();
    if d == 1 || ps.len() < 2 {
        idx.sort_by(|&a, &b| lex_cmp(ps.point(a), ps.point(b)).then(a.cmp(&b)));
        return Ok(idx);
    }
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in ps.iter() {
        for k in 0..d {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let side = (0..d).map(|k| hi[k] - lo[k]).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let top = ((1u64 << HILBERT_BITS) - 1) as f64;
    let keys: Vec<u64> = ps
        .iter()
        .map(|p| {
            let mut x: Vec<u32> = (0..d).map(|k| (((p[k] - lo[k]) / side) * top).round() as u32).collect();
            hilbert_key(&mut x, HILBERT_BITS)
        })
        .collect();
    idx.sort_by_key(|&i| (keys[i], i));
    Ok(idx)
}

/// Skilling's transform of axes to the transposed Hilbert index, then bit
/// interleaving.
fn hilbert_key(x: &mut [u32], bits: u32) -> u64 {
    let n = x.len();
    let m = 1u32 << (bits - 1);
    let mut q = m;
    while q > 1 {
        let p = q - 1;
        for i in 0..n {
            if x[i] & q != 0 {
                x[0] ^= p;
            } else {
                let t = (x[0] ^ x[i]) & p;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
        q >>= 1;
    }
    for i in 1..n {
        x[i] ^= x[i - 1];
    }
    let mut t = 0;
    q = m;
    while q > 1 {
        if x[n - 1] & q != 0 {
            t ^= q - 1;
        }
        q >>= 1;
    }
    x.iter_mut().for_each(|v| *v ^= t);
    let mut key = 0u64;
    for b in (0..bits).rev() {
        for v in x.iter() {
            key = (key << 1) | ((v >> b) & 1) as u64;
        }
    }
    key
}
