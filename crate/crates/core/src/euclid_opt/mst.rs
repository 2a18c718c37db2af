//! Minimum spanning tree on the complete weighted graph.

use super::{check_inputs, EdgeWeights, TreeResult, WeightFunction};
use crate::error::Result;
use crate::pointproc::PointSet;

/// `MST_w(r^{-1} X)` by Prim's algorithm, exact at any size.
pub fn mst(ps: &PointSet, w: &WeightFunction, r: f64) -> Result<TreeResult> {
    check_inputs(ps, w, r)?;
    let n = ps.len();
    if n <= 1 {
        return Ok(TreeResult { weight: 0.0, edges: Vec::new(), exact: true });
    }
    let ew = EdgeWeights::of(ps, w, r);
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut from = vec![0usize; n];
    let mut edges = Vec::with_capacity(n - 1);
    let mut weight = 0.0;
    let mut cur = 0;
    in_tree[0] = true;
    for _ in 1..n {
        let mut next = usize::MAX;
        for v in 0..n {
            if in_tree[v] {
                continue;
            }
            let c = ew.get(cur, v);
            if c < best[v] {
                best[v] = c;
                from[v] = cur;
            }
            if next == usize::MAX || best[v] < best[next] {
                next = v;
            }
        }
        in_tree[next] = true;
        weight += best[next];
        let (a, b) = (from[next], next);
        edges.push((a.min(b), a.max(b)));
        cur = next;
    }
    edges.sort_unstable();
    Ok(TreeResult { weight, edges, exact: true })
}
