//! Exact linear-time solvers for proper interval graphs.
//!
//! One-dimensional instances (and collinear ones) give unit interval graphs.
//! A component qualifies when, in the order of projection onto its principal
//! direction, every closed neighborhood is a contiguous run; then the
//! classical left-to-right greedy algorithms are optimal.

use super::Local;
use crate::pointproc::{dist2, PointSet};

/// Interval structure of one component.
pub(crate) struct IntervalOrder {
    /// Local vertex at each position.
    order: Vec<usize>,
    /// Last position adjacent (or equal) to each position.
    right: Vec<usize>,
}

impl IntervalOrder {
    /// Detects the proper interval order of `local`, if the projection order
    /// has contiguous closed neighborhoods.
    pub fn detect(ps: &PointSet, local: &Local) -> Option<Self> {
        let n = local.n();
        let p0 = ps.point(local.verts[0]);
        let far =
            local.verts.iter().copied().max_by(|&a, &b| dist2(p0, ps.point(a)).total_cmp(&dist2(p0, ps.point(b))))?;
        let dir: Vec<f64> = ps.point(far).iter().zip(p0).map(|(a, b)| a - b).collect();
        let proj: Vec<f64> = local
            .verts
            .iter()
            .map(|&v| ps.point(v).iter().zip(p0).zip(&dir).map(|((x, o), u)| (x - o) * u).sum())
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| proj[a].total_cmp(&proj[b]).then(a.cmp(&b)));
        let mut pos = vec![0usize; n];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        let mut right = vec![0usize; n];
        for (k, &v) in order.iter().enumerate() {
            let (mut lo, mut hi) = (k, k);
            for &u in &local.adj[v] {
                lo = lo.min(pos[u]);
                hi = hi.max(pos[u]);
            }
            if hi - lo != local.adj[v].len() {
                return None;
            }
            right[k] = hi;
        }
        Some(Self { order, right })
    }

    /// Maximum independent set (local indices).
    pub fn independent_set(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut last: Option<usize> = None;
        for p in 0..self.order.len() {
            if last.is_none_or(|q| self.right[q] < p) {
                out.push(self.order[p]);
                last = Some(p);
            }
        }
        out
    }

    /// Minimum clique partition (local indices).
    pub fn clique_partition(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut p = 0;
        while p < self.order.len() {
            let r = self.right[p];
            out.push(self.order[p..=r].to_vec());
            p = r + 1;
        }
        out
    }

    /// Minimum dominating set (local indices).
    pub fn dominating_set(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut p = 0;
        while p < self.order.len() {
            let c = self.right[p];
            out.push(self.order[c]);
            p = self.right[c] + 1;
        }
        out
    }
}
