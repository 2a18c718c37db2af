//! Geometric graphs `G(X, r)` and their basic combinatorics.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointproc::{dist2, PointSet};

/// `G(X, r)`: vertices are the points of `X`, edges join points at distance
/// at most `r`.
#[derive(Debug, Clone)]
pub struct GeometricGraph {
    points: PointSet,
    radius: f64,
    period: Option<f64>,
    adj: Vec<Vec<usize>>,
}

/// A connected component, identified by its smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub root: usize,
    pub members: Vec<usize>,
}

/// Uniform grid of cubic buckets used for neighbor search.
pub(crate) struct CellGrid {
    side: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl CellGrid {
    pub(crate) fn new(ps: &PointSet, side: f64) -> Self {
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in ps.iter().enumerate() {
            cells.entry(Self::key(p, side)).or_default().push(i);
        }
        Self { side, cells }
    }

    fn key(p: &[f64], side: f64) -> Vec<i64> {
        p.iter().map(|c| (c / side).floor() as i64).collect()
    }

    /// Calls `f` on every indexed point in the 3^d block of cells around `p`.
    pub(crate) fn for_each_near(&self, p: &[f64], mut f: impl FnMut(usize)) {
        let base = Self::key(p, self.side);
        let d = base.len();
        let mut off = vec![-1i64; d];
        let mut key = vec![0i64; d];
        loop {
            for k in 0..d {
                key[k] = base[k] + off[k];
            }
            if let Some(v) = self.cells.get(&key) {
                v.iter().for_each(|&j| f(j));
            }
            // Odometer over {-1, 0, 1}^d.
            let mut k = 0;
            while k < d && off[k] == 1 {
                off[k] = -1;
                k += 1;
            }
            if k == d {
                break;
            }
            off[k] += 1;
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("radius {r} must be positive and finite")))
    }
}

/// Builds `G(X, r)` with a cell grid of side `r`.
pub fn build_graph(ps: &PointSet, r: f64) -> Result<GeometricGraph> {
    check_radius(r)?;
    let n = ps.len();
    let r2 = r * r;
    let mut adj = vec![Vec::new(); n];
    if n > 0 {
        let grid = CellGrid::new(ps, r);
        for i in 0..n {
            let p = ps.point(i);
            grid.for_each_near(p, |j| {
                if j != i && dist2(p, ps.point(j)) <= r2 {
                    adj[i].push(j);
                }
            });
            adj[i].sort_unstable();
        }
    }
    Ok(GeometricGraph { points: ps.clone(), radius: r, period: None, adj })
}

/// Squared minimum-image distance on the flat torus of side `side`.
#[inline]
pub fn torus_dist2(a: &[f64], b: &[f64], side: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut t = (x - y).abs() % side;
            if t > side / 2.0 {
                t = side - t;
            }
            t * t
        })
        .sum()
}

/// Builds `G(X, r)` on the torus `Q_side` with opposite faces identified.
///
/// Requires `2r < side`, so the minimum-image distance is the torus metric
/// for every pair within range.
pub fn build_graph_periodic(ps: &PointSet, r: f64, side: f64) -> Result<GeometricGraph> {
    check_radius(r)?;
    if !(side > 2.0 * r) {
        return Err(Error::Precondition(format!("torus side {side} must exceed twice the radius {r}")));
    }
    let n = ps.len();
    let d = ps.dim();
    let r2 = r * r;
    let mut adj = vec![Vec::new(); n];
    let per_axis = (side / r).floor() as i64;
    if per_axis < 3 {
        for i in 0..n {
            for j in (i + 1)..n {
                if torus_dist2(ps.point(i), ps.point(j), side) <= r2 {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
    } else {
        let h = side / per_axis as f64;
        let key = |p: &[f64]| -> Vec<i64> {
            p.iter().map(|c| (((c + side / 2.0) / h).floor() as i64).rem_euclid(per_axis)).collect()
        };
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in ps.iter().enumerate() {
            cells.entry(key(p)).or_default().push(i);
        }
        let mut off = vec![-1i64; d];
        let mut nb = vec![0i64; d];
        for i in 0..n {
            let p = ps.point(i);
            let base = key(p);
            off.iter_mut().for_each(|o| *o = -1);
            loop {
                for k in 0..d {
                    nb[k] = (base[k] + off[k]).rem_euclid(per_axis);
                }
                if let Some(v) = cells.get(&nb) {
                    for &j in v {
                        if j != i && torus_dist2(p, ps.point(j), side) <= r2 {
                            adj[i].push(j);
                        }
                    }
                }
                let mut k = 0;
                while k < d && off[k] == 1 {
                    off[k] = -1;
                    k += 1;
                }
                if k == d {
                    break;
                }
                off[k] += 1;
            }
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    Ok(GeometricGraph { points: ps.clone(), radius: r, period: Some(side), adj })
}

/// Reference `O(n²)` construction.
pub fn build_graph_brute(ps: &PointSet, r: f64) -> Result<GeometricGraph> {
    check_radius(r)?;
    let n = ps.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if ps.dist2(i, j) <= r * r {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    Ok(GeometricGraph { points: ps.clone(), radius: r, period: None, adj })
}

impl GeometricGraph {
    /// Graph with explicit adjacency; used for hand-made test graphs.
    pub fn from_adjacency(points: PointSet, radius: f64, mut adj: Vec<Vec<usize>>) -> Result<Self> {
        if adj.len() != points.len() {
            return Err(Error::Precondition("adjacency size mismatch".into()));
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        for (i, a) in adj.iter().enumerate() {
            for &j in a {
                if j == i || j >= adj.len() || adj[j].binary_search(&i).is_err() {
                    return Err(Error::Precondition(format!("adjacency not symmetric or loop at {i}-{j}")));
                }
            }
        }
        Ok(Self { points, radius, period: None, adj })
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Torus side for periodic graphs.
    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::with_capacity(self.edge_count());
        for (i, a) in self.adj.iter().enumerate() {
            e.extend(a.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        e
    }

    /// Edge list text, one `i j` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for (i, j) in self.edges() {
            let _ = writeln!(s, "{i} {j}");
        }
        s
    }

    /// Adjacency of the subgraph induced by `verts`, in local indices.
    pub fn induced(&self, verts: &[usize]) -> Vec<Vec<usize>> {
        let pos: HashMap<usize, usize> = verts.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        verts
            .iter()
            .map(|&v| {
                let mut a: Vec<usize> = self.adj[v].iter().filter_map(|u| pos.get(u).copied()).collect();
                a.sort_unstable();
                a
            })
            .collect()
    }
}

/// Connected components ordered by smallest member; members sorted.
pub fn components(g: &GeometricGraph) -> Vec<Cluster> {
    components_of(g.adjacency())
}

pub(crate) fn components_of(adj: &[Vec<usize>]) -> Vec<Cluster> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        queue.push_back(s);
        let mut members = Vec::new();
        while let Some(v) = queue.pop_front() {
            members.push(v);
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        members.sort_unstable();
        out.push(Cluster { root: s, members });
    }
    out
}

/// Number of connected components.
pub fn component_count(g: &GeometricGraph) -> usize {
    components(g).len()
}

/// The component containing `v`.
pub fn cluster_of(g: &GeometricGraph, v: usize) -> Result<Cluster> {
    if v >= g.n() {
        return Err(Error::Precondition(format!("vertex {v} out of range")));
    }
    let mut seen = HashSet::from([v]);
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        for &u in g.neighbors(x) {
            if seen.insert(u) {
                stack.push(u);
            }
        }
    }
    let mut members: Vec<usize> = seen.into_iter().collect();
    members.sort_unstable();
    Ok(Cluster { root: members[0], members })
}

/// `σ`: number of isolated vertices.
pub fn isolated_count(g: &GeometricGraph) -> usize {
    g.adj.iter().filter(|a| a.is_empty()).count()
}

/// `∂_Z(Y)` at scale `r`: indices of points of `Y` within distance `r` of `Z`.
pub fn boundary_set(y: &PointSet, z: &PointSet, r: f64) -> Result<Vec<usize>> {
    check_radius(r)?;
    if y.dim() != z.dim() {
        return Err(Error::Precondition("dimension mismatch".into()));
    }
    let zkeys: HashSet<Vec<u64>> = z.iter().map(|p| p.iter().map(|c| c.to_bits()).collect()).collect();
    for (i, p) in y.iter().enumerate() {
        let k: Vec<u64> = p.iter().map(|c| c.to_bits()).collect();
        if zkeys.contains(&k) {
            return Err(Error::Overlap { index: i });
        }
    }
    if z.is_empty() {
        return Ok(Vec::new());
    }
    let grid = CellGrid::new(z, r);
    let r2 = r * r;
    let mut out = Vec::new();
    for (i, p) in y.iter().enumerate() {
        let mut hit = false;
        grid.for_each_near(p, |j| hit |= dist2(p, z.point(j)) <= r2);
        if hit {
            out.push(i);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_line_graph() {
        let ps = PointSet::from_line(&[0.0, 0.5, 2.0]).unwrap();
        let g = build_graph(&ps, 1.0).unwrap();
        assert_eq!(g.edges(), vec![(0, 1)]);
        assert_eq!(component_count(&g), 2);
        assert_eq!(isolated_count(&g), 1);
        assert_eq!(g.to_edge_list(), "0 1\n");
    }

    #[test]
    fn closed_ball_keeps_ties() {
        let ps = PointSet::from_line(&[0.0, 1.0]).unwrap();
        assert_eq!(build_graph(&ps, 1.0).unwrap().edge_count(), 1);
    }

    #[test]
    fn torus_wraps_around() {
        let ps = PointSet::from_line(&[-1.9, 1.9]).unwrap();
        let g = build_graph_periodic(&ps, 1.0, 4.0).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(build_graph_periodic(&ps, 1.0, 2.0).is_err());
    }

    #[test]
    fn boundary_overlap_rejected() {
        let y = PointSet::from_line(&[0.0, 3.0]).unwrap();
        let z = PointSet::from_line(&[3.0]).unwrap();
        assert_eq!(boundary_set(&y, &z, 1.0), Err(Error::Overlap { index: 1 }));
    }
}
