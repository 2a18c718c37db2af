//! Covering constants and the covering-net dominating set.

use crate::error::{Error, Result};
use crate::geograph::{CellGrid, GeometricGraph};
use crate::lattice::{covering_spacing, lattice_points};
use crate::pointproc::{dist2, PointSet};

/// Centers of unit balls covering the closed ball `B_2(o)` in `R^dim`.
///
/// * `d = 1`: the intervals `[-2, 0]` and `[0, 2]`.
/// * `d = 2`: the unit disk at the origin plus seven disks centered on the
///   circle of radius `√3`. Six would be exactly tight; seven leave slack so
///   the sampled verification can use a positive margin.
/// * `d ≥ 3`: centers of a grid of `⌈2√d⌉^d` cubes tiling `[-2, 2]^d`, each
///   of circumradius below 1.
pub fn kappa_ball_centers(dim: usize) -> Result<Vec<Vec<f64>>> {
    match dim {
        0 => Err(Error::UnsupportedDimension(0)),
        1 => Ok(vec![vec![-1.0], vec![1.0]]),
        2 => {
            let rho = 3f64.sqrt();
            let mut c = vec![vec![0.0, 0.0]];
            for k in 0..7 {
                let a = 2.0 * std::f64::consts::PI * k as f64 / 7.0;
                c.push(vec![rho * a.cos(), rho * a.sin()]);
            }
            Ok(c)
        }
        d => {
            let k = (2.0 * (d as f64).sqrt()).ceil() as usize;
            let side = 4.0 / k as f64;
            let total = k.checked_pow(d as u32).ok_or(Error::UnsupportedDimension(d))?;
            Ok((0..total)
                .map(|mut code| {
                    (0..d)
                        .map(|_| {
                            let i = code % k;
                            code /= k;
                            -2.0 + (i as f64 + 0.5) * side
                        })
                        .collect()
                })
                .collect())
        }
    }
}

/// `κ(B_2(o))` upper bound: the number of centers in
/// [`kappa_ball_centers`].
pub fn kappa_ball_constant(dim: usize) -> Result<usize> {
    Ok(kappa_ball_centers(dim)?.len())
}

/// Checks that balls of radius `r_small` at `centers` cover `B_R(o)`.
///
/// On the line the interval union is checked exactly. Otherwise a grid of
/// spacing `eps` is sampled: every point of the ball lies within
/// `h = eps·√d/2` of a sample, so each sample must be within `r_small − h` of
/// a center.
pub fn verify_ball_cover(centers: &[Vec<f64>], big_radius: f64, r_small: f64, eps: f64) -> bool {
    let Some(dim) = centers.first().map(Vec::len) else {
        return false;
    };
    if dim == 1 {
        let mut iv: Vec<(f64, f64)> = centers.iter().map(|c| (c[0] - r_small, c[0] + r_small)).collect();
        iv.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut reached = -big_radius;
        for (a, b) in iv {
            if a > reached {
                break;
            }
            reached = reached.max(b);
        }
        return reached >= big_radius;
    }
    let h = eps * (dim as f64).sqrt() / 2.0;
    let reach = r_small - h;
    if reach <= 0.0 {
        return false;
    }
    let steps = (2.0 * (big_radius + h) / eps).ceil() as i64;
    let mut idx = vec![0i64; dim];
    let mut x = vec![0.0; dim];
    let reach2 = reach * reach;
    let limit2 = (big_radius + h) * (big_radius + h);
    loop {
        for k in 0..dim {
            x[k] = -(big_radius + h) + idx[k] as f64 * eps;
        }
        let norm2: f64 = x.iter().map(|c| c * c).sum();
        if norm2 <= limit2 && !centers.iter().any(|c| dist2(c, &x) <= reach2) {
            return false;
        }
        let mut k = 0;
        while k < dim && idx[k] == steps {
            idx[k] = 0;
            k += 1;
        }
        if k == dim {
            return true;
        }
        idx[k] += 1;
    }
}

/// Dominating set assembled from a covering net, in the frame `X / r`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct NetCover {
    /// Explicit dominating set (global indices, sorted).
    pub dominating: Vec<usize>,
    /// Net size `k_n`.
    pub net_size: usize,
    /// Net centers whose `δ`-ball contains a point.
    pub good: usize,
    /// Net centers whose `δ`-ball is empty.
    pub bad: usize,
    /// Half-radius balls used to cover each bad net ball.
    pub k0: usize,
}

impl NetCover {
    /// Certified bound `#good + K₀·#bad ≤ k_n + K₀·#bad`.
    pub fn upper_bound(&self) -> usize {
        self.good + self.k0 * self.bad
    }
}

/// Builds the covering-net dominating set for `G(ps, r)` over the box
/// `[lo, hi]` (unscaled coordinates), which must contain every point.
///
/// In the scaled frame, net centers `x_i` cover the box with balls of radius
/// `1 − δ`. A good center contributes the lexicographically first point of
/// `B_δ(x_i)`, which dominates all of `B_{1−δ}(x_i)`. A bad center is
/// handled by `K₀` balls of radius `(1 − δ)/2`, each contributing its first
/// point.
pub fn net_cover(ps: &PointSet, r: f64, delta: f64, lo: &[f64], hi: &[f64]) -> Result<NetCover> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(Error::Precondition(format!("delta {delta} must lie in (0, 1/4)")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Precondition(format!("radius {r} must be positive")));
    }
    let d = ps.dim();
    if lo.len() != d || hi.len() != d {
        return Err(Error::Precondition("box dimension mismatch".into()));
    }
    if ps.iter().any(|p| p.iter().zip(lo.iter().zip(hi)).any(|(c, (a, b))| c < a || c > b)) {
        return Err(Error::Precondition("points outside the net box".into()));
    }
    let scaled = PointSet::from_flat_unchecked(d, ps.coords().iter().map(|c| c / r).collect());
    let slo: Vec<f64> = lo.iter().map(|c| c / r).collect();
    let shi: Vec<f64> = hi.iter().map(|c| c / r).collect();
    let big = 1.0 - delta;
    // Net centers whose ball can meet the box.
    let spacing = covering_spacing(d, big);
    let ext_lo: Vec<f64> = slo.iter().map(|c| c - big).collect();
    let ext_hi: Vec<f64> = shi.iter().map(|c| c + big).collect();
    let net = lattice_points(d, spacing, &ext_lo, &ext_hi);
    let sub: Vec<Vec<f64>> =
        kappa_ball_centers(d)?.into_iter().map(|c| c.into_iter().map(|x| x * big / 2.0).collect()).collect();
    let k0 = sub.len();
    let grid = CellGrid::new(&scaled, 1.0);
    let lex = ps.lex_order();
    let mut rank = vec![0usize; lex.len()];
    for (k, &v) in lex.iter().enumerate() {
        rank[v] = k;
    }
    let first_within = |center: &[f64], rad: f64| -> Option<usize> {
        let mut best: Option<usize> = None;
        let r2 = rad * rad;
        grid.for_each_near(center, |j| {
            if dist2(center, scaled.point(j)) <= r2 && best.is_none_or(|b| rank[j] < rank[b]) {
                best = Some(j);
            }
        });
        best
    };
    let mut dominating = Vec::new();
    let (mut good, mut bad) = (0, 0);
    for x in &net {
        if let Some(v) = first_within(x, delta) {
            good += 1;
            dominating.push(v);
        } else {
            bad += 1;
            for s in &sub {
                let c: Vec<f64> = x.iter().zip(s).map(|(a, b)| a + b).collect();
                if let Some(v) = first_within(&c, big / 2.0) {
                    dominating.push(v);
                }
            }
        }
    }
    dominating.sort_unstable();
    dominating.dedup();
    Ok(NetCover { dominating, net_size: net.len(), good, bad, k0 })
}

/// Covering-net dominating set over the bounding box of the graph's points.
pub(crate) fn net_dominating_set(g: &GeometricGraph, delta: f64) -> Option<Vec<usize>> {
    let ps = g.points();
    if ps.is_empty() {
        return None;
    }
    let d = ps.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in ps.iter() {
        for k in 0..d {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    net_cover(ps, g.radius(), delta, &lo, &hi).ok().map(|c| c.dominating)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert_eq!(kappa_ball_constant(1).unwrap(), 2);
        assert_eq!(kappa_ball_constant(2).unwrap(), 8);
        assert_eq!(kappa_ball_constant(3).unwrap(), 64);
    }

    #[test]
    fn low_dimensional_covers_verify() {
        for d in [1, 2] {
            let c = kappa_ball_centers(d).unwrap();
            assert!(verify_ball_cover(&c, 2.0, 1.0, 0.01), "d = {d}");
            let mut missing = c.clone();
            missing.remove(1);
            assert!(!verify_ball_cover(&missing, 2.0, 1.0, 0.01), "d = {d}");
        }
        assert!(!verify_ball_cover(&[vec![-1.0], vec![1.0]], 2.0, 0.999, 0.01));
    }
}
