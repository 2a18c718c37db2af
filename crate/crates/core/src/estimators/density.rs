//! Deterministic density constructions and the covering-net bounds for
//! domination.

use std::collections::HashSet;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geograph::{build_graph, CellGrid};
use crate::invariants::{net_cover, FunctionalDescriptor, NetCover};
use crate::lattice::{covering_spacing, lattice_points};
use crate::pointproc::{dist2, PointSet};
use crate::rng;

/// Guard keeping packing spacings strictly above 1 and covering radii
/// strictly below 1.
const GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityKind {
    ExactReference,
    LowerBound,
    UpperBound,
}

/// A reference value for one of the density constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityConstant {
    /// One of `alpha_bar`, `kappa_bar`, `theta_bar`, `zeta_bar`.
    pub name: String,
    pub dim: usize,
    pub value: f64,
    pub kind: DensityKind,
}

/// Known values: packing density of half-unit balls for `d ≤ 3`, unit-ball
/// covering density for `d ≤ 2`, diameter-one partition density for `d = 1`
/// and the hexagonal upper bound for `d = 2`.
pub fn reference_constants() -> Vec<DensityConstant> {
    let c = |name: &str, dim, value, kind| DensityConstant { name: name.into(), dim, value, kind };
    use DensityKind::*;
    vec![
        c("alpha_bar", 1, 1.0, ExactReference),
        c("alpha_bar", 2, (4.0f64 / 3.0).sqrt(), ExactReference),
        c("alpha_bar", 3, 2f64.sqrt(), ExactReference),
        c("kappa_bar", 1, 0.5, ExactReference),
        c("kappa_bar", 2, (4.0f64 / 27.0).sqrt(), ExactReference),
        c("theta_bar", 1, 1.0, ExactReference),
        c("theta_bar", 2, (64.0f64 / 27.0).sqrt(), UpperBound),
    ]
}

fn reference(name: &str, dim: usize) -> Option<&'static DensityConstant> {
    use std::sync::OnceLock;
    static TABLE: OnceLock<Vec<DensityConstant>> = OnceLock::new();
    TABLE.get_or_init(reference_constants).iter().find(|c| c.name == name && c.dim == dim)
}

/// Upper bound on `ζ̄` for a registered functional, when one is known:
/// `ᾱ` for independence, `θ̄` (or its bound) for clique cover and eternal
/// domination, which lies between the two.
pub fn zeta_bar_reference(functional: &str, dim: usize) -> Option<f64> {
    match functional {
        "alpha" => reference("alpha_bar", dim).map(|c| c.value),
        "theta" | "gammainf" => reference("theta_bar", dim).map(|c| c.value),
        _ => None,
    }
}

/// A lattice construction in `Q_s` with its verification outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeCertificate {
    /// Lattice points in `Q_s`.
    pub points: PointSet,
    /// `|points| / s^d`.
    pub density: f64,
    /// Points used by the certificate (for coverings, every center whose
    /// ball meets `Q_s`).
    pub certificate_size: usize,
    pub verified: bool,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

fn in_box(p: &[f64], s: f64) -> bool {
    p.iter().all(|&c| c >= -s / 2.0 && c < s / 2.0)
}

/// Lattice points of the given spacing (integer lattice on the line,
/// triangular in the plane) inside `Q_s`.
pub fn packing_lattice(dim: usize, s: f64, spacing: f64) -> Result<PointSet> {
    check_dim(dim)?;
    let lo = vec![-s / 2.0; dim];
    let hi = vec![s / 2.0; dim];
    let pts: Vec<Vec<f64>> = lattice_points(dim, spacing, &lo, &hi).into_iter().filter(|p| in_box(p, s)).collect();
    PointSet::from_points(dim, &pts)
}

/// All pairwise distances exceed 1.
pub fn verify_packing(ps: &PointSet) -> bool {
    build_graph(ps, 1.0).is_ok_and(|g| g.edge_count() == 0)
}

/// Packing of unit-separated points in `Q_s`; its density approximates `ᾱ`.
pub fn lattice_packing_density(dim: usize, s: f64) -> Result<LatticeCertificate> {
    let points = packing_lattice(dim, s, 1.0 + GUARD)?;
    let verified = verify_packing(&points);
    Ok(LatticeCertificate {
        density: points.len() as f64 / s.powi(dim as i32),
        certificate_size: points.len(),
        points,
        verified,
    })
}

/// Centers of the covering lattice with circumradius `radius` whose unit
/// balls meet `Q_s`.
pub fn covering_lattice(dim: usize, s: f64, radius: f64) -> Result<PointSet> {
    check_dim(dim)?;
    let spacing = covering_spacing(dim, radius);
    // Half-spacing shift keeps the centers symmetric inside the half-open cube.
    let shift = spacing / 2.0;
    let lo = vec![-s / 2.0 - 1.0 - shift; dim];
    let hi = vec![s / 2.0 + 1.0 - shift; dim];
    let pts: Vec<Vec<f64>> = lattice_points(dim, spacing, &lo, &hi)
        .into_iter()
        .map(|p| p.into_iter().map(|c| c + shift).collect::<Vec<f64>>())
        .filter(|p| {
            let gap2: f64 = p.iter().map(|&c| (c.abs() - s / 2.0).max(0.0).powi(2)).sum();
            gap2 < 1.0
        })
        .collect();
    PointSet::from_points(dim, &pts)
}

const COVER_TOP_CELL: f64 = 0.25;
const COVER_MAX_DEPTH: u32 = 48;

/// Checks that closed balls of radius `radius` at `centers` cover the
/// closed cube `[-s/2, s/2]^d`.
///
/// The cube is cut into cells; a cell is certified when one ball contains
/// it entirely (its center lies within `radius − half-diagonal` of a ball
/// center). Uncertified cells are split until certified; a cell whose
/// center is uncovered fails the check.
pub fn verify_covering(centers: &PointSet, s: f64, radius: f64) -> bool {
    let d = centers.dim();
    if centers.is_empty() || radius <= 0.0 {
        return false;
    }
    let grid = CellGrid::new(centers, radius);
    let covered_within = |c: &[f64], reach: f64| -> bool {
        if reach < 0.0 {
            return false;
        }
        let r2 = reach * reach;
        let mut hit = false;
        grid.for_each_near(c, |j| hit |= dist2(c, centers.point(j)) <= r2);
        hit
    };
    let top = (s / COVER_TOP_CELL).ceil().max(1.0) as usize;
    let side0 = s / top as f64;
    let mut stack: Vec<(Vec<f64>, f64, u32)> = Vec::new();
    let mut idx = vec![0usize; d];
    loop {
        let lo: Vec<f64> = idx.iter().map(|&i| -s / 2.0 + i as f64 * side0).collect();
        stack.push((lo, side0, 0));
        while let Some((lo, side, depth)) = stack.pop() {
            let c: Vec<f64> = lo.iter().map(|x| x + side / 2.0).collect();
            let half_diag = side * (d as f64).sqrt() / 2.0;
            if covered_within(&c, radius - half_diag) {
                continue;
            }
            if !covered_within(&c, radius) || depth == COVER_MAX_DEPTH {
                return false;
            }
            let h = side / 2.0;
            for code in 0..1usize << d {
                let sub: Vec<f64> = (0..d).map(|k| lo[k] + if code >> k & 1 == 1 { h } else { 0.0 }).collect();
                stack.push((sub, h, depth + 1));
            }
        }
        let mut k = 0;
        while k < d && idx[k] == top - 1 {
            idx[k] = 0;
            k += 1;
        }
        if k == d {
            break;
        }
        idx[k] += 1;
    }
    true
}

/// Covering of `Q_s` by unit balls on a lattice of circumradius just below
/// one. The density counts lattice centers inside `Q_s`; the certificate
/// uses every center whose ball meets `Q_s`.
pub fn lattice_covering_density(dim: usize, s: f64) -> Result<LatticeCertificate> {
    let all = covering_lattice(dim, s, 1.0 - GUARD)?;
    let verified = verify_covering(&all, s, 1.0);
    let inside: Vec<usize> = (0..all.len()).filter(|&i| in_box(all.point(i), s)).collect();
    let points = all.select(&inside);
    Ok(LatticeCertificate {
        density: points.len() as f64 / s.powi(dim as i32),
        certificate_size: all.len(),
        points,
        verified,
    })
}

/// Partition of the plane into regular hexagons of diameter one, viewed in
/// `Q_s`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HexagonPartition {
    /// Cells whose center lies in `Q_s`, over `s²`.
    pub density: f64,
    pub cells_centered_inside: usize,
    /// Cells meeting `Q_s`: the pieces of a partition of `Q_s` into sets of
    /// diameter at most one.
    pub cells_meeting: usize,
    /// Every cell has diameter at most one.
    pub diameters_verified: bool,
}

const HEX_RADIUS: f64 = 0.5;

fn hexagon(center: &[f64]) -> [[f64; 2]; 6] {
    let mut v = [[0.0; 2]; 6];
    for (k, p) in v.iter_mut().enumerate() {
        let a = std::f64::consts::PI / 3.0 * k as f64;
        *p = [center[0] + HEX_RADIUS * a.cos(), center[1] + HEX_RADIUS * a.sin()];
    }
    v
}

/// Separating-axis test between a convex hexagon and the closed box
/// `[-h, h]^2`.
fn hexagon_meets_box(hex: &[[f64; 2]; 6], h: f64) -> bool {
    let corners = [[-h, -h], [h, -h], [h, h], [-h, h]];
    let mut axes: Vec<[f64; 2]> = vec![[1.0, 0.0], [0.0, 1.0]];
    for k in 0..6 {
        let (a, b) = (hex[k], hex[(k + 1) % 6]);
        axes.push([-(b[1] - a[1]), b[0] - a[0]]);
    }
    axes.iter().all(|ax| {
        let proj = |p: &[f64; 2]| p[0] * ax[0] + p[1] * ax[1];
        let (h0, h1) =
            hex.iter().map(proj).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let (b0, b1) =
            corners.iter().map(proj).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        h1 >= b0 && b1 >= h0
    })
}

/// The hexagonal partition of diameter-one cells restricted to `Q_s`.
pub fn hexagon_partition(s: f64) -> Result<HexagonPartition> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Precondition(format!("box side {s} must be positive")));
    }
    // Centers of a hexagonal tiling with vertices at angles kπ/3.
    let a1 = [1.5 * HEX_RADIUS, 3f64.sqrt() / 2.0 * HEX_RADIUS];
    let a2 = [0.0, 3f64.sqrt() * HEX_RADIUS];
    let reach = s / 2.0 + 1.0;
    let imax = (reach / a1[0]).ceil() as i64;
    let (mut inside, mut meeting) = (0usize, 0usize);
    let mut diam_ok = true;
    for i in -imax..=imax {
        let x = i as f64 * a1[0];
        let y0 = i as f64 * a1[1];
        let jlo = ((-reach - y0) / a2[1]).floor() as i64;
        let jhi = ((reach - y0) / a2[1]).ceil() as i64;
        for j in jlo..=jhi {
            let c = [x, y0 + j as f64 * a2[1]];
            let hex = hexagon(&c);
            if !hexagon_meets_box(&hex, s / 2.0) {
                continue;
            }
            meeting += 1;
            if in_box(&c, s) {
                inside += 1;
            }
            for p in 0..6 {
                for q in p + 1..6 {
                    diam_ok &= dist2(&hex[p], &hex[q]) <= 1.0 + 1e-12;
                }
            }
        }
    }
    Ok(HexagonPartition {
        density: inside as f64 / (s * s),
        cells_centered_inside: inside,
        cells_meeting: meeting,
        diameters_verified: diam_ok,
    })
}

pub fn hexagon_partition_density(s: f64) -> Result<f64> {
    Ok(hexagon_partition(s)?.density)
}

/// Best configuration found by the `ζ*` search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaStar {
    /// `ζ` of the best configuration: a lower bound on `ζ*(Q_s)`.
    pub value: f64,
    /// `value / s^d`.
    pub density: f64,
    pub points: PointSet,
}

/// Lower bound on `ζ*(Q_s)` by local search from a unit-separated lattice
/// packing of `Q_s`. Proposals add a uniform point (kept when `ζ`
/// increases) or jitter one point (kept when `ζ` does not decrease).
/// Proposals that exceed a solver budget are discarded.
pub fn zeta_star_lower(f: &FunctionalDescriptor, s: f64, budget: usize, seed: u64) -> Result<ZetaStar> {
    if !f.flags.p6 {
        return Err(Error::Precondition(format!("{} is not flagged monotone in X", f.name)));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Precondition(format!("box side {s} must be positive")));
    }
    let d = f.dim;
    let mut cur = if d <= 2 { packing_lattice(d, s, 1.0 + GUARD)? } else { PointSet::from_points(d, &[vec![0.0; d]])? };
    let mut best = f.evaluate(&cur)?;
    let mut rng = rng::stream(seed, 11);
    for _ in 0..budget {
        let cand = if cur.is_empty() || rng.random::<f64>() < 0.5 {
            let p: Vec<f64> = (0..d).map(|_| (rng.random::<f64>() - 0.5) * s).collect();
            match cur.with_point(&p) {
                Ok(c) => (c, true),
                Err(_) => continue,
            }
        } else {
            let i = rng.random_range(0..cur.len());
            let mut coords = cur.coords().to_vec();
            for k in 0..d {
                let step: f64 = rng.sample(StandardNormal);
                let x = coords[i * d + k] + 0.1 * step;
                coords[i * d + k] = x.clamp(-s / 2.0, (s / 2.0).next_down());
            }
            match PointSet::from_flat(d, coords) {
                Ok(c) => (c, false),
                Err(_) => continue,
            }
        };
        let (next, grows) = cand;
        let v = match f.evaluate(&next) {
            Ok(v) => v,
            Err(Error::BudgetExceeded { .. }) => continue,
            Err(e) => return Err(e),
        };
        if v > best || (!grows && v >= best) {
            best = v;
            cur = next;
        }
    }
    Ok(ZetaStar { value: best, density: best / s.powi(d as i32), points: cur })
}

/// Certified bounds on the domination number of `G(X, r)` for `X ⊂ Q_1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringBounds {
    /// `r^{-d}(1 + dδ)^{-d} κ̄ − #empty cells`; `None` without a `κ̄`
    /// reference in this dimension.
    pub lower: Option<f64>,
    /// Size of the explicit net dominating set.
    pub upper: usize,
    pub net: NetCover,
    pub cells: f64,
    pub empty_cells: f64,
    /// Set for empty inputs, where both bounds are vacuous.
    pub degenerate: bool,
}

/// Covering-net bounds `lower ≤ γ(G(X, r)) ≤ upper` for `X ⊂ Q_1`,
/// `δ ∈ (0, 1/4)`.
pub fn domination_bounds_via_covering(ps: &PointSet, r: f64, delta: f64) -> Result<CoveringBounds> {
    let d = ps.dim();
    if !ps.iter().all(|p| in_box(p, 1.0)) {
        return Err(Error::Precondition("points must lie in Q_1".into()));
    }
    let net = net_cover(ps, r, delta, &vec![-0.5; d], &vec![0.5; d])?;
    // Cubes of side r^{-1}/⌈r^{-1}/δ⌉ partitioning the scaled cube.
    let m = (1.0 / (r * delta)).ceil();
    let side = (1.0 / r) / m;
    let occupied: HashSet<Vec<i64>> = ps
        .iter()
        .map(|p| p.iter().map(|&c| (((c + 0.5) / r / side).floor() as i64).min(m as i64 - 1)).collect())
        .collect();
    let cells = m.powi(d as i32);
    let empty = cells - occupied.len() as f64;
    let lower = reference("kappa_bar", d)
        .map(|k| r.powi(-(d as i32)) * (1.0 + d as f64 * delta).powi(-(d as i32)) * k.value - empty);
    Ok(CoveringBounds { lower, upper: net.dominating.len(), net, cells, empty_cells: empty, degenerate: ps.is_empty() })
}
