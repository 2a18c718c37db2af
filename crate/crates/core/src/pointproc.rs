//! Point sets, distributions and the coupled point-process samplers.

use std::cmp::Ordering;
use std::collections::HashSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

const MASS_TOL: f64 = 1e-12;

/// A finite set of distinct points in `R^d`, stored row-major.
///
/// Point order is meaningful: samplers emit points in generation order so
/// that prefixes realize the binomial/Poisson coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    /// Empty set in dimension `dim`.
    pub fn empty(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self { dim, coords: Vec::new() }
    }

    /// Builds a set from a flat coordinate buffer, validating finiteness and
    /// distinctness.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Precondition("dimension must be positive".into()));
        }
        if coords.len() % dim != 0 {
            return Err(Error::Precondition(format!(
                "coordinate count {} is not a multiple of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::Precondition(format!("point {} has a non-finite coordinate", i / dim)));
        }
        let ps = Self { dim, coords };
        if let Some((i, j)) = ps.first_duplicate() {
            return Err(Error::Precondition(format!("points {i} and {j} coincide")));
        }
        Ok(ps)
    }

    /// Builds a set from a list of points.
    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::Precondition(format!("point {i} has {} coordinates, expected {dim}", p.len())));
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    /// One-dimensional convenience constructor.
    pub fn from_line(xs: &[f64]) -> Result<Self> {
        Self::from_flat(1, xs.to_vec())
    }

    pub(crate) fn from_flat_unchecked(dim: usize, coords: Vec<f64>) -> Self {
        debug_assert!(coords.len() % dim == 0);
        Self { dim, coords }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn dist2(&self, i: usize, j: usize) -> f64 {
        dist2(self.point(i), self.point(j))
    }

    /// The first `n` points (or all of them).
    pub fn prefix(&self, n: usize) -> Self {
        let n = n.min(self.len());
        Self::from_flat_unchecked(self.dim, self.coords[..n * self.dim].to_vec())
    }

    /// Points at the given indices, in the given order.
    pub fn select(&self, idx: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            coords.extend_from_slice(self.point(i));
        }
        Self::from_flat_unchecked(self.dim, coords)
    }

    /// `self` followed by `other`; fails if a point occurs in both.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Precondition("dimension mismatch".into()));
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Self::from_flat(self.dim, coords)
    }

    /// `self` with one extra point appended.
    pub fn with_point(&self, p: &[f64]) -> Result<Self> {
        let mut coords = self.coords.clone();
        coords.extend_from_slice(p);
        Self::from_flat(self.dim, coords)
    }

    /// Vertex indices sorted lexicographically by coordinates, then index.
    pub fn lex_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| lex_cmp(self.point(a), self.point(b)).then(a.cmp(&b)));
        idx
    }

    fn first_duplicate(&self) -> Option<(usize, usize)> {
        let order = self.lex_order();
        order.windows(2).find(|w| self.point(w[0]) == self.point(w[1])).map(|w| (w[0].min(w[1]), w[0].max(w[1])))
    }
}

/// Lexicographic comparison of two coordinate vectors.
pub fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Absolutely continuous part of a distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AcPart {
    None,
    /// Uniform density on `Q_1 = [-1/2, 1/2)^d` carrying total mass `mass`.
    Uniform {
        mass: f64,
    },
    /// Piecewise-constant density on `Q_M`, `M = cells_per_axis / m`, with
    /// half-open cells of side `1/m`. `values` is indexed with the first
    /// coordinate varying slowest.
    Blocked {
        m: usize,
        cells_per_axis: usize,
        values: Vec<f64>,
    },
}

/// Uniform measure on the segment `[a, b]` with total mass `mass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub mass: f64,
}

/// A probability measure: absolutely continuous part plus segment measures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    dim: usize,
    ac: AcPart,
    singular: Vec<Segment>,
    /// Cumulative cell masses for blocked densities.
    #[serde(skip)]
    cell_cdf: Vec<f64>,
}

impl Distribution {
    pub fn new(dim: usize, ac: AcPart, singular: Vec<Segment>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDistribution("dimension must be positive".into()));
        }
        let mut cell_cdf = Vec::new();
        let ac_mass = match &ac {
            AcPart::None => 0.0,
            AcPart::Uniform { mass } => {
                if !(mass.is_finite() && *mass >= 0.0) {
                    return Err(Error::InvalidDistribution("negative uniform mass".into()));
                }
                *mass
            }
            AcPart::Blocked { m, cells_per_axis, values } => {
                if *m == 0 || *cells_per_axis == 0 {
                    return Err(Error::InvalidDistribution("empty block grid".into()));
                }
                let cells = cells_per_axis
                    .checked_pow(dim as u32)
                    .ok_or_else(|| Error::InvalidDistribution("block grid too large".into()))?;
                if values.len() != cells {
                    return Err(Error::InvalidDistribution(format!(
                        "blocked density needs {cells} values, got {}",
                        values.len()
                    )));
                }
                if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::InvalidDistribution("density values must be finite and nonnegative".into()));
                }
                let vol = (1.0 / *m as f64).powi(dim as i32);
                let mut acc = 0.0;
                for v in values {
                    acc += v * vol;
                    cell_cdf.push(acc);
                }
                acc
            }
        };
        for s in &singular {
            if s.a.len() != dim || s.b.len() != dim {
                return Err(Error::InvalidDistribution("segment dimension mismatch".into()));
            }
            if !(s.mass.is_finite() && s.mass >= 0.0) {
                return Err(Error::InvalidDistribution("segment mass must be nonnegative".into()));
            }
            if s.a == s.b && s.mass > 0.0 {
                return Err(Error::InvalidDistribution("degenerate segment would be an atom".into()));
            }
        }
        let total = ac_mass + singular.iter().map(|s| s.mass).sum::<f64>();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution(format!("total mass {total} differs from 1")));
        }
        Ok(Self { dim, ac, singular, cell_cdf })
    }

    /// The uniform distribution on `Q_1`.
    pub fn uniform(dim: usize) -> Self {
        Self::new(dim, AcPart::Uniform { mass: 1.0 }, Vec::new()).expect("valid")
    }

    /// Uniform distribution on a single segment.
    pub fn segment(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let dim = a.len();
        Self::new(dim, AcPart::None, vec![Segment { a, b, mass: 1.0 }])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ac_part(&self) -> &AcPart {
        &self.ac
    }

    pub fn singular_part(&self) -> &[Segment] {
        &self.singular
    }

    /// Total mass of the singular part.
    pub fn singular_mass(&self) -> f64 {
        self.singular.iter().map(|s| s.mass).sum()
    }

    /// Density of the absolutely continuous part at `x`.
    pub fn density(&self, x: &[f64]) -> f64 {
        match &self.ac {
            AcPart::None => 0.0,
            AcPart::Uniform { mass } => {
                if x.iter().all(|&c| (-0.5..0.5).contains(&c)) {
                    *mass
                } else {
                    0.0
                }
            }
            AcPart::Blocked { m, cells_per_axis, values } => {
                let side = *cells_per_axis as f64 / *m as f64;
                let mut idx = 0usize;
                for &c in x {
                    let u = (c + side / 2.0) * *m as f64;
                    if !(u >= 0.0 && u < *cells_per_axis as f64) {
                        return 0.0;
                    }
                    idx = idx * cells_per_axis + u.floor() as usize;
                }
                values[idx]
            }
        }
    }

    /// Draws one point.
    pub fn draw(&self, rng: &mut ChaCha8Rng, out: &mut Vec<f64>) {
        let u: f64 = rng.random();
        let ac_mass = 1.0 - self.singular_mass();
        if u < ac_mass || self.singular.is_empty() {
            self.draw_ac(rng, out);
            return;
        }
        let mut acc = ac_mass;
        let mut chosen = self.singular.last().expect("nonempty");
        for s in &self.singular {
            acc += s.mass;
            if u < acc {
                chosen = s;
                break;
            }
        }
        let t: f64 = rng.random();
        out.extend(chosen.a.iter().zip(&chosen.b).map(|(a, b)| a + t * (b - a)));
    }

    fn draw_ac(&self, rng: &mut ChaCha8Rng, out: &mut Vec<f64>) {
        match &self.ac {
            AcPart::None => unreachable!("mass validation excludes an empty measure"),
            AcPart::Uniform { .. } => {
                out.extend((0..self.dim).map(|_| rng.random::<f64>() - 0.5));
            }
            AcPart::Blocked { m, cells_per_axis, .. } => {
                let total = *self.cell_cdf.last().expect("nonempty grid");
                let target = rng.random::<f64>() * total;
                let mut cell = self.cell_cdf.partition_point(|&c| c <= target);
                cell = cell.min(self.cell_cdf.len() - 1);
                let h = 1.0 / *m as f64;
                let side = *cells_per_axis as f64 * h;
                let mut digits = vec![0usize; self.dim];
                for k in (0..self.dim).rev() {
                    digits[k] = cell % cells_per_axis;
                    cell /= cells_per_axis;
                }
                for d in digits {
                    let x = -side / 2.0 + (d as f64 + rng.random::<f64>()) * h;
                    out.push(x);
                }
            }
        }
    }
}

/// Draws `n` distinct points from `mu` using `rng`, redrawing on exact
/// collisions.
fn draw_distinct(mu: &Distribution, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let d = mu.dim();
    let mut coords = Vec::with_capacity(n * d);
    let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(n);
    let mut buf = Vec::with_capacity(d);
    while coords.len() < n * d {
        buf.clear();
        mu.draw(rng, &mut buf);
        let key: Vec<u64> = buf.iter().map(|c| c.to_bits()).collect();
        if seen.insert(key) {
            coords.extend_from_slice(&buf);
        }
    }
    coords
}

/// `X_n`: the first `n` points of the i.i.d. stream determined by `seed`.
pub fn sample_binomial(mu: &Distribution, n: usize, seed: u64) -> PointSet {
    let mut rng = rng::stream(seed, 0);
    PointSet::from_flat_unchecked(mu.dim(), draw_distinct(mu, n, &mut rng))
}

/// The coupled pair `(X_n, P_t)` sharing one i.i.d. stream.
#[derive(Debug, Clone)]
pub struct CoupledSample {
    mu: Distribution,
    stream_seed: u64,
    poisson_count: usize,
    prefix: PointSet,
}

impl CoupledSample {
    pub fn stream_seed(&self) -> u64 {
        self.stream_seed
    }

    /// `N_t`.
    pub fn poisson_count(&self) -> usize {
        self.poisson_count
    }

    /// `P_t`: the first `N_t` points of the stream.
    pub fn poisson(&self) -> &PointSet {
        &self.prefix
    }

    /// `X_n`: the first `n` points of the same stream.
    pub fn binomial(&self, n: usize) -> PointSet {
        if n <= self.poisson_count {
            self.prefix.prefix(n)
        } else {
            sample_binomial(&self.mu, n, self.stream_seed)
        }
    }
}

/// `P_t` with intensity `t·mu`, coupled to `X_n` through the shared stream.
pub fn sample_poisson_coupled(mu: &Distribution, t: f64, seed: u64) -> Result<CoupledSample> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Precondition(format!("intensity t = {t} must be positive")));
    }
    let poisson_count = poisson_draw(t, &mut rng::stream(seed, 1));
    Ok(CoupledSample {
        mu: mu.clone(),
        stream_seed: seed,
        poisson_count,
        prefix: sample_binomial(mu, poisson_count, seed),
    })
}

fn poisson_draw(mean: f64, rng: &mut ChaCha8Rng) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let p = Poisson::new(mean).expect("positive finite mean");
    let k: f64 = p.sample(rng);
    k as usize
}

/// `H_{λ,s}`: homogeneous Poisson process of intensity `lambda` in `Q_s`.
pub fn sample_homogeneous_box(lambda: f64, s: f64, dim: usize, seed: u64) -> Result<PointSet> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Precondition(format!("intensity {lambda} must be positive")));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Precondition(format!("box side {s} must be positive")));
    }
    if dim == 0 {
        return Err(Error::Precondition("dimension must be positive".into()));
    }
    let count = poisson_draw(lambda * s.powi(dim as i32), &mut rng::stream(seed, 1));
    let mu = Distribution::uniform(dim);
    let unit = sample_binomial(&mu, count, seed);
    // Scaling Q_1 by s lands in Q_s; clamp the rare rounding onto s/2.
    let half = s / 2.0;
    let coords = unit
        .coords
        .iter()
        .map(|c| {
            let x = c * s;
            if x >= half {
                half.next_down()
            } else {
                x
            }
        })
        .collect();
    Ok(PointSet::from_flat_unchecked(dim, coords))
}

/// `scale·ps + shift`.
pub fn transform(ps: &PointSet, scale: f64, shift: &[f64]) -> Result<PointSet> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Precondition(format!("scale {scale} must be positive")));
    }
    if shift.len() != ps.dim() {
        return Err(Error::Precondition("shift dimension mismatch".into()));
    }
    let d = ps.dim();
    let coords: Vec<f64> = ps.coords.iter().enumerate().map(|(k, c)| scale * c + shift[k % d]).collect();
    // Scaling can merge points only through underflow/rounding.
    PointSet::from_flat(d, coords)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_nonfinite() {
        assert!(PointSet::from_line(&[0.0, 1.0, 0.0]).is_err());
        assert!(PointSet::from_line(&[f64::NAN]).is_err());
        assert!(PointSet::from_flat(2, vec![0.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn mass_validation() {
        assert!(Distribution::new(1, AcPart::Uniform { mass: 0.5 }, vec![]).is_err());
        let seg = Segment { a: vec![0.0, 0.0], b: vec![1.0, 0.0], mass: 0.5 };
        assert!(Distribution::new(2, AcPart::Uniform { mass: 0.5 }, vec![seg]).is_ok());
        let blocked = AcPart::Blocked { m: 2, cells_per_axis: 2, values: vec![1.0, 3.0] };
        // Cells have length 1/2: mass = 0.5 + 1.5 = 2.
        assert!(Distribution::new(1, blocked, vec![]).is_err());
    }

    #[test]
    fn blocked_sampling_respects_zero_cells() {
        let ac = AcPart::Blocked { m: 1, cells_per_axis: 2, values: vec![0.0, 0.5, 0.0, 0.5] };
        let mu = Distribution::new(2, ac, vec![]).unwrap();
        let ps = sample_binomial(&mu, 2000, 3);
        for p in ps.iter() {
            assert!(p[1] >= 0.0 && p[1] < 1.0, "{p:?}");
            assert!(mu.density(p) > 0.0);
        }
    }

    #[test]
    fn homogeneous_box_support() {
        let ps = sample_homogeneous_box(3.0, 4.0, 2, 11).unwrap();
        for p in ps.iter() {
            assert!(p.iter().all(|&c| (-2.0..2.0).contains(&c)));
        }
    }
}
