//! Weighted optimization functionals on the complete graph: travelling
//! salesman, minimum matching, bipartite matching and minimum spanning tree,
//! with edge weights `w(r^{-1}(y − x))`.

mod matching;
mod mst;
mod tsp;
mod weight;

use serde::{Deserialize, Serialize};

pub use matching::{bipartite_matching, min_matching, MM_EXACT_CAP};
pub use mst::mst;
pub use tsp::{bipartite_tsp, hilbert_tour, nearest_neighbor_tour, tour_weight, tsp, two_opt, TSP_EXACT_CAP};
pub use weight::{validate_weight, FlagCheck, WeightFlags, WeightFunction, WeightReport};

use crate::error::{Error, Result};
use crate::invariants::{short_degree_constant, FunctionalDescriptor, Mode};
use crate::pointproc::PointSet;

/// Optimal or heuristic tour. `order` visits every vertex once; `edges`
/// closes the cycle (two copies of one edge when `n = 2`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourResult {
    pub weight: f64,
    pub order: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub exact: bool,
}

/// Near-perfect matching: `⌊n/2⌋` disjoint edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub weight: f64,
    pub edges: Vec<(usize, usize)>,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeResult {
    pub weight: f64,
    pub edges: Vec<(usize, usize)>,
    pub exact: bool,
}

/// Largest vertex count for which edge weights are tabulated up front.
const DENSE_CAP: usize = 1500;

/// Edge weights of the complete graph on a list of points, tabulated for
/// small inputs. With `types` set, same-type pairs weigh `w_max` (the
/// bipartite weight `w*`).
pub(crate) struct EdgeWeights<'a> {
    pts: Vec<&'a [f64]>,
    w: &'a WeightFunction,
    r: f64,
    types: Option<Vec<bool>>,
    dense: Option<Vec<f64>>,
}

impl<'a> EdgeWeights<'a> {
    pub fn new(pts: Vec<&'a [f64]>, w: &'a WeightFunction, r: f64, types: Option<Vec<bool>>) -> Self {
        let mut ew = Self { pts, w, r, types, dense: None };
        let n = ew.n();
        if n <= DENSE_CAP {
            let mut d = vec![0.0; n * n];
            for i in 0..n {
                for j in i + 1..n {
                    let v = ew.compute(i, j);
                    d[i * n + j] = v;
                    d[j * n + i] = v;
                }
            }
            ew.dense = Some(d);
        }
        ew
    }

    pub fn of(ps: &'a PointSet, w: &'a WeightFunction, r: f64) -> Self {
        Self::new(ps.iter().collect(), w, r, None)
    }

    pub fn n(&self) -> usize {
        self.pts.len()
    }

    fn compute(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        if let Some(t) = &self.types {
            if t[a] == t[b] {
                return self.w.w_max();
            }
        }
        self.w.edge(self.pts[a], self.pts[b], self.r)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        match &self.dense {
            Some(d) => d[i * self.n() + j],
            None => self.compute(i, j),
        }
    }
}

fn check_inputs(ps: &PointSet, w: &WeightFunction, r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Precondition(format!("scale must be positive, got {r}")));
    }
    if ps.dim() != w.dim() {
        return Err(Error::Precondition(format!(
            "weight is {}-dimensional, points are {}-dimensional",
            w.dim(),
            ps.dim()
        )));
    }
    Ok(())
}

/// Which single-set weighted functional a descriptor evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightedProblem {
    Tsp,
    Mm,
    Mst,
}

impl WeightedProblem {
    pub fn name(self) -> &'static str {
        match self {
            Self::Tsp => "tsp",
            Self::Mm => "mm",
            Self::Mst => "mst",
        }
    }
}

/// Descriptor for `TSP_w`, `MM_w` or `MST_w`.
///
/// Additivity constants are declared when `w` satisfies W1 and W5 with
/// `c5 ≤ 1` (and W7 for the tree): `c1 = c2 = 2·w_max` for tours,
/// `c1 = c2 = w_max` for matchings, `c1 = w_max`, `c2 = k·w_max` for trees,
/// with `k` the short-degree bound. Exact mode fails beyond the solver caps.
pub fn weighted_descriptor(problem: WeightedProblem, w: &WeightFunction, mode: Mode) -> FunctionalDescriptor {
    let dim = w.dim();
    let name = format!("{}[{}]", problem.name(), w.name());
    let wf = w.clone();
    let mut fd = FunctionalDescriptor::points(&name, dim, move |ps: &PointSet| match problem {
        WeightedProblem::Tsp => tsp(ps, &wf, 1.0, mode).map(|t| t.weight),
        WeightedProblem::Mm => min_matching(ps, &wf, 1.0, mode).map(|m| m.weight),
        WeightedProblem::Mst => mst(ps, &wf, 1.0).map(|t| t.weight),
    });
    let wm = w.w_max();
    let unit_w5 = w.flags.w1 && w.flags.w5.is_some_and(|c| c <= 1.0) && wm.is_finite();
    match problem {
        WeightedProblem::Tsp if unit_w5 => fd = fd.with_constants(2.0 * wm, 2.0 * wm, 0.0),
        WeightedProblem::Mm if unit_w5 => fd = fd.with_constants(wm, wm, 0.0),
        WeightedProblem::Mst if unit_w5 => {
            if let Some(delta) = w.flags.w7 {
                let k = short_degree_constant(dim, delta.min(1.0)) as f64;
                fd = fd.with_constants(wm, k * wm, 0.0);
            }
        }
        _ => {}
    }
    fd.flags.p7 = w.radial_monotone;
    if w.sup_on_ball(0.0).is_some() {
        let wf = w.clone();
        fd.local_growth = Some(std::sync::Arc::new(move |delta| wf.sup_on_ball(2.0 * delta).unwrap_or(f64::INFINITY)));
        fd.flags.p5 = true;
    }
    fd
}
