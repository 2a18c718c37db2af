//! Graph parameters of `G(X, r)`: exact solvers, heuristics, certificate
//! checkers and the functional registry.
//!
//! Every solver splits the graph into connected components, orders each
//! component's vertices lexicographically by coordinates (then index), and
//! works on local indices. Witnesses are reported in global indices.

mod clique_cover;
mod covering;
mod domination;
mod eternal;
mod independence;
mod line;
mod packing;
mod registry;
pub mod verify;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::geograph::{components, GeometricGraph};

pub use clique_cover::clique_cover_number;
pub use covering::{kappa_ball_centers, kappa_ball_constant, net_cover, verify_ball_cover, NetCover};
pub use domination::domination_number;
pub use eternal::{eternal_domination_multiguard, eternal_domination_number};
pub use independence::{independence_number, vertex_cover_number};
pub use packing::{edge_cover_number, h_packing_number, h_packing_weighted, matching_number, HPattern};
pub use registry::{
    lookup, registry, registry_with, short_degree_constant, Decomposition, Evaluation, FunctionalDescriptor, GraphFn,
    PointFn, PropertyFlags,
};

/// Solver mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Heuristic,
}

/// Budgets for exact solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Branch-and-bound node cap summed over components.
    pub node_limit: u64,
    /// Largest component handled by the eternal-domination game search.
    pub eternal_cap: usize,
    /// Largest component handled by the multiset guard search.
    pub multiguard_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { node_limit: 10_000_000, eternal_cap: 16, multiguard_cap: 12 }
    }
}

/// Guard certificate for one component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuardCertificate {
    /// One guard per clique; any attack is answered inside the clique.
    CliquePartition(Vec<Vec<usize>>),
    /// Nonempty family of guard sets closed under attacks.
    SafeFamily(Vec<Vec<usize>>),
}

/// Certificate attached to a solve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    VertexSet(Vec<usize>),
    Partition(Vec<Vec<usize>>),
    Guards(Vec<GuardCertificate>),
    Edges(Vec<(usize, usize)>),
    Packing(Vec<Vec<usize>>),
}

/// Result of a graph-parameter computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub value: f64,
    pub exact: bool,
    pub lower: f64,
    pub upper: f64,
    pub witness: Option<Witness>,
    #[serde(with = "duration_ms", rename = "elapsed_ms")]
    pub elapsed: Duration,
}

mod duration_ms {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64() * 1e3)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let ms = f64::deserialize(d)?;
        Ok(Duration::from_secs_f64(ms.max(0.0) / 1e3))
    }
}

impl SolveResult {
    pub(crate) fn exact(value: usize, witness: Option<Witness>, start: Instant) -> Self {
        let v = value as f64;
        Self { value: v, exact: true, lower: v, upper: v, witness, elapsed: start.elapsed() }
    }

    pub(crate) fn bounded(value: f64, lower: f64, upper: f64, witness: Option<Witness>, start: Instant) -> Self {
        Self { value, exact: lower == upper, lower, upper, witness, elapsed: start.elapsed() }
    }
}

/// A connected component relabeled to local indices `0..n`, in
/// lexicographic coordinate order.
#[derive(Debug, Clone)]
pub(crate) struct Local {
    /// Global index of each local vertex.
    pub verts: Vec<usize>,
    pub adj: Vec<Vec<usize>>,
}

impl Local {
    pub fn n(&self) -> usize {
        self.verts.len()
    }

    pub fn to_global(&self, set: &[usize]) -> Vec<usize> {
        let mut v: Vec<usize> = set.iter().map(|&i| self.verts[i]).collect();
        v.sort_unstable();
        v
    }
}

/// Components of `g` as lexicographically ordered local graphs.
pub(crate) fn local_components(g: &GeometricGraph) -> Vec<Local> {
    let ps = g.points();
    let rank = {
        let order = ps.lex_order();
        let mut rank = vec![0usize; order.len()];
        for (k, &v) in order.iter().enumerate() {
            rank[v] = k;
        }
        rank
    };
    components(g)
        .into_iter()
        .map(|c| {
            let mut verts = c.members;
            verts.sort_by_key(|&v| rank[v]);
            let adj = g.induced(&verts);
            Local { verts, adj }
        })
        .collect()
}

/// Shared node counter for budgeted searches.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Budget {
    pub used: u64,
    pub limit: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Self { used: 0, limit }
    }

    /// Counts one node; returns false once the cap is hit.
    #[inline]
    pub fn tick(&mut self) -> bool {
        self.used += 1;
        self.used <= self.limit
    }
}
