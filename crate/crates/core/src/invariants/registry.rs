//! Functional descriptors: evaluation plus declared structural constants.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::{
    clique_cover_number, domination_number, edge_cover_number, eternal_domination_number, h_packing_number,
    independence_number, kappa_ball_constant, vertex_cover_number, HPattern, Mode, SolveOptions, SolveResult,
};
use crate::error::{Error, Result};
use crate::geograph::{build_graph, component_count, isolated_count, GeometricGraph};
use crate::pointproc::{transform, PointSet};

pub type GraphFn = Arc<dyn Fn(&GeometricGraph) -> Result<f64> + Send + Sync>;
pub type PointFn = Arc<dyn Fn(&PointSet) -> Result<f64> + Send + Sync>;

/// How a functional is evaluated.
#[derive(Clone)]
pub enum Evaluation {
    /// A graph parameter of `G(X, 1)`.
    Graph(GraphFn),
    /// A functional of the point set itself (weighted functionals).
    Points(PointFn),
}

/// Which structural properties are declared to hold.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PropertyFlags {
    /// Almost sub/superadditivity with the declared `c1`, `c2` applies to
    /// the functional itself (false for decomposed functionals, whose parts
    /// carry the constants).
    pub additive: bool,
    /// Local bound on `B_{1/2}(o)` (`local_bound`).
    pub p5_prime: bool,
    /// Local sublinear growth, checked against the weight modulus.
    pub p5: bool,
    /// Nondecreasing under adding points.
    pub p6: bool,
    /// `ζ_r` nonincreasing in `r`.
    pub p7: bool,
    /// Depends only on the graph `G(X, 1)`.
    pub p8: bool,
}

/// `ζ = c3·|X| − ζ′ + ζ″`.
#[derive(Clone)]
pub struct Decomposition {
    pub c3: f64,
    pub primed: Box<FunctionalDescriptor>,
    pub double_primed: Option<Box<FunctionalDescriptor>>,
}

/// A registered functional `ζ`.
///
/// `c1`, `c2` and `zeta_singleton` are the additivity constants. For a
/// decomposed functional they describe `ζ′`.
#[derive(Clone)]
pub struct FunctionalDescriptor {
    pub name: String,
    pub dim: usize,
    pub c1: f64,
    pub c2: f64,
    pub zeta_singleton: f64,
    /// Declared bound on `ζ(X)` for `X ⊂ B_{1/2}(o)`.
    pub local_bound: Option<f64>,
    /// Bound on `ζ(X)/|X|` for `X ⊂ B_δ(o)`, as a function of `δ`.
    pub local_growth: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    pub flags: PropertyFlags,
    pub decomposition: Option<Decomposition>,
    eval: Evaluation,
}

impl fmt::Debug for FunctionalDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionalDescriptor")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("c1", &self.c1)
            .field("c2", &self.c2)
            .field("zeta_singleton", &self.zeta_singleton)
            .field("k", &self.k())
            .field("c3", &self.c3())
            .field("flags", &self.flags)
            .finish()
    }
}

impl FunctionalDescriptor {
    pub fn new(name: &str, dim: usize, eval: Evaluation) -> Self {
        Self {
            name: name.to_string(),
            dim,
            c1: 0.0,
            c2: 0.0,
            zeta_singleton: 0.0,
            local_bound: None,
            local_growth: None,
            flags: PropertyFlags::default(),
            decomposition: None,
            eval,
        }
    }

    pub fn graph(name: &str, dim: usize, f: impl Fn(&GeometricGraph) -> Result<f64> + Send + Sync + 'static) -> Self {
        Self::new(name, dim, Evaluation::Graph(Arc::new(f)))
    }

    pub fn points(name: &str, dim: usize, f: impl Fn(&PointSet) -> Result<f64> + Send + Sync + 'static) -> Self {
        Self::new(name, dim, Evaluation::Points(Arc::new(f)))
    }

    pub fn with_constants(mut self, c1: f64, c2: f64, zeta_singleton: f64) -> Self {
        self.c1 = c1;
        self.c2 = c2;
        self.zeta_singleton = zeta_singleton;
        self.flags.additive = true;
        self
    }

    pub fn with_local_bound(mut self, b: f64) -> Self {
        self.local_bound = Some(b);
        self.flags.p5_prime = true;
        self
    }

    pub fn with_flags(mut self, p6: bool, p7: bool, p8: bool) -> Self {
        self.flags.p6 = p6;
        self.flags.p7 = p7;
        self.flags.p8 = p8;
        self
    }

    pub fn with_decomposition(
        mut self,
        c3: f64,
        primed: FunctionalDescriptor,
        double_primed: Option<FunctionalDescriptor>,
    ) -> Self {
        self.c1 = primed.c1;
        self.c2 = primed.c2;
        self.zeta_singleton = primed.zeta_singleton;
        self.flags.additive = false;
        self.decomposition =
            Some(Decomposition { c3, primed: Box::new(primed), double_primed: double_primed.map(Box::new) });
        self
    }

    /// Smoothness constant `K = max(c1 + ζ({o}), c2 − ζ({o}))`.
    pub fn k(&self) -> f64 {
        (self.c1 + self.zeta_singleton).max(self.c2 - self.zeta_singleton)
    }

    pub fn c3(&self) -> Option<f64> {
        self.decomposition.as_ref().map(|d| d.c3)
    }

    /// Bound on `|ζ(X ∪ {x}) − ζ(X)|`: `K`, or `c3 + K′ + K″` when decomposed.
    pub fn smoothness_bound(&self) -> f64 {
        match &self.decomposition {
            None => self.k(),
            Some(d) => d.c3 + d.primed.k() + d.double_primed.as_ref().map_or(0.0, |f| f.k()),
        }
    }

    pub fn is_graph(&self) -> bool {
        matches!(self.eval, Evaluation::Graph(_))
    }

    /// `ζ(X)` at scale 1.
    pub fn evaluate(&self, ps: &PointSet) -> Result<f64> {
        self.evaluate_at(ps, 1.0)
    }

    /// `ζ_r(X) = ζ(r^{-1} X)`.
    pub fn evaluate_at(&self, ps: &PointSet, r: f64) -> Result<f64> {
        if ps.is_empty() {
            return Ok(0.0);
        }
        match &self.eval {
            Evaluation::Graph(f) => f(&build_graph(ps, r)?),
            Evaluation::Points(f) => {
                if r == 1.0 {
                    f(ps)
                } else {
                    f(&transform(ps, 1.0 / r, &vec![0.0; ps.dim()])?)
                }
            }
        }
    }

    /// Graph parameter on a prebuilt graph; `None` for point functionals.
    pub fn evaluate_graph(&self, g: &GeometricGraph) -> Option<Result<f64>> {
        match &self.eval {
            Evaluation::Graph(f) => Some(if g.n() == 0 { Ok(0.0) } else { f(g) }),
            Evaluation::Points(_) => None,
        }
    }
}

/// Exact values only; bounds-only results surface as budget errors so that
/// property checks can skip them.
fn exact_value(r: Result<SolveResult>) -> Result<f64> {
    let r = r?;
    if r.exact {
        Ok(r.value)
    } else {
        Err(Error::BudgetExceeded { nodes: 0, lower: r.lower, upper: r.upper })
    }
}

/// Number of half-open cubes of side `δ/d` within unit distance of a given
/// one (itself included), plus 2: the short-degree bound for minimum
/// spanning trees under a weight vanishing on `B_δ(o)`.
pub fn short_degree_constant(dim: usize, delta: f64) -> usize {
    let h = delta / dim as f64;
    let reach = (1.0 / h).ceil() as i64 + 1;
    let mut count = 0usize;
    let mut m = vec![-reach; dim];
    loop {
        let gap2: f64 = m
            .iter()
            .map(|&k| {
                let a = (k.abs() - 1).max(0) as f64 * h;
                a * a
            })
            .sum();
        if gap2 <= 1.0 {
            count += 1;
        }
        let mut k = 0;
        while k < dim && m[k] == reach {
            m[k] = -reach;
            k += 1;
        }
        if k == dim {
            break;
        }
        m[k] += 1;
    }
    count + 2
}

/// All graph functionals in dimension `dim` with default solver budgets.
pub fn registry(dim: usize) -> Vec<FunctionalDescriptor> {
    registry_with(dim, SolveOptions::default())
}

/// All graph functionals in dimension `dim`.
pub fn registry_with(dim: usize, opts: SolveOptions) -> Vec<FunctionalDescriptor> {
    let kappa = kappa_ball_constant(dim).expect("positive dimension") as f64;
    let o = opts;
    let mut out = vec![
        FunctionalDescriptor::graph("alpha", dim, move |g| exact_value(independence_number(g, Mode::Exact, &o)))
            .with_constants(0.0, 1.0, 1.0)
            .with_local_bound(1.0)
            .with_flags(true, true, true),
        FunctionalDescriptor::graph("gamma", dim, move |g| exact_value(domination_number(g, Mode::Exact, &o)))
            .with_constants(0.0, 1.0 + kappa, 1.0)
            .with_local_bound(1.0)
            .with_flags(false, true, true),
        FunctionalDescriptor::graph("theta", dim, move |g| exact_value(clique_cover_number(g, Mode::Exact, &o)))
            .with_constants(0.0, 1.0, 1.0)
            .with_local_bound(1.0)
            .with_flags(true, true, true),
        FunctionalDescriptor::graph("gammainf", dim, move |g| exact_value(eternal_domination_number(g, &o)))
            .with_constants(0.0, 1.0 + kappa, 1.0)
            .with_local_bound(1.0)
            .with_flags(true, true, true),
        sigma(dim),
        components(dim),
    ];
    out.push(vc(dim, o));
    for h in [HPattern::k2(), HPattern::k3(), HPattern::p3()] {
        out.push(psi(dim, h, o));
    }
    out.push(eta(dim));
    out
}

fn sigma(dim: usize) -> FunctionalDescriptor {
    FunctionalDescriptor::graph("sigma", dim, |g| Ok(isolated_count(g) as f64))
        .with_constants(0.0, 1.0 + 3f64.powi(dim as i32), 1.0)
        .with_local_bound(1.0)
        .with_flags(false, true, true)
}

fn components(dim: usize) -> FunctionalDescriptor {
    let c2 = short_degree_constant(dim, 1.0) as f64 + 1.0;
    FunctionalDescriptor::graph("comps", dim, |g| Ok(component_count(g) as f64))
        .with_constants(0.0, c2, 1.0)
        .with_local_bound(1.0)
        .with_flags(false, true, true)
}

fn vc(dim: usize, o: SolveOptions) -> FunctionalDescriptor {
    let primed = FunctionalDescriptor::graph("vc_prime", dim, move |g| {
        exact_value(vertex_cover_number(g, Mode::Exact, &o)).map(|v| g.n() as f64 - v)
    })
    .with_constants(0.0, 1.0, 1.0)
    .with_local_bound(1.0)
    .with_flags(true, true, true);
    FunctionalDescriptor::graph("vc", dim, move |g| exact_value(vertex_cover_number(g, Mode::Exact, &o)))
        .with_flags(true, false, true)
        .with_decomposition(1.0, primed, None)
}

fn psi(dim: usize, h: HPattern, o: SolveOptions) -> FunctionalDescriptor {
    let hn = h.n as f64;
    let name = format!("psi:{}", h.name);
    let hp = h.clone();
    let primed = FunctionalDescriptor::graph(&format!("{name}_prime"), dim, move |g| {
        exact_value(h_packing_number(g, &hp, Mode::Exact, &o)).map(|v| g.n() as f64 / hn - v)
    })
    .with_constants(0.0, 1.0, 1.0 / hn)
    .with_local_bound(1.0 - 1.0 / hn)
    .with_flags(false, true, true);
    FunctionalDescriptor::graph(&name, dim, move |g| exact_value(h_packing_number(g, &h, Mode::Exact, &o)))
        .with_flags(true, false, true)
        .with_decomposition(1.0 / hn, primed, None)
}

fn eta(dim: usize) -> FunctionalDescriptor {
    let double_primed =
        FunctionalDescriptor::graph("psi:K2_prime", dim, |g| Ok(g.n() as f64 / 2.0 - super::matching_number(g).value))
            .with_constants(0.0, 1.0, 0.5)
            .with_local_bound(0.5)
            .with_flags(false, true, true);
    FunctionalDescriptor::graph("eta", dim, |g| Ok(edge_cover_number(g).value))
        .with_flags(true, false, true)
        .with_decomposition(0.5, sigma(dim), Some(double_primed))
}

/// Registry entry by name.
pub fn lookup(dim: usize, name: &str) -> Result<FunctionalDescriptor> {
    registry(dim)
        .into_iter()
        .find(|f| f.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::Parse(format!("unknown functional {name}")))
}
