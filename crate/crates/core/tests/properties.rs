//! Structural invariants as proptest properties.

mod common;

use common::{brute_alpha, brute_edge_cover, brute_gammainf, brute_matching};
use proptest::prelude::*;
use rgg_limits::euclid_opt::{min_matching, mst, tsp, WeightFunction};
use rgg_limits::geograph::{
    build_graph, build_graph_brute, build_graph_periodic, component_count, isolated_count, torus_dist2,
};
use rgg_limits::invariants::{
    clique_cover_number, domination_number, eternal_domination_number, independence_number, lookup, matching_number,
    vertex_cover_number, Mode, SolveOptions,
};
use rgg_limits::pointproc::{sample_poisson_coupled, transform, Distribution, PointSet};

/// Point sets with 1..=max points in `[0, side)^dim`, `dim ∈ {1, 2}`.
fn point_sets(max: usize, side: f64) -> impl Strategy<Value = PointSet> {
    (1usize..=2).prop_flat_map(move |dim| {
        prop::collection::vec(0.0..side, dim..=dim * max).prop_filter_map("distinct points", move |mut c| {
            c.truncate(c.len() / dim * dim);
            PointSet::from_flat(dim, c).ok()
        })
    })
}

fn opts() -> SolveOptions {
    SolveOptions::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn grid_graph_matches_pairwise(ps in point_sets(40, 6.0), r in 0.1f64..2.5) {
        let a = build_graph(&ps, r).unwrap();
        let b = build_graph_brute(&ps, r).unwrap();
        prop_assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn periodic_graph_uses_minimum_image(ps in point_sets(25, 5.0), r in 0.1f64..2.4) {
        let g = build_graph_periodic(&ps, r, 5.0).unwrap();
        for i in 0..ps.len() {
            for j in i + 1..ps.len() {
                let d2 = torus_dist2(ps.point(i), ps.point(j), 5.0);
                prop_assert!(d2 <= ps.dist2(i, j) + 1e-12);
                prop_assert_eq!(g.has_edge(i, j), d2 <= r * r);
            }
        }
    }

    #[test]
    fn domination_chain(ps in point_sets(10, 5.0)) {
        let g = build_graph(&ps, 1.0).unwrap();
        let v = |r: rgg_limits::Result<rgg_limits::invariants::SolveResult>| r.unwrap().value as usize;
        let gamma = v(domination_number(&g, Mode::Exact, &opts()));
        let alpha = v(independence_number(&g, Mode::Exact, &opts()));
        let ginf = v(eternal_domination_number(&g, &opts()));
        let theta = v(clique_cover_number(&g, Mode::Exact, &opts()));
        prop_assert!(gamma <= alpha && alpha <= ginf && ginf <= theta);
        prop_assert_eq!(ginf, brute_gammainf(&g));
    }

    #[test]
    fn complements_and_gallai(ps in point_sets(14, 6.0)) {
        let g = build_graph(&ps, 1.0).unwrap();
        let n = g.n();
        let alpha = independence_number(&g, Mode::Exact, &opts()).unwrap().value as usize;
        prop_assert_eq!(alpha, brute_alpha(&g));
        let vc = vertex_cover_number(&g, Mode::Exact, &opts()).unwrap().value as usize;
        prop_assert_eq!(alpha + vc, n);
        let nu = matching_number(&g).value as usize;
        prop_assert_eq!(nu, brute_matching(&g));
        let eta = lookup(ps.dim(), "eta").unwrap().evaluate_graph(&g).unwrap().unwrap() as usize;
        prop_assert_eq!(eta, brute_edge_cover(&g));
        prop_assert_eq!(eta + nu + isolated_count(&g), n);
    }

    #[test]
    fn heuristics_bracket_exact(ps in point_sets(16, 6.0)) {
        let g = build_graph(&ps, 1.0).unwrap();
        let a = independence_number(&g, Mode::Exact, &opts()).unwrap();
        let ah = independence_number(&g, Mode::Heuristic, &opts()).unwrap();
        prop_assert!(ah.value <= a.value && a.value <= ah.upper);
        let c = domination_number(&g, Mode::Exact, &opts()).unwrap();
        let ch = domination_number(&g, Mode::Heuristic, &opts()).unwrap();
        prop_assert!(ch.value >= c.value && c.value >= ch.lower);
    }

    #[test]
    fn graph_functionals_are_translation_invariant(ps in point_sets(14, 5.0), dx in -40.0f64..40.0) {
        let shifted = transform(&ps, 1.0, &vec![dx; ps.dim()]).unwrap();
        let (g, h) = (build_graph(&ps, 1.0).unwrap(), build_graph(&shifted, 1.0).unwrap());
        prop_assume!(g.edges() == h.edges());
        for name in ["alpha", "gamma", "theta", "comps", "sigma", "vc", "eta"] {
            let f = lookup(ps.dim(), name).unwrap();
            prop_assert_eq!(f.evaluate(&ps).unwrap(), f.evaluate(&shifted).unwrap(), "{}", name);
        }
    }

    #[test]
    fn indicator_mst_counts_components(ps in point_sets(50, 10.0)) {
        let t = mst(&ps, &WeightFunction::indicator(ps.dim()), 1.0).unwrap();
        let k = component_count(&build_graph(&ps, 1.0).unwrap());
        prop_assert_eq!(t.weight, (k - 1) as f64);
    }

    #[test]
    fn tours_dominate_trees_and_matchings(ps in point_sets(9, 3.0), p in 0.5f64..2.0) {
        let w = WeightFunction::power(ps.dim(), p).unwrap();
        let t = tsp(&ps, &w, 1.0, Mode::Exact).unwrap().weight;
        let tree = mst(&ps, &w, 1.0).unwrap().weight;
        let m = min_matching(&ps, &w, 1.0, Mode::Exact).unwrap().weight;
        let tol = 1e-9 * t.max(1.0);
        // Deleting one edge of a tour leaves a spanning path.
        prop_assert!(tree <= t + tol);
        // Alternate edges of an optimal tour contain a near-perfect matching.
        prop_assert!(2.0 * m <= t + tol);
    }

    #[test]
    fn poisson_sample_is_a_binomial_prefix(t in 1.0f64..60.0, seed in any::<u64>()) {
        let mu = Distribution::uniform(2);
        let s = sample_poisson_coupled(&mu, t, seed).unwrap();
        let n = s.poisson_count();
        prop_assert_eq!(s.poisson(), &s.binomial(n));
        prop_assert_eq!(s.binomial(n + 5).prefix(n), s.binomial(n));
    }
}
