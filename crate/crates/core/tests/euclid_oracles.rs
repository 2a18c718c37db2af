//! Weighted solvers against permutation, matching and Prüfer enumeration.

mod common;

use common::*;
use rand::Rng;
use rgg_limits::euclid_opt::{
    bipartite_matching, bipartite_tsp, hilbert_tour, min_matching, mst, nearest_neighbor_tour, tour_weight, tsp,
    two_opt, validate_weight, WeightFunction,
};
use rgg_limits::geograph::{build_graph, component_count};
use rgg_limits::invariants::Mode;
use rgg_limits::pointproc::PointSet;
use rgg_limits::rng;

const SPECS: [&str; 6] = ["pow:1", "pow:2", "indicator", "trunc:pow:1:0.7", "restrict:log:0.4", "sinmod"];

fn points(seed: u64, dim: usize, n: usize, side: f64) -> PointSet {
    let mut r = rng::stream(seed, 3);
    let c: Vec<f64> = (0..n * dim).map(|_| r.random_range(0.0..side)).collect();
    PointSet::from_flat(dim, c).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn edge_fn<'a>(ps: &'a PointSet, w: &'a WeightFunction, r: f64) -> impl Fn(usize, usize) -> f64 + 'a {
    move |i, j| {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        w.edge(ps.point(a), ps.point(b), r)
    }
}

#[test]
fn tsp_matches_permutations_and_heuristics_dominate() {
    for seed in 0..60u64 {
        for dim in [1, 2] {
            let n = 1 + (seed as usize % 9);
            let ps = points(seed, dim, n, 3.0);
            for spec in SPECS {
                let w = WeightFunction::parse(spec, dim).unwrap();
                let r = 0.5 + (seed % 3) as f64 * 0.5;
                let ex = tsp(&ps, &w, r, Mode::Exact).unwrap();
                let bf = brute_tsp(&edge_fn(&ps, &w, r), n);
                assert!(close(ex.weight, bf), "{spec} seed {seed}: {} vs {bf}", ex.weight);
                assert!(close(ex.weight, tour_weight(&ps, &w, r, &ex.order)));
                let mut o = ex.order.clone();
                o.sort_unstable();
                assert_eq!(o, (0..n).collect::<Vec<_>>());
                let h = tsp(&ps, &w, r, Mode::Heuristic).unwrap();
                assert!(h.weight >= ex.weight - 1e-9 * ex.weight.max(1.0));
                let nn = nearest_neighbor_tour(&ps, &w, r).unwrap();
                let opt = two_opt(&ps, &w, r, nn.clone()).unwrap();
                assert!(tour_weight(&ps, &w, r, &opt) <= tour_weight(&ps, &w, r, &nn) + 1e-12);
            }
        }
    }
}

#[test]
fn matching_matches_enumeration() {
    for seed in 0..60u64 {
        for dim in [1, 2] {
            let n = seed as usize % 11;
            let ps = points(seed + 100, dim, n, 3.0);
            for spec in SPECS {
                let w = WeightFunction::parse(spec, dim).unwrap();
                let ex = min_matching(&ps, &w, 1.0, Mode::Exact).unwrap();
                let bf = brute_mm(&edge_fn(&ps, &w, 1.0), n);
                assert!(close(ex.weight, bf), "{spec} seed {seed}: {} vs {bf}", ex.weight);
                assert_eq!(ex.edges.len(), n / 2);
                let mut seen = vec![false; n];
                for &(a, b) in &ex.edges {
                    assert!(!seen[a] && !seen[b]);
                    seen[a] = true;
                    seen[b] = true;
                }
                let recomputed: f64 = ex.edges.iter().map(|&(a, b)| edge_fn(&ps, &w, 1.0)(a, b)).sum();
                assert!(close(ex.weight, recomputed));
                let h = min_matching(&ps, &w, 1.0, Mode::Heuristic).unwrap();
                assert!(h.weight >= ex.weight - 1e-9 * ex.weight.max(1.0));
            }
        }
    }
}

#[test]
fn bipartite_matches_enumeration() {
    for seed in 0..60u64 {
        let dim = 1 + seed as usize % 2;
        let n = seed as usize % 8;
        let u = points(seed + 200, dim, n, 3.0);
        let v = points(seed + 300, dim, n, 3.0);
        for spec in SPECS {
            let w = WeightFunction::parse(spec, dim).unwrap();
            let bm = bipartite_matching(&u, &v, &w, 1.0).unwrap();
            let bf = brute_assignment(&|i, j| w.edge(u.point(i), v.point(j), 1.0), n);
            assert!(close(bm.weight, bf), "{spec} seed {seed}");
        }
        // Unbalanced sides: near-perfect matching under w*.
        let w = WeightFunction::parse("trunc:pow:1:1.5", dim).unwrap();
        let m = 1 + seed as usize % 4;
        let v2 = points(seed + 400, dim, m, 3.0);
        let all: Vec<&[f64]> = u.iter().chain(v2.iter()).collect();
        let star = |i: usize, j: usize| {
            if (i < n) == (j < n) {
                w.w_max()
            } else {
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                w.edge(all[a], all[b], 1.0)
            }
        };
        let bm = bipartite_matching(&u, &v2, &w, 1.0).unwrap();
        assert!(close(bm.weight, brute_mm(&star, n + m)), "unbalanced seed {seed}");
        if n <= 4 && m <= 4 {
            let bt = bipartite_tsp(&u, &v2, &w, 1.0, Mode::Exact).unwrap();
            assert!(close(bt.weight, brute_tsp(&star, n + m)), "btsp seed {seed}");
        }
    }
}

#[test]
fn bipartite_tsp_balanced_small() {
    let w = WeightFunction::parse("pow:1", 2).unwrap();
    let u = PointSet::from_points(2, &[[0.0, 0.0]]).unwrap();
    let v = PointSet::from_points(2, &[[0.3, 0.4]]).unwrap();
    assert!(close(bipartite_tsp(&u, &v, &w, 1.0, Mode::Exact).unwrap().weight, 1.0));
    let e = PointSet::empty(2);
    assert_eq!(bipartite_tsp(&e, &e, &w, 1.0, Mode::Exact).unwrap().weight, 0.0);
    for seed in 0..40u64 {
        let n = 1 + seed as usize % 4;
        let u = points(seed + 500, 2, n, 2.0);
        let v = points(seed + 600, 2, n, 2.0);
        let all: Vec<&[f64]> = u.iter().chain(v.iter()).collect();
        let star = |i: usize, j: usize| {
            if (i < n) == (j < n) {
                f64::INFINITY
            } else {
                w.edge(all[i.min(j)], all[i.max(j)], 1.0)
            }
        };
        let bt = bipartite_tsp(&u, &v, &w, 1.0, Mode::Exact).unwrap();
        assert!(close(bt.weight, brute_tsp(&star, 2 * n)), "seed {seed}");
    }
}

#[test]
fn mst_matches_pruefer_enumeration() {
    for seed in 0..80u64 {
        let dim = 1 + seed as usize % 2;
        let n = seed as usize % 9;
        let ps = points(seed + 700, dim, n, 3.0);
        let w = WeightFunction::power(dim, 2.0).unwrap();
        let t = mst(&ps, &w, 1.0).unwrap();
        assert!(close(t.weight, brute_mst(&edge_fn(&ps, &w, 1.0), n)), "seed {seed}");
        assert_eq!(t.edges.len(), n.saturating_sub(1));
    }
}

#[test]
fn mst_indicator_counts_components() {
    for seed in 0..300u64 {
        let dim = 1 + seed as usize % 2;
        let ps = random_instance(seed + 800, dim, 40);
        let w = WeightFunction::indicator(dim);
        let t = mst(&ps, &w, 1.0).unwrap();
        let c = component_count(&build_graph(&ps, 1.0).unwrap());
        assert_eq!(t.weight, (c - 1) as f64, "seed {seed}");
    }
}

#[test]
fn truncation_is_monotone() {
    for seed in 0..40u64 {
        let ps = points(seed + 900, 2, 2 + seed as usize % 8, 3.0);
        let w = WeightFunction::power(2, 1.5).unwrap();
        let t = w.truncate(0.9);
        for mode in [Mode::Exact] {
            assert!(tsp(&ps, &t, 1.0, mode).unwrap().weight <= tsp(&ps, &w, 1.0, mode).unwrap().weight + 1e-12);
            assert!(
                min_matching(&ps, &t, 1.0, mode).unwrap().weight
                    <= min_matching(&ps, &w, 1.0, mode).unwrap().weight + 1e-12
            );
        }
        assert!(mst(&ps, &t, 1.0).unwrap().weight <= mst(&ps, &w, 1.0).unwrap().weight + 1e-12);
    }
}

#[test]
fn scaling_identity() {
    let c5 = 2.5;
    let base = WeightFunction::parse("trunc:pow:1:2", 2).unwrap();
    let b2 = base.clone();
    let scaled = WeightFunction::general("scaled", 2, base.w_max(), move |x| {
        let y: Vec<f64> = x.iter().map(|v| v * c5).collect();
        b2.eval(&y)
    });
    for seed in 0..30u64 {
        let ps = points(seed + 1000, 2, 3 + seed as usize % 6, 4.0);
        let shrunk = rgg_limits::pointproc::transform(&ps, 1.0 / c5, &[0.0, 0.0]).unwrap();
        let a = tsp(&ps, &base, 1.0, Mode::Exact).unwrap().weight;
        let b = tsp(&shrunk, &scaled, 1.0, Mode::Exact).unwrap().weight;
        assert!(close(a, b), "seed {seed}: {a} vs {b}");
    }
}

#[test]
fn hilbert_orders() {
    let ps = PointSet::from_line(&[0.5, -1.0, 2.0]).unwrap();
    assert_eq!(hilbert_tour(&ps).unwrap(), vec![1, 0, 2]);
    assert_eq!(hilbert_tour(&PointSet::from_points(2, &[[0.1, 0.2]]).unwrap()).unwrap(), vec![0]);
    assert!(hilbert_tour(&PointSet::from_points(4, &[[0.0; 4]]).unwrap()).is_err());
    // Hilbert tour of a 4-point grid under the indicator weight is at most
    // twice the optimum.
    let grid = PointSet::from_points(2, &[[0.0, 0.0], [0.0, 1.5], [1.5, 1.5], [1.5, 0.0]]).unwrap();
    let w = WeightFunction::indicator(2);
    let h = tour_weight(&grid, &w, 1.0, &hilbert_tour(&grid).unwrap());
    let ex = tsp(&grid, &w, 1.0, Mode::Exact).unwrap().weight;
    assert!(h <= 2.0 * ex);
}

#[test]
fn weight_validation_examples() {
    let mut log = WeightFunction::log(2);
    log.flags.w4 = Some((50.0, 1.0));
    assert!(validate_weight(&log).check("W4").unwrap().pass);
    let mut lin = WeightFunction::power(2, 1.0).unwrap();
    lin.flags.w5 = Some(1.0);
    let rep = validate_weight(&lin);
    assert!(!rep.check("W5").unwrap().pass);
    assert!(rep.check("W5").unwrap().counterexample.is_some());
    let ind = validate_weight(&WeightFunction::indicator(2));
    assert!(ind.all_pass());
    for f in ["W1", "W5"] {
        assert!(ind.check(f).unwrap().pass);
    }
}
