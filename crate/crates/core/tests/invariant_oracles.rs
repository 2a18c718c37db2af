//! Exact solvers against brute-force enumeration on small random graphs.

mod common;

use common::*;
use rgg_limits::invariants::{
    clique_cover_number, domination_number, edge_cover_number, eternal_domination_multiguard,
    eternal_domination_number, h_packing_number, independence_number, lookup, matching_number, verify,
    vertex_cover_number, HPattern, Mode, SolveOptions, Witness,
};

const TRIALS: u64 = 150;

fn set_of(w: &Option<Witness>) -> Vec<usize> {
    match w {
        Some(Witness::VertexSet(s)) => s.clone(),
        other => panic!("expected vertex set, got {other:?}"),
    }
}

#[test]
fn alpha_gamma_vc_match_enumeration() {
    let o = SolveOptions::default();
    for seed in 0..TRIALS {
        for dim in [1, 2] {
            let g = random_graph(seed, dim, 14);
            let a = independence_number(&g, Mode::Exact, &o).unwrap();
            assert_eq!(a.value as usize, brute_alpha(&g), "alpha seed {seed} dim {dim}");
            assert!(verify::is_independent(&g, &set_of(&a.witness)));
            assert_eq!(set_of(&a.witness).len(), a.value as usize);

            let c = domination_number(&g, Mode::Exact, &o).unwrap();
            assert_eq!(c.value as usize, brute_gamma(&g), "gamma seed {seed} dim {dim}");
            assert!(verify::is_dominating(&g, &set_of(&c.witness)));

            let vc = vertex_cover_number(&g, Mode::Exact, &o).unwrap();
            assert_eq!(vc.value as usize + a.value as usize, g.n());
        }
    }
}

#[test]
fn theta_matches_subset_dp() {
    let o = SolveOptions::default();
    for seed in 0..TRIALS {
        for dim in [1, 2] {
            let g = random_graph(seed + 1000, dim, 13);
            let t = clique_cover_number(&g, Mode::Exact, &o).unwrap();
            assert_eq!(t.value as usize, brute_theta(&g), "theta seed {seed} dim {dim}");
            match &t.witness {
                Some(Witness::Partition(p)) => {
                    assert!(verify::is_clique_partition(&g, p));
                    assert_eq!(p.len(), t.value as usize);
                }
                w => panic!("expected partition, got {w:?}"),
            }
        }
    }
}

#[test]
fn eternal_matches_full_game() {
    let o = SolveOptions::default();
    for seed in 0..TRIALS {
        for dim in [1, 2] {
            let g = random_graph(seed + 2000, dim, 9);
            let e = eternal_domination_number(&g, &o).unwrap();
            assert!(e.exact);
            assert_eq!(e.value as usize, brute_gammainf(&g), "gammainf seed {seed} dim {dim}");
            match &e.witness {
                Some(Witness::Guards(c)) => {
                    assert_eq!(verify::guard_certificates(&g, c), Some(e.value as usize))
                }
                w => panic!("expected guards, got {w:?}"),
            }
            let m = eternal_domination_multiguard(&g, &o).unwrap();
            assert!(m.value <= e.value && m.value as usize >= brute_gamma(&g));
            match &m.witness {
                Some(Witness::Guards(c)) => {
                    assert_eq!(verify::guard_certificates(&g, c), Some(m.value as usize))
                }
                w => panic!("expected guards, got {w:?}"),
            }
        }
    }
}

#[test]
fn matching_edge_cover_packing_match_enumeration() {
    let o = SolveOptions::default();
    for seed in 0..TRIALS {
        for dim in [1, 2] {
            let g = random_graph(seed + 3000, dim, 12);
            let nu = matching_number(&g);
            assert_eq!(nu.value as usize, brute_matching(&g), "matching seed {seed}");
            match &nu.witness {
                Some(Witness::Edges(e)) => assert!(verify::is_matching(&g, e) && e.len() == nu.value as usize),
                w => panic!("{w:?}"),
            }
            let rho = edge_cover_number(&g);
            assert_eq!(rho.value as usize, brute_edge_cover(&g), "edge cover seed {seed}");
            match &rho.witness {
                Some(Witness::Edges(e)) => assert!(verify::is_edge_cover(&g, e) && e.len() == rho.value as usize),
                w => panic!("{w:?}"),
            }
            let k3 = HPattern::k3();
            let p = h_packing_number(&g, &k3, Mode::Exact, &o).unwrap();
            assert_eq!(p.value as usize, brute_triangles(&g), "triangles seed {seed}");
            match &p.witness {
                Some(Witness::Packing(c)) => assert!(verify::is_h_packing(&g, c, &k3)),
                w => panic!("{w:?}"),
            }
        }
    }
}

#[test]
fn eta_is_edge_cover_of_non_isolated() {
    for seed in 0..TRIALS {
        let g = random_graph(seed + 4000, 2, 12);
        let eta = lookup(2, "eta").unwrap();
        let v = eta.evaluate_graph(&g).unwrap().unwrap();
        assert_eq!(v as usize, brute_edge_cover(&g));
    }
}

#[test]
fn heuristics_bracket_exact() {
    let o = SolveOptions::default();
    for seed in 0..TRIALS {
        let g = random_graph(seed + 5000, 2, 14);
        let a = independence_number(&g, Mode::Heuristic, &o).unwrap();
        let b = brute_alpha(&g) as f64;
        assert!(a.value <= b && a.upper >= b && a.lower <= b);
        assert!(verify::is_independent(&g, &set_of(&a.witness)));
        let c = domination_number(&g, Mode::Heuristic, &o).unwrap();
        let b = brute_gamma(&g) as f64;
        assert!(c.value >= b && c.lower <= b);
        assert!(verify::is_dominating(&g, &set_of(&c.witness)));
        let t = clique_cover_number(&g, Mode::Heuristic, &o).unwrap();
        let b = brute_theta(&g) as f64;
        assert!(t.value >= b && t.lower <= b);
    }
}
