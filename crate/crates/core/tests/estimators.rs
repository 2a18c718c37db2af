//! Estimators, density constructions and covering bounds.

mod common;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution as _, Poisson};
use rgg_limits::estimators::*;
use rgg_limits::geograph::build_graph;
use rgg_limits::invariants::{domination_number, lookup, registry_with, verify, Mode, SolveOptions};
use rgg_limits::pointproc::{sample_binomial, Distribution, PointSet};

/// Independent Monte Carlo oracle for the isolated fraction on a circle of
/// length `s`: direct pairwise distances, separate random source.
fn brute_isolated_fraction(lambda: f64, s: f64, reps: usize, seed: u64) -> f64 {
    let mut rng = StdRng::seed_from_u64(seed);
    let (mut iso, mut total) = (0usize, 0usize);
    for _ in 0..reps {
        let n = Poisson::new(lambda * s).unwrap().sample(&mut rng) as usize;
        let xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * s).collect();
        for i in 0..n {
            let alone = (0..n).all(|j| {
                let d = (xs[i] - xs[j]).abs();
                j == i || d.min(s - d) > 1.0
            });
            iso += alone as usize;
        }
        total += n;
    }
    iso as f64 / total as f64
}

#[test]
fn isolated_closed_form_oracle() {
    let p = brute_isolated_fraction(1.0, 200.0, 200, 9);
    assert!((p - (-2.0f64).exp()).abs() < 0.01, "oracle {p}");
}

#[test]
fn isolated_box_estimate() {
    let sigma = lookup(1, "sigma").unwrap();
    let r = estimate_rho_box(&sigma, 1.0, 40.0, 300, 4).unwrap();
    let target = (-2.0f64).exp();
    assert!((r.mean - target).abs() <= (3.0 * r.stderr).max(0.02), "{r:?}");
    assert_eq!(r.reps, 300);
    assert!(!r.partial());
}

#[test]
fn components_rho_at_most_one() {
    let comps = lookup(2, "comps").unwrap();
    for lambda in [0.2, 1.0, 3.0] {
        let r = estimate_rho_box(&comps, lambda, 8.0, 30, 5).unwrap();
        assert!(r.mean <= 1.0 + 1e-12);
    }
}

#[test]
fn reports_are_reproducible_across_pool_sizes() {
    let sigma = lookup(2, "sigma").unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_rho_box(&sigma, 1.0, 6.0, 40, 77).unwrap())
    };
    let (a, b) = (run(1), run(3));
    assert_eq!((a.mean, a.stderr, a.reps), (b.mean, b.stderr, b.reps));
}

#[test]
fn origin_cluster_is_connected_and_reproducible() {
    for seed in 0..20 {
        let c = origin_cluster(0.8, 2, seed, 10_000).unwrap();
        assert_eq!(c.point(0), &[0.0, 0.0]);
        let g = build_graph(&c, 1.0).unwrap();
        assert_eq!(rgg_limits::geograph::component_count(&g), 1);
        assert_eq!(c, origin_cluster(0.8, 2, seed, 10_000).unwrap());
    }
    assert!(origin_cluster(5.0, 2, 1, 50).is_err());
}

#[test]
fn box_and_cluster_agree_for_isolated_vertices() {
    let sigma = lookup(1, "sigma").unwrap();
    let b = estimate_rho_box(&sigma, 0.5, 50.0, 300, 1).unwrap();
    let c = estimate_rho_cluster(&sigma, 0.5, 3000, 2, DEFAULT_CLUSTER_CAP).unwrap();
    let tol = 3.0 * b.stderr.hypot(c.stderr) + 0.02;
    assert!((b.mean - c.mean).abs() <= tol, "box {} cluster {}", b.mean, c.mean);
    assert!((c.mean - (-1.0f64).exp()).abs() < 0.03);
}

#[test]
fn cluster_small_lambda_approaches_singleton_value() {
    let alpha = lookup(2, "alpha").unwrap();
    let c = estimate_rho_cluster(&alpha, 0.01, 500, 3, 1000).unwrap();
    assert!(c.mean > 0.95);
    let vc = lookup(2, "gamma").unwrap();
    assert!(estimate_rho_cluster(&vc, 0.5, 10, 3, 1000).is_ok());
}

#[test]
fn lattice_densities() {
    let p1 = lattice_packing_density(1, 100.0).unwrap();
    assert!(p1.verified && (p1.density - 1.0).abs() < 0.02);
    let p2 = lattice_packing_density(2, 100.0).unwrap();
    assert!(p2.verified && (p2.density / (4.0f64 / 3.0).sqrt() - 1.0).abs() < 0.02);
    let c1 = lattice_covering_density(1, 100.0).unwrap();
    assert!(c1.verified && (c1.density - 0.5).abs() < 0.01, "{}", c1.density);
    let c2 = lattice_covering_density(2, 100.0).unwrap();
    assert!(c2.verified && (c2.density / (4.0f64 / 27.0).sqrt() - 1.0).abs() < 0.02);
    assert!(lattice_packing_density(3, 10.0).is_err());
}

#[test]
fn negative_controls_fail_verification() {
    assert!(!verify_packing(&packing_lattice(2, 20.0, 0.99).unwrap()));
    assert!(!verify_packing(&packing_lattice(1, 20.0, 0.99).unwrap()));
    let sparse2 = covering_lattice(2, 20.0, 2f64.sqrt()).unwrap();
    assert!(!verify_covering(&sparse2, 20.0, 1.0));
    let sparse1 = covering_lattice(1, 20.0, 2.0).unwrap();
    assert!(!verify_covering(&sparse1, 20.0, 1.0));
    // Slightly too coarse: circumradius just above one.
    let coarse = covering_lattice(2, 10.0, 1.0 + 1e-6).unwrap();
    assert!(!verify_covering(&coarse, 10.0, 1.0));
}

#[test]
fn hexagon_partition_checks() {
    let h = hexagon_partition(100.0).unwrap();
    assert!(h.diameters_verified);
    assert!((h.density / (64.0f64 / 27.0).sqrt() - 1.0).abs() < 0.02);
    assert!(h.cells_meeting >= h.cells_centered_inside);
    let tiny = hexagon_partition(0.01).unwrap();
    assert!(tiny.cells_meeting >= 1 && tiny.diameters_verified);
}

#[test]
fn density_hierarchy() {
    let refs = reference_constants();
    for d in 1..=2 {
        let get = |n: &str| refs.iter().find(|c| c.name == n && c.dim == d).unwrap().value;
        assert!(get("kappa_bar") <= get("alpha_bar"));
    }
}

#[test]
fn zeta_star_lower_bounds() {
    let a1 = lookup(1, "alpha").unwrap();
    let z = zeta_star_lower(&a1, 5.0, 200, 1).unwrap();
    assert_eq!(z.value, 5.0);
    let a2 = lookup(2, "alpha").unwrap();
    let z2 = zeta_star_lower(&a2, 6.0, 50, 1).unwrap();
    let lattice = packing_lattice(2, 6.0, 1.0 + 1e-9).unwrap().len() as f64;
    assert!(z2.value >= lattice);
    assert!(zeta_star_lower(&lookup(2, "gamma").unwrap(), 3.0, 5, 1).is_err());
}

#[test]
fn zeta_star_never_exceeds_brute_force_in_d1() {
    // On an interval of length s the exact maximum is the number of
    // unit-separated points that fit, ceil(s) for half-open Q_s.
    let a1 = lookup(1, "alpha").unwrap();
    for s in [0.5, 1.5, 2.0, 3.7] {
        let z = zeta_star_lower(&a1, s, 100, 2).unwrap();
        assert!(z.value <= (s as f64).ceil(), "s {s}: {}", z.value);
    }
}

#[test]
fn covering_bounds_sandwich_domination() {
    let mu = Distribution::uniform(2);
    for seed in 0..2 {
        let ps = sample_binomial(&mu, 10_000, seed);
        let r = 0.1;
        let b = domination_bounds_via_covering(&ps, r, 0.24).unwrap();
        let g = build_graph(&ps, r).unwrap();
        assert!(verify::is_dominating(&g, &b.net.dominating));
        assert!(b.upper <= b.net.upper_bound());
        let h = domination_number(&g, Mode::Heuristic, &SolveOptions::default()).unwrap();
        let lower = b.lower.unwrap();
        assert!(lower <= h.value && h.value <= b.upper as f64, "{lower} {} {}", h.value, b.upper);
        assert!(lower > 0.0);
    }
    let empty = domination_bounds_via_covering(&PointSet::empty(2), 0.2, 0.2).unwrap();
    assert!(empty.degenerate);
    assert!(domination_bounds_via_covering(&PointSet::from_line(&[0.7]).unwrap(), 0.2, 0.2).is_err());
}

#[test]
fn covering_upper_equals_net_when_every_ball_is_hit() {
    // Dense sample: every δ-ball around a net center holds a point.
    let mu = Distribution::uniform(1);
    let ps = sample_binomial(&mu, 4000, 3);
    let b = domination_bounds_via_covering(&ps, 0.1, 0.2).unwrap();
    assert_eq!(b.net.bad, 0);
    assert!(b.upper <= b.net.net_size);
}

#[test]
fn thermodynamic_run_is_flat_for_isolated_vertices() {
    let sigma = lookup(2, "sigma").unwrap();
    let mu = Distribution::uniform(2);
    let grid = [500, 1000, 2000, 4000];
    let reps = lln_thermo_run(&sigma, &mu, 1.0, &grid, 40, 8).unwrap();
    let top = &reps[2..];
    for a in top {
        for b in top {
            assert!((a.mean - b.mean).abs() <= 3.0 * a.stderr.hypot(b.stderr) + 1e-12);
        }
    }
    // Huge t: complete graph, so γ/n = 1/n.
    let gamma = lookup(2, "gamma").unwrap();
    let r = lln_thermo_run(&gamma, &mu, 1e4, &[10], 3, 1).unwrap();
    assert!((r[0].mean - 0.1).abs() < 1e-12);
}

#[test]
fn dense_run_independence_d1() {
    let alpha = lookup(1, "alpha").unwrap();
    let mu = Distribution::uniform(1);
    let rule = default_dense_radius(1);
    let reps = lln_dense_run(&alpha, &mu, &rule, &[10_000], 5, 2).unwrap();
    assert!((reps[0].mean - 1.0).abs() < 0.1, "{:?}", reps[0]);
    let small = lln_dense_run(&alpha, &mu, &|_| 2.0, &[3], 2, 2).unwrap();
    assert!(small[0].mean <= 2.0 * 3.0);
}

#[test]
fn dense_run_reports_covering_bounds_for_domination() {
    let opts = SolveOptions { node_limit: 100_000, ..SolveOptions::default() };
    let gamma = registry_with(2, opts).into_iter().find(|f| f.name == "gamma").unwrap();
    let mu = Distribution::uniform(2);
    let rule = |n: usize| (n as f64).powf(-0.25);
    // Replications over the node budget are counted as failed; the bounds
    // are reported either way.
    if let Ok(r) = lln_dense_run(&gamma, &mu, &rule, &[100], 4, 5) {
        assert!(r[0].aux.contains_key("upper"));
        assert!(r[0].aux.contains_key("lower"));
    }
}

#[test]
fn sweep_flags_structure() {
    let comps = lookup(1, "comps").unwrap();
    let s = rho_curve_sweep(&comps, &[0.5, 1.0, 2.0], 30.0, 60, 3, BoxOptions::default()).unwrap();
    assert!(s.violations.is_empty(), "{:?}", s.violations);
    assert_eq!(s.rows.len(), 3);
}
