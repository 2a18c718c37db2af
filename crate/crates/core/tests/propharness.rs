//! Property harness: reduced-size suite, negative controls, replay.

use rgg_limits::invariants::lookup;
use rgg_limits::pointproc::PointSet;
use rgg_limits::propharness::*;

fn case(property: PropertyId, dim: usize, n_max: usize, trials: usize, seed: u64) -> PropertyCase {
    PropertyCase { property, gen: GeneratorSpec::new(dim, n_max), trials, seed }
}

#[test]
fn reduced_suite_passes() {
    let opts = SuiteOptions { trials: 300, weight_trials: 20, ..SuiteOptions::default() };
    let start = std::time::Instant::now();
    let s = run_all(11, &opts).unwrap();
    for r in s.reports.iter().filter(|r| !r.passed()) {
        eprintln!("{} {} d={}: {:?}", r.property, r.functional, r.dim, r.failures.first());
    }
    assert_eq!(s.violations(), 0);
    assert!(s.controls_caught(), "{:?}", s.controls.iter().map(|c| c.violations).collect::<Vec<_>>());
    assert!(s.ok());
    eprintln!("suite: {} cases, {} skipped, {:?}", s.reports.len(), s.skipped(), start.elapsed());
    // Every registered functional appears, decomposed ones included.
    for name in ["alpha", "gamma", "theta", "gammainf", "sigma", "comps", "vc", "psi:K2", "psi:K3", "psi:P3", "eta"] {
        assert!(s.reports.iter().any(|r| r.functional == name && r.property == PropertyId::P3), "{name}");
    }
    for p in [
        PropertyId::Chain,
        PropertyId::EdgeCoverId,
        PropertyId::Multiguard,
        PropertyId::MstComponents,
        PropertyId::WValidate,
    ] {
        assert!(s.reports.iter().any(|r| r.property == p));
    }
}

#[test]
fn wrong_c2_for_alpha_is_caught_and_replays() {
    let mut alpha = lookup(2, "alpha").unwrap();
    alpha.c2 = 0.0;
    let c = case(PropertyId::P4, 2, 20, 2000, 5);
    let r = run_property(&c, &alpha).unwrap();
    assert!(r.violations > 0);
    let first = &r.failures[0];
    let again = replay(&c, Some(&alpha), first.trial).unwrap().unwrap();
    assert_eq!(&again, first);
    // The serialized record round-trips.
    let line = serde_json::to_string(first).unwrap();
    let back: FailureRecord = serde_json::from_str(&line).unwrap();
    assert_eq!(&back, first);
    // With the declared constant the same trial passes.
    let good = lookup(2, "alpha").unwrap();
    assert!(replay(&c, Some(&good), first.trial).unwrap().is_none());
}

#[test]
fn shift_zero_is_identity_for_every_functional() {
    for d in 1..=2 {
        for f in rgg_limits::invariants::registry(d) {
            let r = run_property(&case(PropertyId::P2, d, 10, 1, 9), &f).unwrap();
            assert_eq!(r.violations, 0, "{}", f.name);
        }
    }
}

#[test]
fn reports_do_not_depend_on_pool_size() {
    let f = lookup(2, "gamma").unwrap();
    let c = case(PropertyId::P4, 2, 14, 200, 3);
    let run =
        |t| rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap().install(|| run_property(&c, &f).unwrap());
    let (a, b) = (run(1), run(4));
    assert_eq!((a.checked, a.skipped, a.violations), (b.checked, b.skipped, b.violations));
}

#[test]
fn jsonl_lists_every_kept_failure() {
    let opts = SuiteOptions { trials: 200, dims: vec![1], weight_trials: 2, ..SuiteOptions::default() };
    let s = run_all(2, &opts).unwrap();
    let mut buf = Vec::new();
    s.write_failures_jsonl(&mut buf).unwrap();
    let lines = String::from_utf8(buf).unwrap();
    let kept: usize = s.controls.iter().map(|r| r.failures.len()).sum();
    assert_eq!(lines.lines().count(), kept);
    for l in lines.lines() {
        let rec: FailureRecord = serde_json::from_str(l).unwrap();
        assert!(rec.instance.len() > 0 || rec.property == PropertyId::WValidate);
    }
}

#[test]
fn filters_and_empty_selection() {
    let opts = SuiteOptions {
        trials: 50,
        dims: vec![1],
        property: Some(PropertyId::P7),
        functional: Some("sigma".into()),
        ..SuiteOptions::default()
    };
    let s = run_all(1, &opts).unwrap();
    assert_eq!(s.reports.len(), 1);
    assert!(s.controls.is_empty());
    let none = SuiteOptions { functional: Some("nothing".into()), ..opts };
    let s = run_all(1, &none).unwrap();
    assert!(s.reports.is_empty() && s.ok());
}

#[test]
fn identity_cases_reject_functionals() {
    let f = lookup(1, "alpha").unwrap();
    assert!(run_property(&case(PropertyId::Chain, 1, 5, 1, 0), &f).is_err());
    assert!(run_identity(&case(PropertyId::P3, 1, 5, 1, 0)).is_err());
    let empty = PointSet::empty(1);
    assert_eq!(empty.len(), 0);
}
