use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rgg-limits"));
    for k in ["SEED", "WORKERS", "OUT", "FORMAT"] {
        c.env_remove(format!("RGG_LIMITS_{k}"));
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(|r| r.unwrap()).collect()
}

fn records(dir: &Path) -> Vec<serde_json::Value> {
    std::fs::read_to_string(dir.join("records.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn short_property_suite_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["--seed", "7", "--out", dir.path().to_str().unwrap(), "proptest", "--trials", "100"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&stdout(&o));
    assert!(rows.len() > 50);
    assert!(rows.iter().all(|r| &r[6] == "0"));
    // Kept negative-control failures land in the failures file.
    let failures = std::fs::read_to_string(dir.path().join("failures.jsonl")).unwrap();
    assert!(failures.lines().count() > 0);
    assert_eq!(records(dir.path())[0]["payload"]["ok"], true);
}

#[test]
fn box_estimate_of_isolated_fraction() {
    let o = run(&[
        "--seed",
        "11",
        "estimate",
        "--mode",
        "box",
        "--functional",
        "sigma",
        "--d",
        "1",
        "--lambda",
        "1",
        "--s",
        "40",
        "--reps",
        "300",
    ]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    let mean: f64 = rows[0][8].parse().unwrap();
    let stderr: f64 = rows[0][9].parse().unwrap();
    assert!((mean - (-2.0f64).exp()).abs() <= (3.0 * stderr).max(0.02), "{mean} ± {stderr}");
}

#[test]
fn jsonl_format_and_seed_reproducibility() {
    let args = [
        "--format",
        "jsonl",
        "--seed",
        "5",
        "estimate",
        "--mode",
        "thermo",
        "--functional",
        "comps",
        "--d",
        "2",
        "--t",
        "2",
        "--n",
        "50,100",
        "--reps",
        "10",
    ];
    let a = run(&args);
    let b = bin().args(&args[..4]).args(&args[4..]).env("RGG_LIMITS_WORKERS", "2").output().unwrap();
    assert!(a.status.success());
    let strip = |o: &Output| -> Vec<serde_json::Value> {
        stdout(o)
            .lines()
            .map(|l| {
                let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
                v.as_object_mut().unwrap().remove("elapsed_ms");
                v
            })
            .collect()
    };
    assert_eq!(strip(&a).len(), 2);
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn empty_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    std::fs::write(&cfg, "").unwrap();
    let o = run(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("command, seed"));
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "command = \"estimate\"\nseed = 4\n[params]\nmode = \"box\"\nfunctional = \"comps\"\nd = 1\nlambda = [0.5]\ns = 20\nreps = 30\n",
    )
    .unwrap();
    let via_cfg = run(&["--format", "jsonl", "run", cfg.to_str().unwrap()]);
    let via_flags = run(&[
        "--format",
        "jsonl",
        "--seed",
        "4",
        "estimate",
        "--mode",
        "box",
        "--functional",
        "comps",
        "--d",
        "1",
        "--lambda",
        "0.5",
        "--s",
        "20",
        "--reps",
        "30",
    ]);
    assert!(via_cfg.status.success(), "{}", String::from_utf8_lossy(&via_cfg.stderr));
    let mean = |o: &Output| -> f64 {
        let v: serde_json::Value = serde_json::from_str(stdout(o).lines().next().unwrap()).unwrap();
        v["mean"].as_f64().unwrap()
    };
    assert_eq!(mean(&via_cfg), mean(&via_flags));
}

#[test]
fn sample_solve_and_replay_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let pts = dir.path().join("p.csv");
    let o = run(&["--seed", "2", "sample", "--d", "2", "--n", "12", "--output", pts.to_str().unwrap()]);
    assert!(o.status.success());
    let o = run(&["--out", out, "solve", "--functional", "gamma", "--input", pts.to_str().unwrap(), "--radius", "0.4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["exact"], true);
    assert!(v["value"].as_f64().unwrap() >= 1.0);

    let recs = records(dir.path());
    assert_eq!(recs.len(), 1);
    let id = recs[0]["id"].as_str().unwrap();
    let saved = dir.path().join("configs").join(format!("{id}.toml"));
    let again = run(&["run", saved.to_str().unwrap()]);
    assert!(again.status.success());
    let w: serde_json::Value = serde_json::from_str(stdout(&again).trim()).unwrap();
    assert_eq!(v["value"], w["value"]);
    assert_eq!(v["witness"], w["witness"]);
    let recs = records(dir.path());
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0]["id"], recs[1]["id"]);
}

#[test]
fn report_builds_plot_files_and_skips_bad_lines() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for lambda in ["1", "0.5"] {
        let o = run(&[
            "--out",
            out,
            "estimate",
            "--mode",
            "box",
            "--functional",
            "sigma",
            "--d",
            "1",
            "--lambda",
            lambda,
            "--s",
            "10",
            "--reps",
            "20",
        ]);
        assert!(o.status.success());
    }
    let path = dir.path().join("records.jsonl");
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str("{ not json\n");
    std::fs::write(&path, text).unwrap();
    let o = run(&["--out", out, "report"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let dat = std::fs::read_to_string(dir.path().join("box_sigma_d1.dat")).unwrap();
    let xs: Vec<&str> = dat.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(' ').next().unwrap()).collect();
    assert_eq!(xs, ["0.5", "1"]);
    assert!(dir.path().join("box_sigma_d1.gp").exists());
    let csv = std::fs::read_to_string(dir.path().join("estimates.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn bad_inputs_are_reported() {
    assert_eq!(run(&["solve", "--functional", "alpha", "--input", "/nonexistent.csv"]).status.code(), Some(2));
    assert_eq!(
        run(&["estimate", "--mode", "box", "--functional", "nosuch", "--d", "1", "--lambda", "1", "--s", "5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["proptest", "--property", "P99"]).status.code(), Some(2));
}

#[test]
fn density_mode_certificates() {
    let o = run(&["estimate", "--mode", "density", "--functional", "packing", "--d", "1", "--s", "100"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let v: f64 = rows[0][8].parse().unwrap();
    assert!((v - 1.0).abs() <= 0.02);
}
