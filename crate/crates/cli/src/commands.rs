//! Command implementations.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rgg_limits::estimators::{
    self, estimate_rho_box_with, estimate_rho_cluster, hexagon_partition, lattice_covering_density,
    lattice_packing_density, lln_dense_run, lln_thermo_run, rho_curve_sweep, zeta_star_lower, BoxOptions,
    EstimatorReport, DEFAULT_CLUSTER_CAP,
};
use rgg_limits::euclid_opt::{
    bipartite_matching, bipartite_tsp, min_matching, mst, tsp, weighted_descriptor, WeightFunction, WeightedProblem,
};
use rgg_limits::geograph::{build_graph, component_count, isolated_count};
use rgg_limits::invariants::{
    clique_cover_number, domination_number, edge_cover_number, eternal_domination_multiguard,
    eternal_domination_number, h_packing_number, independence_number, lookup, vertex_cover_number,
    FunctionalDescriptor, HPattern, Mode, SolveOptions, SolveResult,
};
use rgg_limits::pointproc::{sample_binomial, sample_homogeneous_box, sample_poisson_coupled, AcPart, Segment};
use rgg_limits::propharness::{run_all, PropertyId, SuiteOptions};
use rgg_limits::{Distribution, PointSet};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::store::{append_csv, append_record, ExperimentConfig, ResultRecord};
use crate::{points, report, Cli, Command, EstimateArgs, EstimateMode, Format, ProptestArgs, SampleArgs, SolveArgs};

/// One summary row of an estimate; also the CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub mode: String,
    pub functional: String,
    pub d: usize,
    pub lambda: Option<f64>,
    pub s: Option<f64>,
    pub n: Option<usize>,
    pub t: Option<f64>,
    pub reps: usize,
    pub mean: f64,
    pub stderr: f64,
    pub seed: u64,
    pub elapsed_ms: u64,
}

pub const ESTIMATE_HEADER: [&str; 12] =
    ["mode", "functional", "d", "lambda", "s", "n", "t", "reps", "mean", "stderr", "seed", "elapsed_ms"];

impl EstimateRow {
    fn cells(&self) -> Vec<String> {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map(|x| x.to_string()).unwrap_or_default()
        }
        vec![
            self.mode.clone(),
            self.functional.clone(),
            self.d.to_string(),
            opt(&self.lambda),
            opt(&self.s),
            opt(&self.n),
            opt(&self.t),
            self.reps.to_string(),
            self.mean.to_string(),
            self.stderr.to_string(),
            self.seed.to_string(),
            self.elapsed_ms.to_string(),
        ]
    }

    /// Abscissa for plots: `n` for thermo and dense runs, `λ` otherwise.
    pub fn x(&self) -> Option<f64> {
        match self.mode.as_str() {
            "thermo" | "dense" => self.n.map(|n| n as f64),
            "density" => self.s,
            _ => self.lambda,
        }
    }
}

pub fn execute(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Sample(a) => sample(cli, a),
        Command::Solve(a) => solve(cli, a),
        Command::Estimate(a) => estimate(cli, a),
        Command::Proptest(a) => proptest(cli, a),
        Command::Report(a) => report::run(cli, a),
        Command::Run(_) => bail!("`run` is handled before dispatch"),
    }
}

fn config(cli: &Cli, command: &str, args: &impl Serialize) -> Result<ExperimentConfig> {
    let params = match serde_json::to_value(args)? {
        Value::Object(m) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
        _ => BTreeMap::new(),
    };
    Ok(ExperimentConfig {
        command: command.to_string(),
        seed: cli.seed,
        workers: cli.workers,
        out: cli.out.clone(),
        params,
    })
}

/// Appends the record and saves the config as `configs/<id>.toml`, which
/// `run` replays.
fn record(cli: &Cli, cfg: &ExperimentConfig, payload: Value) -> Result<()> {
    if let Some(dir) = &cli.out {
        append_record(dir, &ResultRecord::new(cfg, payload))?;
        let cdir = dir.join("configs");
        std::fs::create_dir_all(&cdir)?;
        std::fs::write(cdir.join(format!("{}.toml", cfg.id())), cfg.to_toml()?)?;
    }
    Ok(())
}

/// Parses `uniform`, `segment:<a>:<b>` or `mix:<mass>:<a>:<b>`, where points
/// are comma-separated coordinates.
pub fn parse_distribution(spec: &str, dim: usize) -> Result<Distribution> {
    let coords = |s: &str| -> Result<Vec<f64>> {
        let v: Vec<f64> = s
            .split(',')
            .map(|c| c.trim().parse::<f64>().with_context(|| format!("bad coordinate {c:?}")))
            .collect::<Result<_>>()?;
        if v.len() != dim {
            bail!("point {s:?} has {} coordinates, expected {dim}", v.len());
        }
        Ok(v)
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["uniform"] => Ok(Distribution::uniform(dim)),
        ["segment", a, b] => Ok(Distribution::segment(coords(a)?, coords(b)?)?),
        ["mix", m, a, b] => {
            let mass: f64 = m.parse().with_context(|| format!("bad mass {m:?}"))?;
            if !(0.0..=1.0).contains(&mass) {
                bail!("uniform mass {mass} must lie in [0, 1]");
            }
            let seg = Segment { a: coords(a)?, b: coords(b)?, mass: 1.0 - mass };
            Ok(Distribution::new(dim, AcPart::Uniform { mass }, vec![seg])?)
        }
        _ => bail!("unknown distribution {spec:?} (expected uniform, segment:A:B or mix:M:A:B)"),
    }
}

fn sample(cli: &Cli, a: &SampleArgs) -> Result<bool> {
    let cfg = config(cli, "sample", a)?;
    let ps = match a.process.as_str() {
        "binomial" => {
            let n = a.n.context("binomial sampling needs --n")?;
            sample_binomial(&parse_distribution(&a.dist, a.d)?, n, cli.seed)
        }
        "poisson" => {
            let t = a.t.context("Poisson sampling needs --t")?;
            sample_poisson_coupled(&parse_distribution(&a.dist, a.d)?, t, cli.seed)?.poisson().clone()
        }
        "homogeneous" => {
            let lambda = a.lambda.context("homogeneous sampling needs --lambda")?;
            let s = a.s.context("homogeneous sampling needs --s")?;
            sample_homogeneous_box(lambda, s, a.d, cli.seed)?
        }
        p => bail!("unknown process {p:?} (expected binomial, poisson or homogeneous)"),
    };
    match &a.output {
        Some(path) => {
            let f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            points::write(&ps, std::io::BufWriter::new(f))?;
        }
        None => points::write(&ps, std::io::stdout().lock())?,
    }
    record(cli, &cfg, json!({ "points": ps.len(), "dim": ps.dim(), "output": a.output }))?;
    Ok(true)
}

fn parse_mode(s: &str) -> Result<Mode> {
    match s {
        "exact" => Ok(Mode::Exact),
        "heur" | "heuristic" => Ok(Mode::Heuristic),
        _ => bail!("unknown mode {s:?} (expected exact or heur)"),
    }
}

fn count_result(value: usize, start: Instant) -> SolveResult {
    SolveResult {
        value: value as f64,
        exact: true,
        lower: value as f64,
        upper: value as f64,
        witness: None,
        elapsed: start.elapsed(),
    }
}

/// Solves a graph parameter on `G(X, r)`.
pub fn solve_graph(name: &str, ps: &PointSet, r: f64, mode: Mode, opts: &SolveOptions) -> Result<SolveResult> {
    let start = Instant::now();
    let g = build_graph(ps, r)?;
    let res = match name {
        "alpha" => independence_number(&g, mode, opts)?,
        "gamma" => domination_number(&g, mode, opts)?,
        "theta" => clique_cover_number(&g, mode, opts)?,
        "gammainf" => eternal_domination_number(&g, opts)?,
        "gammainf-multi" => eternal_domination_multiguard(&g, opts)?,
        "vc" => vertex_cover_number(&g, mode, opts)?,
        "eta" => edge_cover_number(&g),
        "sigma" => count_result(isolated_count(&g), start),
        "comps" => count_result(component_count(&g), start),
        other => match other.strip_prefix("psi:") {
            Some(h) => h_packing_number(&g, &HPattern::by_name(h)?, mode, opts)?,
            None => bail!("unknown functional {other:?}"),
        },
    };
    Ok(res)
}

fn solve(cli: &Cli, a: &SolveArgs) -> Result<bool> {
    let cfg = config(cli, "solve", a)?;
    let ps = points::read_path(&a.input)?;
    let mode = parse_mode(&a.mode)?;
    let second = || -> Result<PointSet> {
        let p = a.input2.as_ref().context("this functional needs --input2")?;
        points::read_path(p)
    };
    let weight = || WeightFunction::parse(&a.weight, ps.dim()).map_err(anyhow::Error::from);
    let start = Instant::now();
    let mut out = match a.functional.as_str() {
        "tsp" => serde_json::to_value(tsp(&ps, &weight()?, a.radius, mode)?)?,
        "mm" => serde_json::to_value(min_matching(&ps, &weight()?, a.radius, mode)?)?,
        "mst" => serde_json::to_value(mst(&ps, &weight()?, a.radius)?)?,
        "bm" => serde_json::to_value(bipartite_matching(&ps, &second()?, &weight()?, a.radius)?)?,
        "btsp" => serde_json::to_value(bipartite_tsp(&ps, &second()?, &weight()?, a.radius, mode)?)?,
        name => {
            let mut opts = SolveOptions::default();
            if let Some(l) = a.node_limit {
                opts.node_limit = l;
            }
            serde_json::to_value(solve_graph(name, &ps, a.radius, mode, &opts)?)?
        }
    };
    if let Value::Object(m) = &mut out {
        m.insert("functional".into(), json!(a.functional));
        m.insert("n".into(), json!(ps.len()));
        m.entry("elapsed_ms").or_insert(json!(start.elapsed().as_millis() as u64));
    }
    println!("{}", serde_json::to_string(&out)?);
    record(cli, &cfg, out)?;
    Ok(true)
}

fn descriptor(a: &EstimateArgs) -> Result<FunctionalDescriptor> {
    let problem = match a.functional.as_str() {
        "tsp" => Some(WeightedProblem::Tsp),
        "mm" => Some(WeightedProblem::Mm),
        "mst" => Some(WeightedProblem::Mst),
        _ => None,
    };
    match problem {
        Some(p) => {
            let w = WeightFunction::parse(&a.weight, a.d)?;
            // Exact tours and matchings do not scale to estimator sizes.
            let mode = if p == WeightedProblem::Mst { Mode::Exact } else { Mode::Heuristic };
            Ok(weighted_descriptor(p, &w, mode))
        }
        None => Ok(lookup(a.d, &a.functional)?),
    }
}

fn row(mode: &str, r: &EstimatorReport, seed: u64) -> EstimateRow {
    EstimateRow {
        mode: mode.to_string(),
        functional: r.params.functional.clone(),
        d: r.params.dim,
        lambda: r.params.lambda,
        s: r.params.s,
        n: r.params.n,
        t: r.params.t,
        reps: r.reps,
        mean: r.mean,
        stderr: r.stderr,
        seed,
        elapsed_ms: r.elapsed.as_millis() as u64,
    }
}

fn one_lambda(a: &EstimateArgs) -> Result<f64> {
    match a.lambda.as_slice() {
        [l] => Ok(*l),
        [] => bail!("this mode needs --lambda"),
        _ => bail!("this mode takes a single --lambda"),
    }
}

fn estimate(cli: &Cli, a: &EstimateArgs) -> Result<bool> {
    let cfg = config(cli, "estimate", a)?;
    let seed = cli.seed;
    let mode_name = serde_json::to_value(a.mode)?.as_str().unwrap_or_default().to_string();
    let mut ok = true;
    let mut rows = Vec::new();
    let payload;
    match a.mode {
        EstimateMode::Box => {
            let f = descriptor(a)?;
            let s = a.s.context("box mode needs --s")?;
            if a.lambda.is_empty() {
                bail!("box mode needs --lambda");
            }
            let opts = BoxOptions { periodic: a.periodic, ..BoxOptions::default() };
            let mut reports = Vec::new();
            for &l in &a.lambda {
                let r = estimate_rho_box_with(&f, l, s, a.reps, seed, opts)?;
                rows.push(row(&mode_name, &r, seed));
                reports.push(r);
            }
            payload = json!({ "rows": rows, "reports": reports });
        }
        EstimateMode::Cluster => {
            let f = descriptor(a)?;
            let r =
                estimate_rho_cluster(&f, one_lambda(a)?, a.reps, seed, a.cluster_cap.unwrap_or(DEFAULT_CLUSTER_CAP))?;
            rows.push(row(&mode_name, &r, seed));
            payload = json!({ "rows": rows, "reports": [r] });
        }
        EstimateMode::Thermo | EstimateMode::Dense => {
            let f = descriptor(a)?;
            if a.n.is_empty() {
                bail!("{mode_name} mode needs --n");
            }
            let mu = parse_distribution(&a.dist, a.d)?;
            let reports = if a.mode == EstimateMode::Thermo {
                lln_thermo_run(&f, &mu, a.t.context("thermo mode needs --t")?, &a.n, a.reps, seed)?
            } else {
                let exp = a.radius_exp.unwrap_or(1.0 / (2.0 * a.d as f64));
                let radius = move |n: usize| (n as f64).powf(-exp);
                lln_dense_run(&f, &mu, &radius, &a.n, a.reps, seed)?
            };
            rows.extend(reports.iter().map(|r| row(&mode_name, r, seed)));
            payload = json!({ "rows": rows, "reports": reports });
        }
        EstimateMode::Sweep => {
            let f = descriptor(a)?;
            let s = a.s.context("sweep mode needs --s")?;
            if a.lambda.is_empty() {
                bail!("sweep mode needs --lambda");
            }
            let opts = BoxOptions { periodic: a.periodic, ..BoxOptions::default() };
            let sw = rho_curve_sweep(&f, &a.lambda, s, a.reps, seed, opts)?;
            for v in &sw.violations {
                eprintln!("violation: {v}");
            }
            ok = sw.violations.is_empty();
            rows.extend(sw.rows.iter().map(|r| EstimateRow {
                mode: mode_name.clone(),
                functional: f.name.clone(),
                d: a.d,
                lambda: Some(r.lambda),
                s: Some(s),
                n: None,
                t: None,
                reps: a.reps - r.failed.min(a.reps),
                mean: r.rho,
                stderr: r.rho_stderr,
                seed,
                elapsed_ms: 0,
            }));
            payload = json!({ "rows": rows, "sweep": sw });
        }
        EstimateMode::Density => {
            let s = a.s.context("density mode needs --s")?;
            let start = Instant::now();
            let (value, detail) = match a.functional.as_str() {
                "packing" => {
                    let c = lattice_packing_density(a.d, s)?;
                    ok = c.verified;
                    (c.density, json!({ "verified": c.verified, "points": c.points.len() }))
                }
                "covering" => {
                    let c = lattice_covering_density(a.d, s)?;
                    ok = c.verified;
                    let detail = json!({ "verified": c.verified, "certificate_size": c.certificate_size });
                    (c.density, detail)
                }
                "hexagon" => {
                    if a.d != 2 {
                        bail!("the hexagon partition is planar (use --d 2)");
                    }
                    let h = hexagon_partition(s)?;
                    ok = h.diameters_verified;
                    (h.density, serde_json::to_value(&h)?)
                }
                other if other.starts_with("zeta-star") => {
                    let name = other.strip_prefix("zeta-star:").unwrap_or("alpha");
                    let f = lookup(a.d, name)?;
                    let z = zeta_star_lower(&f, s, a.budget, seed)?;
                    (z.density, json!({ "value": z.value, "functional": f.name }))
                }
                other => bail!("unknown density construction {other:?} (packing, covering, hexagon, zeta-star:<f>)"),
            };
            let reference = estimators::reference_constants().into_iter().filter(|c| c.dim == a.d).collect::<Vec<_>>();
            rows.push(EstimateRow {
                mode: mode_name.clone(),
                functional: a.functional.clone(),
                d: a.d,
                lambda: None,
                s: Some(s),
                n: None,
                t: None,
                reps: 1,
                mean: value,
                stderr: 0.0,
                seed,
                elapsed_ms: start.elapsed().as_millis() as u64,
            });
            payload = json!({ "rows": rows, "detail": detail, "references": reference });
        }
    }
    emit_rows(cli, &rows)?;
    if let Some(dir) = &cli.out {
        append_csv(
            &dir.join("estimates.csv"),
            &ESTIMATE_HEADER,
            &rows.iter().map(EstimateRow::cells).collect::<Vec<_>>(),
        )?;
        if a.dat {
            let name = report::file_stem(&mode_name, &rows[0].functional, a.d);
            report::write_dat(&dir.join(format!("{name}.dat")), &rows)?;
        }
    } else if a.dat {
        bail!("--dat needs --out");
    }
    record(cli, &cfg, payload)?;
    Ok(ok)
}

fn emit_rows(cli: &Cli, rows: &[EstimateRow]) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match cli.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(ESTIMATE_HEADER)?;
            for r in rows {
                w.write_record(r.cells())?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            for r in rows {
                writeln!(out, "{}", serde_json::to_string(r)?)?;
            }
        }
    }
    Ok(())
}

fn proptest(cli: &Cli, a: &ProptestArgs) -> Result<bool> {
    let cfg = config(cli, "proptest", a)?;
    let property =
        a.property.as_deref().map(str::parse::<PropertyId>).transpose().map_err(|e| anyhow::anyhow!("{e}"))?;
    let opts = SuiteOptions {
        dims: a.d.clone(),
        trials: a.trials,
        n_max: a.n_max,
        property,
        functional: a.functional.clone(),
        ..SuiteOptions::default()
    };
    let suite = run_all(cli.seed, &opts)?;
    let header = ["property", "functional", "d", "trials", "checked", "skipped", "violations", "elapsed_ms"];
    let rows: Vec<Vec<String>> = suite
        .reports
        .iter()
        .map(|r| {
            vec![
                r.property.to_string(),
                r.functional.clone(),
                r.dim.to_string(),
                r.trials.to_string(),
                r.checked.to_string(),
                r.skipped.to_string(),
                r.violations.to_string(),
                r.elapsed_ms.to_string(),
            ]
        })
        .collect();
    {
        let mut out = std::io::stdout().lock();
        match cli.format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(&mut out);
                w.write_record(header)?;
                for r in &rows {
                    w.write_record(r)?;
                }
                w.flush()?;
            }
            Format::Jsonl => {
                for r in &suite.reports {
                    let mut v = serde_json::to_value(r)?;
                    if let Value::Object(m) = &mut v {
                        m.remove("failures");
                    }
                    writeln!(out, "{v}")?;
                }
            }
        }
    }
    for c in &suite.controls {
        let status = if c.violations > 0 { "caught" } else { "MISSED" };
        eprintln!("negative control {} on {} (d = {}): {status}", c.property, c.functional, c.dim);
    }
    let ok = suite.ok();
    match &cli.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            append_csv(&dir.join("proptest.csv"), &header, &rows)?;
            write_failures(&dir.join("failures.jsonl"), &suite)?;
        }
        None if suite.violations() > 0 => suite.write_failures_jsonl(std::io::stderr().lock())?,
        None => {}
    }
    eprintln!(
        "{} violations, {} skipped evaluations; {}",
        suite.violations(),
        suite.skipped(),
        if ok { "suite passed" } else { "suite FAILED" }
    );
    let summary: Vec<Value> = suite
        .reports
        .iter()
        .chain(&suite.controls)
        .map(|r| {
            json!({
                "property": r.property, "functional": r.functional, "d": r.dim, "trials": r.trials,
                "checked": r.checked, "skipped": r.skipped, "violations": r.violations,
            })
        })
        .collect();
    record(cli, &cfg, json!({ "ok": ok, "violations": suite.violations(), "reports": summary }))?;
    Ok(ok)
}

fn write_failures(path: &Path, suite: &rgg_limits::propharness::SuiteReport) -> Result<()> {
    let f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = std::io::BufWriter::new(f);
    suite.write_failures_jsonl(&mut w)?;
    w.flush()?;
    Ok(())
}
