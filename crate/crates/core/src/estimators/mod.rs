//! Monte Carlo estimators of `ρ(λ)`, law-of-large-numbers runs, and
//! deterministic density constructions.
//!
//! Replications run on the rayon pool; replication `k` draws from the
//! substream `child_seed(seed, k)` and results are aggregated in index order,
//! so reports do not depend on the worker count.

mod cluster;
mod density;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geograph::build_graph_periodic;
use crate::invariants::FunctionalDescriptor;
use crate::pointproc::{sample_binomial, sample_homogeneous_box, Distribution};
use crate::rng::child_seed;

pub use cluster::{estimate_rho_cluster, origin_cluster, DEFAULT_CLUSTER_CAP};
pub use density::{
    covering_lattice, domination_bounds_via_covering, hexagon_partition, hexagon_partition_density,
    lattice_covering_density, lattice_packing_density, packing_lattice, reference_constants, verify_covering,
    verify_packing, zeta_bar_reference, zeta_star_lower, CoveringBounds, DensityConstant, DensityKind,
    HexagonPartition, LatticeCertificate, ZetaStar,
};

/// Parameters echoed in a report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimatorParams {
    pub functional: String,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
}

/// Mean and standard error over replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(reps)`.
    pub stderr: f64,
    /// Replications that produced a value.
    pub reps: usize,
    /// Replications lost to solver budgets; the report is partial if nonzero.
    pub failed: usize,
    pub params: EstimatorParams,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    /// Means of auxiliary per-replication quantities (for example certified
    /// bounds paired with the estimate).
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub aux: BTreeMap<String, f64>,
    #[serde(rename = "elapsed_ms", with = "ms")]
    pub elapsed: Duration,
}

mod ms {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64() * 1e3)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_secs_f64(f64::deserialize(d)?.max(0.0) / 1e3))
    }
}

impl EstimatorReport {
    pub fn partial(&self) -> bool {
        self.failed > 0
    }
}

/// Mean and standard error (`sd / sqrt(n)`, sample standard deviation).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Runs `reps` replications in parallel. Budget failures are counted; any
/// other error aborts the run.
fn replicate<T: Send>(reps: usize, seed: u64, f: impl Fn(u64) -> Result<T> + Sync) -> Result<(Vec<T>, usize)> {
    let out: Vec<Result<T>> = (0..reps as u64).into_par_iter().map(|k| f(child_seed(seed, k))).collect();
    let mut vals = Vec::with_capacity(reps);
    let mut failed = 0;
    for r in out {
        match r {
            Ok(v) => vals.push(v),
            Err(Error::BudgetExceeded { .. }) => failed += 1,
            Err(e) => return Err(e),
        }
    }
    Ok((vals, failed))
}

fn report(
    values: Vec<f64>,
    failed: usize,
    params: EstimatorParams,
    seed: u64,
    keep: bool,
    start: Instant,
) -> EstimatorReport {
    let (mean, stderr) = mean_stderr(&values);
    EstimatorReport {
        mean,
        stderr,
        reps: values.len(),
        failed,
        params,
        seed,
        values: keep.then_some(values),
        aux: BTreeMap::new(),
        elapsed: start.elapsed(),
    }
}

/// Options for the box estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxOptions {
    /// Evaluate on the flat torus of side `s` (graph functionals only).
    pub periodic: bool,
    /// Largest admissible expected point count `λ s^d`.
    pub max_expected: f64,
    pub keep_values: bool,
}

impl Default for BoxOptions {
    fn default() -> Self {
        Self { periodic: false, max_expected: 1e5, keep_values: false }
    }
}

fn check_positive(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{what} must be positive, got {v}")))
    }
}

/// Mean of `ζ(H_{λ,s}) / (λ s^d)` over independent boxes.
pub fn estimate_rho_box(
    f: &FunctionalDescriptor,
    lambda: f64,
    s: f64,
    reps: usize,
    seed: u64,
) -> Result<EstimatorReport> {
    estimate_rho_box_with(f, lambda, s, reps, seed, BoxOptions::default())
}

pub fn estimate_rho_box_with(
    f: &FunctionalDescriptor,
    lambda: f64,
    s: f64,
    reps: usize,
    seed: u64,
    opts: BoxOptions,
) -> Result<EstimatorReport> {
    check_positive("intensity", lambda)?;
    check_positive("box side", s)?;
    if reps == 0 {
        return Err(Error::Precondition("reps must be positive".into()));
    }
    let d = f.dim;
    let volume = s.powi(d as i32);
    if lambda * volume > opts.max_expected {
        return Err(Error::CapExceeded {
            what: "expected box size",
            size: (lambda * volume).ceil() as usize,
            cap: opts.max_expected as usize,
        });
    }
    if opts.periodic && !f.is_graph() {
        return Err(Error::Precondition("periodic boxes need a graph functional".into()));
    }
    let start = Instant::now();
    let (vals, failed) = replicate(reps, seed, |rs| {
        let ps = sample_homogeneous_box(lambda, s, d, rs)?;
        let z = if opts.periodic {
            let g = build_graph_periodic(&ps, 1.0, s)?;
            f.evaluate_graph(&g).expect("graph functional")?
        } else {
            f.evaluate(&ps)?
        };
        Ok(z / (lambda * volume))
    })?;
    let params =
        EstimatorParams { functional: f.name.clone(), dim: d, lambda: Some(lambda), s: Some(s), ..Default::default() };
    Ok(report(vals, failed, params, seed, opts.keep_values, start))
}

/// Per-`n` means of `n^{-1} ζ_{r_n}(X_n)` with `r_n = (t/n)^{1/d}`. The
/// samples for different `n` are prefixes of one stream per replication.
pub fn lln_thermo_run(
    f: &FunctionalDescriptor,
    mu: &Distribution,
    t: f64,
    n_grid: &[usize],
    reps: usize,
    seed: u64,
) -> Result<Vec<EstimatorReport>> {
    check_positive("t", t)?;
    let d = f.dim as f64;
    lln_run(f, mu, n_grid, reps, seed, |n| (t / n as f64).powf(1.0 / d), |n, _r| 1.0 / n as f64, Some(t))
}

/// Default dense-limit radius `r_n = n^{-1/(2d)}`.
pub fn default_dense_radius(dim: usize) -> impl Fn(usize) -> f64 + Sync {
    move |n| (n as f64).powf(-1.0 / (2.0 * dim as f64))
}

/// Per-`n` means of `r_n^d ζ_{r_n}(X_n)`. For domination under the uniform
/// law in `d ≤ 2`, the covering-net bounds are reported alongside, scaled
/// the same way, as `aux["lower"]` and `aux["upper"]`.
pub fn lln_dense_run(
    f: &FunctionalDescriptor,
    mu: &Distribution,
    radius: &(dyn Fn(usize) -> f64 + Sync),
    n_grid: &[usize],
    reps: usize,
    seed: u64,
) -> Result<Vec<EstimatorReport>> {
    let d = f.dim as i32;
    let mut reports = lln_run(f, mu, n_grid, reps, seed, radius, |_n, r| r.powi(d), None)?;
    let uniform = matches!(mu.ac_part(), crate::pointproc::AcPart::Uniform { mass } if *mass == 1.0);
    if f.name == "gamma" && uniform && f.dim <= 2 {
        for rep in reports.iter_mut() {
            let n = rep.params.n.expect("set by lln_run");
            let r = radius(n);
            if r >= 1.0 {
                continue;
            }
            let (b, _) = replicate(reps, seed, |rs| {
                let ps = sample_binomial(mu, n, rs);
                domination_bounds_via_covering(&ps, r, 0.2)
            })?;
            let scale = r.powi(d);
            let lower: Vec<f64> = b.iter().map(|c| c.lower.unwrap_or(f64::NAN) * scale).collect();
            let upper: Vec<f64> = b.iter().map(|c| c.upper as f64 * scale).collect();
            rep.aux.insert("lower".into(), mean_stderr(&lower).0);
            rep.aux.insert("upper".into(), mean_stderr(&upper).0);
        }
    }
    Ok(reports)
}

#[allow(clippy::too_many_arguments)]
fn lln_run(
    f: &FunctionalDescriptor,
    mu: &Distribution,
    n_grid: &[usize],
    reps: usize,
    seed: u64,
    radius: impl Fn(usize) -> f64 + Sync,
    norm: impl Fn(usize, f64) -> f64 + Sync,
    t: Option<f64>,
) -> Result<Vec<EstimatorReport>> {
    if mu.dim() != f.dim {
        return Err(Error::Precondition("distribution and functional dimensions differ".into()));
    }
    if reps == 0 || n_grid.is_empty() || n_grid.contains(&0) {
        return Err(Error::Precondition("need positive reps and a grid of positive n".into()));
    }
    let start = Instant::now();
    let n_max = *n_grid.iter().max().expect("nonempty");
    let per_rep = replicate(reps, seed, |rs| {
        let full = sample_binomial(mu, n_max, rs);
        Ok(n_grid
            .iter()
            .map(|&n| {
                let r = radius(n);
                f.evaluate_at(&full.prefix(n), r).map(|z| z * norm(n, r))
            })
            .collect::<Vec<_>>())
    })?
    .0;
    n_grid
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let mut vals = Vec::with_capacity(reps);
            let mut failed = 0;
            for row in &per_rep {
                match &row[k] {
                    Ok(v) => vals.push(*v),
                    Err(Error::BudgetExceeded { .. }) => failed += 1,
                    Err(e) => return Err(e.clone()),
                }
            }
            let params = EstimatorParams {
                functional: f.name.clone(),
                dim: f.dim,
                n: Some(n),
                t,
                r: Some(radius(n)),
                ..Default::default()
            };
            Ok(report(vals, failed, params, seed, false, start))
        })
        .collect()
}

/// One row of a `λρ(λ)` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub rho: f64,
    pub rho_stderr: f64,
    pub lambda_rho: f64,
    pub lambda_rho_stderr: f64,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub functional: String,
    pub dim: usize,
    pub s: f64,
    pub periodic: bool,
    pub rows: Vec<SweepRow>,
    /// Structural checks that failed beyond three standard errors.
    pub violations: Vec<String>,
}

/// Sweeps `λ` and checks, within three standard errors: `λρ(λ) ≤ ζ̄`
/// where a reference exists; `λρ` nondecreasing for functionals flagged
/// monotone in `X`; `ρ` nonincreasing for functionals flagged monotone in
/// `r`; and `ρ ≤ c1 + ζ({o})` for additive functionals.
pub fn rho_curve_sweep(
    f: &FunctionalDescriptor,
    lambdas: &[f64],
    s: f64,
    reps: usize,
    seed: u64,
    opts: BoxOptions,
) -> Result<SweepReport> {
    let mut rows = Vec::with_capacity(lambdas.len());
    for (k, &lambda) in lambdas.iter().enumerate() {
        let rep = estimate_rho_box_with(f, lambda, s, reps, child_seed(seed, 1 << 32 | k as u64), opts)?;
        rows.push(SweepRow {
            lambda,
            rho: rep.mean,
            rho_stderr: rep.stderr,
            lambda_rho: lambda * rep.mean,
            lambda_rho_stderr: lambda * rep.stderr,
            failed: rep.failed,
        });
    }
    let mut violations = Vec::new();
    if let Some(bar) = zeta_bar_reference(&f.name, f.dim) {
        for r in &rows {
            if r.lambda_rho > bar + 3.0 * r.lambda_rho_stderr {
                violations.push(format!("lambda {}: lambda*rho {} exceeds reference {}", r.lambda, r.lambda_rho, bar));
            }
        }
    }
    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let tol_lr = 3.0 * a.lambda_rho_stderr.hypot(b.lambda_rho_stderr);
        if f.flags.p6 && b.lambda_rho < a.lambda_rho - tol_lr {
            violations.push(format!("lambda*rho decreases from {} to {}", a.lambda, b.lambda));
        }
        let tol = 3.0 * a.rho_stderr.hypot(b.rho_stderr);
        if f.flags.p7 && b.rho > a.rho + tol {
            violations.push(format!("rho increases from {} to {}", a.lambda, b.lambda));
        }
    }
    if f.flags.additive {
        let cap = f.c1 + f.zeta_singleton;
        for r in &rows {
            if r.rho > cap + 3.0 * r.rho_stderr {
                violations.push(format!("lambda {}: rho {} exceeds c1 + zeta(o) = {}", r.lambda, r.rho, cap));
            }
        }
    }
    Ok(SweepReport { functional: f.name.clone(), dim: f.dim, s, periodic: opts.periodic, rows, violations })
}
