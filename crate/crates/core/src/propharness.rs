//! Randomized checks of the structural properties of registered functionals.
//!
//! Every trial is a pure function of `(case.seed, trial index)`, so a
//! reported failure replays exactly. Instances are drawn from regimes where
//! the properties are tight: mean degree near one to a few, clustered blobs,
//! near-unit lattices, and splits along hyperplanes.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euclid_opt::{mst, validate_weight, weighted_descriptor, WeightFunction, WeightedProblem};
use crate::geograph::{build_graph, component_count, isolated_count, GeometricGraph};
use crate::invariants::{
    edge_cover_number, eternal_domination_multiguard, eternal_domination_number, lookup, matching_number, registry,
    FunctionalDescriptor, Mode, SolveOptions,
};
use crate::pointproc::{dist2, PointSet};
use crate::rng;

/// A checked property.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PropertyId {
    P2,
    P3,
    P4,
    #[serde(rename = "P5'")]
    P5Prime,
    P5,
    P6,
    P7,
    P8,
    #[serde(rename = "SMOOTH")]
    Smooth,
    #[serde(rename = "CHAIN")]
    Chain,
    #[serde(rename = "EDGECOVER-ID")]
    EdgeCoverId,
    #[serde(rename = "MULTIGUARD")]
    Multiguard,
    #[serde(rename = "MST-COMPONENTS")]
    MstComponents,
    #[serde(rename = "W-VALIDATE")]
    WValidate,
}

impl PropertyId {
    pub const ALL: [PropertyId; 14] = [
        Self::P2,
        Self::P3,
        Self::P4,
        Self::P5Prime,
        Self::P5,
        Self::P6,
        Self::P7,
        Self::P8,
        Self::Smooth,
        Self::Chain,
        Self::EdgeCoverId,
        Self::Multiguard,
        Self::MstComponents,
        Self::WValidate,
    ];

    /// Properties of a single functional with declared constants.
    pub const PER_FUNCTIONAL: [PropertyId; 9] =
        [Self::P2, Self::P3, Self::P4, Self::P5Prime, Self::P5, Self::P6, Self::P7, Self::P8, Self::Smooth];

    pub fn name(self) -> &'static str {
        match self {
            Self::P2 => "P2",
            Self::P3 => "P3",
            Self::P4 => "P4",
            Self::P5Prime => "P5'",
            Self::P5 => "P5",
            Self::P6 => "P6",
            Self::P7 => "P7",
            Self::P8 => "P8",
            Self::Smooth => "SMOOTH",
            Self::Chain => "CHAIN",
            Self::EdgeCoverId => "EDGECOVER-ID",
            Self::Multiguard => "MULTIGUARD",
            Self::MstComponents => "MST-COMPONENTS",
            Self::WValidate => "W-VALIDATE",
        }
    }

    /// Cross-functional identities that take no descriptor.
    pub fn is_identity(self) -> bool {
        !Self::PER_FUNCTIONAL.contains(&self)
    }
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PropertyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase().replace('′', "'");
        Self::ALL
            .into_iter()
            .find(|p| p.name() == t || (t == "P5PRIME" && *p == Self::P5Prime))
            .ok_or_else(|| Error::Parse(format!("unknown property {s}")))
    }
}

/// How trial instances are cut into disjoint parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SplitRule {
    /// Independent fair coin per point.
    Random,
    /// Threshold on a random linear projection.
    Hyperplane,
    /// Alternates between the two per trial.
    #[default]
    Mixed,
}

/// Instance generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub dim: usize,
    pub n_min: usize,
    pub n_max: usize,
    /// Target mean degree of `G(X, 1)`; fixes the spatial scale, i.e. the
    /// radius relative to the typical nearest-neighbor distance.
    pub degree_range: (f64, f64),
    pub split: SplitRule,
}

impl GeneratorSpec {
    pub fn new(dim: usize, n_max: usize) -> Self {
        Self { dim, n_min: 1, n_max, degree_range: (0.3, 6.0), split: SplitRule::Mixed }
    }
}

/// One property, one generator, a trial count and a seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertyCase {
    pub property: PropertyId,
    pub gen: GeneratorSpec,
    pub trials: usize,
    pub seed: u64,
}

/// A violated trial with everything needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub property: PropertyId,
    pub functional: String,
    pub seed: u64,
    pub trial: usize,
    pub message: String,
    pub instance: PointSet,
    /// Part label of each instance point, for split properties.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<usize>>,
    /// Added points, shift vector or second instance, by property.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<PointSet>,
}

/// Result of one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: PropertyId,
    pub functional: String,
    pub dim: usize,
    pub trials: usize,
    pub checked: usize,
    /// Trials skipped because a solver exceeded its budget.
    pub skipped: usize,
    pub violations: usize,
    /// The first few violating trials.
    pub failures: Vec<FailureRecord>,
    pub elapsed_ms: f64,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

const KEPT_FAILURES: usize = 20;
const TRIAL_STREAM_BASE: u64 = 1 << 32;

enum Outcome {
    Pass,
    Skip,
    Fail(Box<FailureRecord>),
}

/// Whether `property` says anything about `f`.
pub fn applicable(property: PropertyId, f: &FunctionalDescriptor) -> bool {
    let parts = additive_parts(f);
    match property {
        PropertyId::P2 => true,
        PropertyId::P3 | PropertyId::P4 | PropertyId::Smooth => !parts.is_empty(),
        PropertyId::P5Prime => parts.iter().any(|p| p.flags.p5_prime),
        PropertyId::P5 => f.flags.p5 && f.local_growth.is_some(),
        PropertyId::P6 => f.flags.p6,
        PropertyId::P7 => f.flags.p7,
        PropertyId::P8 => f.flags.p8 && f.is_graph(),
        _ => false,
    }
}

/// The functionals carrying the declared additivity constants: `f` itself,
/// or the parts of its decomposition.
fn additive_parts(f: &FunctionalDescriptor) -> Vec<&FunctionalDescriptor> {
    if f.flags.additive {
        return vec![f];
    }
    match &f.decomposition {
        Some(d) => {
            std::iter::once(d.primed.as_ref()).chain(d.double_primed.as_deref()).filter(|p| p.flags.additive).collect()
        }
        None => Vec::new(),
    }
}

/// Runs a per-functional property case.
pub fn run_property(case: &PropertyCase, f: &FunctionalDescriptor) -> Result<PropertyReport> {
    if case.property.is_identity() {
        return Err(Error::Precondition(format!("{} takes no functional; use run_identity", case.property)));
    }
    if !applicable(case.property, f) {
        return Err(Error::Precondition(format!("{} is not declared for {}", case.property, f.name)));
    }
    check_case(case, f.dim)?;
    Ok(run_trials(case, &f.name, |idx| functional_trial(case, f, idx)))
}

/// Runs a cross-functional identity case.
pub fn run_identity(case: &PropertyCase) -> Result<PropertyReport> {
    if !case.property.is_identity() {
        return Err(Error::Precondition(format!("{} needs a functional; use run_property", case.property)));
    }
    check_case(case, case.gen.dim)?;
    let label = identity_label(case.property);
    Ok(run_trials(case, label, |idx| identity_trial(case, idx)))
}

/// Re-runs one trial; `Some` when it violates.
pub fn replay(case: &PropertyCase, f: Option<&FunctionalDescriptor>, trial: usize) -> Result<Option<FailureRecord>> {
    check_case(case, case.gen.dim)?;
    let out = match f {
        Some(f) if !case.property.is_identity() => functional_trial(case, f, trial),
        None if case.property.is_identity() => identity_trial(case, trial),
        _ => return Err(Error::Precondition("functional presence does not match the property".into())),
    };
    Ok(match out {
        Outcome::Fail(r) => Some(*r),
        _ => None,
    })
}

fn identity_label(p: PropertyId) -> &'static str {
    match p {
        PropertyId::Chain => "gamma<=alpha<=gammainf<=theta",
        PropertyId::EdgeCoverId => "eta",
        PropertyId::Multiguard => "gammainf",
        PropertyId::MstComponents => "mst[indicator]",
        _ => "weights",
    }
}

fn check_case(case: &PropertyCase, dim: usize) -> Result<()> {
    let g = &case.gen;
    if g.dim != dim {
        return Err(Error::Precondition("generator and functional dimensions differ".into()));
    }
    if g.dim == 0 || g.n_min == 0 || g.n_min > g.n_max {
        return Err(Error::Precondition("generator needs positive dim and 1 <= n_min <= n_max".into()));
    }
    let (lo, hi) = g.degree_range;
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::Precondition("degree range must be positive and ordered".into()));
    }
    Ok(())
}

fn run_trials(case: &PropertyCase, name: &str, trial: impl Fn(usize) -> Outcome + Sync + Send) -> PropertyReport {
    let start = Instant::now();
    let outcomes: Vec<Outcome> = (0..case.trials).into_par_iter().map(trial).collect();
    let mut report = PropertyReport {
        property: case.property,
        functional: name.to_string(),
        dim: case.gen.dim,
        trials: case.trials,
        checked: 0,
        skipped: 0,
        violations: 0,
        failures: Vec::new(),
        elapsed_ms: 0.0,
    };
    for o in outcomes {
        match o {
            Outcome::Pass => report.checked += 1,
            Outcome::Skip => report.skipped += 1,
            Outcome::Fail(r) => {
                report.checked += 1;
                report.violations += 1;
                if report.failures.len() < KEPT_FAILURES {
                    report.failures.push(*r);
                }
            }
        }
    }
    report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    report
}

fn trial_rng(seed: u64, idx: usize) -> ChaCha8Rng {
    rng::stream(seed, TRIAL_STREAM_BASE + idx as u64)
}

/// Tolerance for comparing functional values; exact for integers.
fn tol(values: &[f64]) -> f64 {
    1e-9 * (1.0 + values.iter().map(|v| v.abs()).sum::<f64>())
}

// ---------------------------------------------------------------------------
// Generators

fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * 2.0 * std::f64::consts::PI / d as f64,
    }
}

fn gaussian_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| StandardNormal.sample(rng)).collect()
}

/// Uniform point in the ball of radius `r` about `c`.
fn in_ball(rng: &mut ChaCha8Rng, c: &[f64], r: f64) -> Vec<f64> {
    let d = c.len();
    let g = gaussian_vec(rng, d);
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let rad = r * rng.random::<f64>().powf(1.0 / d as f64);
    c.iter().zip(&g).map(|(ci, gi)| ci + rad * gi / norm).collect()
}

/// `n` points in one of three regimes, as raw coordinates.
fn raw_instance(rng: &mut ChaCha8Rng, g: &GeneratorSpec, n: usize) -> Vec<Vec<f64>> {
    let d = g.dim;
    let (lo, hi) = g.degree_range;
    let deg = rng.random_range(lo..=hi);
    let side = (n as f64 * unit_ball_volume(d) / deg).powf(1.0 / d as f64);
    match rng.random_range(0..3) {
        0 => (0..n).map(|_| (0..d).map(|_| rng.random::<f64>() * side).collect()).collect(),
        1 => {
            let k = rng.random_range(1..=3usize);
            let centers: Vec<Vec<f64>> = (0..k).map(|_| (0..d).map(|_| rng.random::<f64>() * side).collect()).collect();
            let sd = rng.random_range(0.15..0.9);
            (0..n)
                .map(|_| {
                    let c = &centers[rng.random_range(0..k)];
                    c.iter()
                        .map(|x| {
                            let z: f64 = StandardNormal.sample(rng);
                            x + sd * z
                        })
                        .collect()
                })
                .collect()
        }
        _ => {
            // Jittered lattice with spacing near one: many distances near the
            // connection threshold.
            let spacing = rng.random_range(0.8..1.2);
            let jitter = rng.random_range(0.0..0.05);
            let m = (n as f64).powf(1.0 / d as f64).ceil() as usize + 1;
            let mut sites: Vec<Vec<f64>> = Vec::new();
            let mut idx = vec![0usize; d];
            loop {
                let mut p: Vec<f64> = idx.iter().map(|&i| i as f64 * spacing).collect();
                if d >= 2 && idx[1] % 2 == 1 {
                    p[0] += spacing / 2.0;
                }
                if d >= 2 {
                    p[1] *= 3f64.sqrt() / 2.0;
                }
                sites.push(p);
                let mut k = 0;
                while k < d && idx[k] == m - 1 {
                    idx[k] = 0;
                    k += 1;
                }
                if k == d {
                    break;
                }
                idx[k] += 1;
            }
            sites.shuffle(rng);
            sites
                .into_iter()
                .take(n)
                .map(|p| p.into_iter().map(|x| x + jitter * (rng.random::<f64>() - 0.5)).collect())
                .collect()
        }
    }
}

fn to_set(d: usize, pts: &[Vec<f64>]) -> Option<PointSet> {
    PointSet::from_points(d, pts).ok()
}

/// A random instance with `n` drawn from the generator's range; `None` in
/// the (measure-zero) event of coincident points.
fn instance(rng: &mut ChaCha8Rng, g: &GeneratorSpec) -> Option<PointSet> {
    instance_at_least(rng, g, 1)
}

fn instance_at_least(rng: &mut ChaCha8Rng, g: &GeneratorSpec, min_n: usize) -> Option<PointSet> {
    let n = rng.random_range(g.n_min.max(min_n).min(g.n_max)..=g.n_max);
    to_set(g.dim, &raw_instance(rng, g, n))
}

/// Part labels in `0..k`, every part nonempty.
fn split(rng: &mut ChaCha8Rng, ps: &PointSet, k: usize, rule: SplitRule) -> Option<Vec<usize>> {
    let n = ps.len();
    if n < k {
        return None;
    }
    let rule = match rule {
        SplitRule::Mixed if rng.random::<bool>() => SplitRule::Random,
        SplitRule::Mixed => SplitRule::Hyperplane,
        r => r,
    };
    let labels = match rule {
        SplitRule::Random => {
            let mut l: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
            // Force every label to appear.
            let mut slots: Vec<usize> = (0..n).collect();
            slots.shuffle(rng);
            for (part, &i) in slots.iter().take(k).enumerate() {
                l[i] = part;
            }
            l
        }
        _ => {
            let u = gaussian_vec(rng, ps.dim());
            let mut order: Vec<usize> = (0..n).collect();
            let proj = |i: usize| ps.point(i).iter().zip(&u).map(|(a, b)| a * b).sum::<f64>();
            order.sort_by(|&a, &b| proj(a).total_cmp(&proj(b)));
            let mut cuts: Vec<usize> = (1..n).collect();
            cuts.shuffle(rng);
            let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
            cuts.sort_unstable();
            let mut l = vec![0usize; n];
            for (rank, &i) in order.iter().enumerate() {
                l[i] = cuts.iter().filter(|&&c| rank >= c).count();
            }
            l
        }
    };
    Some(labels)
}

fn part(ps: &PointSet, labels: &[usize], k: usize) -> PointSet {
    let idx: Vec<usize> = (0..ps.len()).filter(|&i| labels[i] == k).collect();
    ps.select(&idx)
}

/// Points of `y` within distance one of some point of `z`.
fn boundary_count(y: &PointSet, z: &PointSet) -> usize {
    y.iter().filter(|p| z.iter().any(|q| dist2(p, q) <= 1.0)).count()
}

/// Random isometry (orthogonal map plus translation) applied to every point.
fn isometry(rng: &mut ChaCha8Rng, ps: &PointSet) -> Option<PointSet> {
    let d = ps.dim();
    // Gram-Schmidt on a Gaussian matrix gives a random orthogonal basis.
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    while basis.len() < d {
        let mut v = gaussian_vec(rng, d);
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let t: Vec<f64> = (0..d).map(|_| rng.random_range(-20.0..20.0)).collect();
    let pts: Vec<Vec<f64>> = ps
        .iter()
        .map(|p| basis.iter().zip(&t).map(|(b, ti)| b.iter().zip(p).map(|(x, y)| x * y).sum::<f64>() + ti).collect())
        .collect();
    to_set(d, &pts)
}

fn same_graph_under(g: &GeometricGraph, h: &GeometricGraph, perm: &[usize]) -> bool {
    g.edge_count() == h.edge_count() && g.edges().iter().all(|&(a, b)| h.has_edge(perm[a], perm[b]))
}

// ---------------------------------------------------------------------------
// Trials

fn fail(
    case: &PropertyCase,
    name: &str,
    idx: usize,
    message: String,
    instance: &PointSet,
    parts: Option<Vec<usize>>,
    extra: Option<PointSet>,
) -> Outcome {
    Outcome::Fail(Box::new(FailureRecord {
        property: case.property,
        functional: name.to_string(),
        seed: case.seed,
        trial: idx,
        message,
        instance: instance.clone(),
        parts,
        extra,
    }))
}

/// Maps budget and cap overruns to skips and any other error to a failure.
macro_rules! eval {
    ($e:expr, $case:expr, $name:expr, $idx:expr, $inst:expr) => {
        match $e {
            Ok(v) => v,
            Err(Error::BudgetExceeded { .. }) | Err(Error::CapExceeded { .. }) => return Outcome::Skip,
            Err(e) => return fail($case, $name, $idx, format!("evaluation error: {e}"), $inst, None, None),
        }
    };
}

fn functional_trial(case: &PropertyCase, f: &FunctionalDescriptor, idx: usize) -> Outcome {
    let mut rng = trial_rng(case.seed, idx);
    let g = &case.gen;
    match case.property {
        PropertyId::P2 => {
            let Some(x) = instance(&mut rng, g) else { return Outcome::Skip };
            let shift: Vec<f64> =
                if idx == 0 { vec![0.0; g.dim] } else { (0..g.dim).map(|_| rng.random_range(-50.0..50.0)).collect() };
            let Ok(moved) = crate::pointproc::transform(&x, 1.0, &shift) else { return Outcome::Skip };
            let a = eval!(f.evaluate(&x), case, &f.name, idx, &x);
            let b = eval!(f.evaluate(&moved), case, &f.name, idx, &x);
            // Floating-point shifts can move a distance across the threshold;
            // only count a violation when the graph is unchanged.
            if (a - b).abs() > tol(&[a, b]) {
                if f.is_graph() || f.flags.p8 {
                    let same = match (build_graph(&x, 1.0), build_graph(&moved, 1.0)) {
                        (Ok(gx), Ok(gm)) => same_graph_under(&gx, &gm, &(0..x.len()).collect::<Vec<_>>()),
                        _ => false,
                    };
                    if !same {
                        return Outcome::Skip;
                    }
                }
                let extra = PointSet::from_points(g.dim, &[shift]).ok();
                return fail(case, &f.name, idx, format!("zeta(X) = {a}, zeta(x + X) = {b}"), &x, None, extra);
            }
            Outcome::Pass
        }
        PropertyId::P3 | PropertyId::P4 => {
            let k = if rng.random_range(0..4) == 0 { rng.random_range(3..=4) } else { 2 };
            let Some(x) = instance_at_least(&mut rng, g, k) else { return Outcome::Skip };
            let Some(labels) = split(&mut rng, &x, k, g.split) else { return Outcome::Skip };
            let parts: Vec<PointSet> = (0..k).map(|i| part(&x, &labels, i)).collect();
            for h in additive_parts(f) {
                let whole = eval!(h.evaluate(&x), case, &h.name, idx, &x);
                let mut sum = 0.0;
                let mut vals = vec![whole];
                for p in &parts {
                    let v = eval!(h.evaluate(p), case, &h.name, idx, &x);
                    sum += v;
                    vals.push(v);
                }
                let t = tol(&vals);
                if case.property == PropertyId::P3 {
                    let bound = sum + h.c1 * (k - 1) as f64;
                    if whole > bound + t {
                        let msg = format!("{}: zeta(X) = {whole} > sum {sum} + (k-1) c1 with k = {k}", h.name);
                        return fail(case, &f.name, idx, msg, &x, Some(labels), None);
                    }
                } else {
                    // Part i against the union of the parts before it.
                    let mut boundary = 0usize;
                    let mut before = parts[0].clone();
                    for p in &parts[1..] {
                        boundary += boundary_count(p, &before);
                        before = before.union(p).expect("disjoint parts");
                    }
                    let bound = sum - h.c2 * boundary as f64;
                    if whole < bound - t {
                        let msg = format!(
                            "{}: zeta(X) = {whole} < sum {sum} - c2 * {boundary} with c2 = {}, k = {k}",
                            h.name, h.c2
                        );
                        return fail(case, &f.name, idx, msg, &x, Some(labels), None);
                    }
                }
            }
            Outcome::Pass
        }
        PropertyId::P5Prime => {
            let n = rng.random_range(g.n_max.div_ceil(2).max(g.n_min)..=g.n_max);
            let o = vec![0.0; g.dim];
            let pts: Vec<Vec<f64>> = (0..n).map(|_| in_ball(&mut rng, &o, 0.5)).collect();
            let Some(x) = to_set(g.dim, &pts) else { return Outcome::Skip };
            for h in additive_parts(f) {
                let Some(b) = h.local_bound else { continue };
                let v = eval!(h.evaluate(&x), case, &h.name, idx, &x);
                if v > b + tol(&[v, b]) {
                    return fail(case, &f.name, idx, format!("{}: zeta(X) = {v} > bound {b}", h.name), &x, None, None);
                }
            }
            Outcome::Pass
        }
        PropertyId::P5 => {
            let growth = f.local_growth.as_ref().expect("checked by applicable");
            let delta = rng.random_range((1.0 / g.n_max as f64)..=0.5);
            let n_lo = ((1.0 / delta).ceil() as usize).clamp(g.n_min, g.n_max);
            let n = rng.random_range(n_lo..=g.n_max);
            let o = vec![0.0; g.dim];
            let pts: Vec<Vec<f64>> = (0..n).map(|_| in_ball(&mut rng, &o, delta)).collect();
            let Some(x) = to_set(g.dim, &pts) else { return Outcome::Skip };
            let v = eval!(f.evaluate(&x), case, &f.name, idx, &x);
            let b = growth(delta);
            let ratio = v / n as f64;
            if ratio > b + tol(&[ratio, b]) {
                let msg = format!("zeta(X)/|X| = {ratio} > {b} at delta = {delta}");
                return fail(case, &f.name, idx, msg, &x, None, None);
            }
            Outcome::Pass
        }
        PropertyId::P6 => {
            let Some(x) = instance(&mut rng, g) else { return Outcome::Skip };
            let m = rng.random_range(1..=3usize);
            let added: Vec<Vec<f64>> = (0..m)
                .map(|_| {
                    let c = x.point(rng.random_range(0..x.len())).to_vec();
                    in_ball(&mut rng, &c, 1.5)
                })
                .collect();
            let Some(y) = to_set(g.dim, &added) else { return Outcome::Skip };
            let Ok(xy) = x.union(&y) else { return Outcome::Skip };
            let a = eval!(f.evaluate(&x), case, &f.name, idx, &x);
            let b = eval!(f.evaluate(&xy), case, &f.name, idx, &x);
            if a > b + tol(&[a, b]) {
                return fail(case, &f.name, idx, format!("zeta(X) = {a} > zeta(X u Y) = {b}"), &x, None, Some(y));
            }
            Outcome::Pass
        }
        PropertyId::P7 => {
            let Some(x) = instance(&mut rng, g) else { return Outcome::Skip };
            let r1 = rng.random_range(0.3..2.0);
            let r2 = r1 * rng.random_range(1.0..2.5);
            let a = eval!(f.evaluate_at(&x, r1), case, &f.name, idx, &x);
            let b = eval!(f.evaluate_at(&x, r2), case, &f.name, idx, &x);
            if b > a + tol(&[a, b]) {
                let msg = format!("zeta_r(X) increased from {a} at r = {r1} to {b} at r = {r2}");
                return fail(case, &f.name, idx, msg, &x, None, None);
            }
            Outcome::Pass
        }
        PropertyId::P8 => {
            let Some(x) = instance(&mut rng, g) else { return Outcome::Skip };
            let Some(moved) = isometry(&mut rng, &x) else { return Outcome::Skip };
            // Per-point jitter makes the copy non-congruent; keep it only if
            // the graph survives.
            let jitter = rng.random_range(0.0..0.05);
            let mut perm: Vec<usize> = (0..x.len()).collect();
            perm.shuffle(&mut rng);
            let mut pts = vec![Vec::new(); x.len()];
            for (i, p) in moved.iter().enumerate() {
                pts[perm[i]] = p.iter().map(|c| c + jitter * (rng.random::<f64>() - 0.5)).collect();
            }
            let Ok(gx) = build_graph(&x, 1.0) else { return Outcome::Skip };
            let keeps = |pts: &[Vec<f64>]| {
                to_set(g.dim, pts).filter(|y| build_graph(y, 1.0).is_ok_and(|gy| same_graph_under(&gx, &gy, &perm)))
            };
            let y = match keeps(&pts) {
                Some(y) => y,
                None => {
                    // Fall back to the exact isometric copy.
                    let mut plain = vec![Vec::new(); x.len()];
                    for (i, p) in moved.iter().enumerate() {
                        plain[perm[i]] = p.to_vec();
                    }
                    match keeps(&plain) {
                        Some(y) => y,
                        None => return Outcome::Skip,
                    }
                }
            };
            let a = eval!(f.evaluate(&x), case, &f.name, idx, &x);
            let b = eval!(f.evaluate(&y), case, &f.name, idx, &x);
            if (a - b).abs() > tol(&[a, b]) {
                let msg = format!("isomorphic graphs give {a} and {b}");
                return fail(case, &f.name, idx, msg, &x, None, Some(y));
            }
            Outcome::Pass
        }
        PropertyId::Smooth => {
            let Some(x) = instance(&mut rng, g) else { return Outcome::Skip };
            let c = x.point(rng.random_range(0..x.len())).to_vec();
            let p = in_ball(&mut rng, &c, 1.2);
            let Ok(xp) = x.with_point(&p) else { return Outcome::Skip };
            let extra = PointSet::from_points(g.dim, &[p]).ok();
            let mut checks: Vec<(&FunctionalDescriptor, f64)> = vec![(f, f.smoothness_bound())];
            if !f.flags.additive {
                checks.extend(additive_parts(f).into_iter().map(|h| (h, h.k())));
            }
            for (h, k) in checks {
                let a = eval!(h.evaluate(&x), case, &h.name, idx, &x);
                let b = eval!(h.evaluate(&xp), case, &h.name, idx, &x);
                if (a - b).abs() > k + tol(&[a, b, k]) {
                    let msg = format!("{}: |zeta(X + x) - zeta(X)| = {} > K = {k}", h.name, (a - b).abs());
                    return fail(case, &f.name, idx, msg, &x, None, extra);
                }
            }
            Outcome::Pass
        }
        _ => unreachable!("identities are run by identity_trial"),
    }
}

fn identity_trial(case: &PropertyCase, idx: usize) -> Outcome {
    let mut rng = trial_rng(case.seed, idx);
    let g = &case.gen;
    let name = identity_label(case.property);
    if case.property == PropertyId::WValidate {
        return weight_trial(case, &mut rng, idx);
    }
    let Some(x) = instance(&mut rng, g) else { return Outcome::Skip };
    let Ok(graph) = build_graph(&x, 1.0) else { return Outcome::Skip };
    let opts = SolveOptions::default();
    let solve = |r: Result<crate::invariants::SolveResult>| -> Result<f64> {
        let r = r?;
        if r.exact {
            Ok(r.value)
        } else {
            Err(Error::BudgetExceeded { nodes: 0, lower: r.lower, upper: r.upper })
        }
    };
    match case.property {
        PropertyId::Chain => {
            let mut vals = Vec::new();
            for n in ["gamma", "alpha", "gammainf", "theta"] {
                let f = lookup(g.dim, n).expect("registered");
                vals.push(eval!(f.evaluate_graph(&graph).expect("graph functional"), case, name, idx, &x));
            }
            if vals.windows(2).any(|w| w[0] > w[1]) {
                let msg = format!("gamma, alpha, gammainf, theta = {vals:?}");
                return fail(case, name, idx, msg, &x, None, None);
            }
        }
        PropertyId::EdgeCoverId => {
            let eta = edge_cover_number(&graph).value;
            let psi = matching_number(&graph).value;
            let sigma = isolated_count(&graph) as f64;
            if eta != x.len() as f64 - psi - sigma {
                let msg = format!("eta = {eta}, n - psi - sigma = {}", x.len() as f64 - psi - sigma);
                return fail(case, name, idx, msg, &x, None, None);
            }
        }
        PropertyId::Multiguard => {
            let a = eval!(solve(eternal_domination_number(&graph, &opts)), case, name, idx, &x);
            let b = eval!(solve(eternal_domination_multiguard(&graph, &opts)), case, name, idx, &x);
            if a != b {
                return fail(case, name, idx, format!("one guard per vertex {a}, multiset {b}"), &x, None, None);
            }
        }
        PropertyId::MstComponents => {
            let w = WeightFunction::indicator(g.dim);
            let t = eval!(mst(&x, &w, 1.0), case, name, idx, &x);
            let c = component_count(&graph) as f64;
            if t.weight != c - 1.0 {
                return fail(case, name, idx, format!("MST weight {} vs components {c}", t.weight), &x, None, None);
            }
        }
        _ => unreachable!("per-functional properties are run by functional_trial"),
    }
    Outcome::Pass
}

/// Random member of the built-in weight library, possibly truncated or
/// restricted.
fn random_weight(rng: &mut ChaCha8Rng, dim: usize) -> WeightFunction {
    let base = match rng.random_range(0..5) {
        0 => {
            WeightFunction::power(dim, rng.random_range(0.05..(dim as f64 - 0.01).max(0.1))).expect("positive exponent")
        }
        1 => WeightFunction::indicator(dim),
        2 => WeightFunction::log(dim),
        3 => WeightFunction::sin_mod(dim),
        _ => WeightFunction::mixed(dim),
    };
    match rng.random_range(0..4) {
        0 => base.truncate(rng.random_range(0.1..3.0)),
        1 => base.restrict(rng.random_range(0.05..0.9)),
        2 => base.truncate(rng.random_range(0.1..3.0)).restrict(rng.random_range(0.05..0.9)),
        _ => base,
    }
}

fn weight_trial(case: &PropertyCase, rng: &mut ChaCha8Rng, idx: usize) -> Outcome {
    let w = random_weight(rng, case.gen.dim);
    let report = validate_weight(&w);
    if report.all_pass() {
        return Outcome::Pass;
    }
    let bad: Vec<String> =
        report.checks.iter().filter(|c| !c.pass).map(|c| format!("{} at {:?}", c.flag, c.counterexample)).collect();
    let msg = format!("{}: {}", w.name(), bad.join("; "));
    fail(case, "weights", idx, msg, &PointSet::empty(case.gen.dim), None, None)
}

// ---------------------------------------------------------------------------
// Suites

/// Reports of a full run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub reports: Vec<PropertyReport>,
    /// Deliberately wrong descriptors; each must record violations.
    pub controls: Vec<PropertyReport>,
}

impl SuiteReport {
    pub fn violations(&self) -> usize {
        self.reports.iter().map(|r| r.violations).sum()
    }

    pub fn skipped(&self) -> usize {
        self.reports.iter().map(|r| r.skipped).sum()
    }

    pub fn controls_caught(&self) -> bool {
        self.controls.iter().all(|r| r.violations > 0)
    }

    /// No violations and every negative control caught.
    pub fn ok(&self) -> bool {
        self.violations() == 0 && self.controls_caught()
    }

    /// One JSON line per failure, controls included.
    pub fn write_failures_jsonl(&self, mut w: impl Write) -> std::io::Result<()> {
        for r in self.reports.iter().chain(&self.controls) {
            for f in &r.failures {
                serde_json::to_writer(&mut w, f)?;
                writeln!(w)?;
            }
        }
        Ok(())
    }
}

/// Options for [`run_all`].
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub dims: Vec<usize>,
    pub trials: usize,
    /// Largest instance for graph functionals.
    pub n_max: usize,
    /// Largest instance for eternal domination.
    pub n_max_eternal: usize,
    /// Largest instance for weighted functionals (exact tours).
    pub n_max_weighted: usize,
    /// Trials for the weight-flag grid, which is costlier per trial.
    pub weight_trials: usize,
    /// Restrict to one property.
    pub property: Option<PropertyId>,
    /// Restrict to one functional by name.
    pub functional: Option<String>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            dims: vec![1, 2],
            trials: 10_000,
            n_max: 20,
            n_max_eternal: 12,
            n_max_weighted: 9,
            weight_trials: 200,
            property: None,
            functional: None,
        }
    }
}

/// Weighted functionals with declared constants, for the suite.
pub fn weighted_functionals(dim: usize) -> Vec<FunctionalDescriptor> {
    let ind = WeightFunction::indicator(dim);
    let pow = WeightFunction::power(dim, (dim as f64 / 2.0).min(1.0)).expect("positive exponent");
    let capped = pow.truncate(1.0);
    vec![
        weighted_descriptor(WeightedProblem::Tsp, &ind, Mode::Exact),
        weighted_descriptor(WeightedProblem::Tsp, &capped, Mode::Exact),
        weighted_descriptor(WeightedProblem::Mm, &ind, Mode::Exact),
        weighted_descriptor(WeightedProblem::Mm, &capped, Mode::Exact),
        weighted_descriptor(WeightedProblem::Mst, &ind, Mode::Exact),
        weighted_descriptor(WeightedProblem::Mst, &capped.restrict(0.25), Mode::Exact),
    ]
}

/// Descriptors with wrong declarations that the harness must reject.
pub fn negative_controls(dim: usize) -> Vec<(PropertyId, FunctionalDescriptor)> {
    let mut alpha = lookup(dim, "alpha").expect("registered");
    alpha.name = "alpha[c2=0]".into();
    alpha.c2 = 0.0;
    let mut gamma = lookup(dim, "gamma").expect("registered");
    gamma.name = "gamma[p6]".into();
    gamma.flags.p6 = true;
    let mut theta = lookup(dim, "theta").expect("registered");
    theta.name = "theta[c1=-1]".into();
    theta.c1 = -1.0;
    vec![(PropertyId::P4, alpha), (PropertyId::P6, gamma), (PropertyId::P3, theta)]
}

/// The default case matrix: every registered functional against every
/// property it declares, the weighted functionals, the identities, and the
/// negative controls.
pub fn run_all(seed: u64, opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut reports = Vec::new();
    let mut controls = Vec::new();
    let wanted_prop = |p: PropertyId| opts.property.is_none_or(|q| q == p);
    let wanted_fn = |n: &str| opts.functional.as_deref().is_none_or(|q| q.eq_ignore_ascii_case(n));
    for &dim in &opts.dims {
        let mut fns: Vec<(FunctionalDescriptor, usize)> = registry(dim)
            .into_iter()
            .map(|f| {
                let n = if f.name == "gammainf" { opts.n_max_eternal } else { opts.n_max };
                (f, n)
            })
            .collect();
        fns.extend(weighted_functionals(dim).into_iter().map(|f| (f, opts.n_max_weighted)));
        for (f, n_max) in &fns {
            if !wanted_fn(&f.name) {
                continue;
            }
            for p in PropertyId::PER_FUNCTIONAL {
                if !wanted_prop(p) || !applicable(p, f) {
                    continue;
                }
                let case = PropertyCase {
                    property: p,
                    gen: GeneratorSpec::new(dim, *n_max),
                    trials: opts.trials,
                    seed: case_seed(seed, dim, p, &f.name),
                };
                reports.push(run_property(&case, f)?);
            }
        }
        for p in [
            PropertyId::Chain,
            PropertyId::EdgeCoverId,
            PropertyId::Multiguard,
            PropertyId::MstComponents,
            PropertyId::WValidate,
        ] {
            if !wanted_prop(p) || !wanted_fn(identity_label(p)) && opts.functional.is_some() {
                continue;
            }
            let (n_max, trials) = match p {
                PropertyId::Chain | PropertyId::Multiguard => (opts.n_max_eternal, opts.trials),
                PropertyId::WValidate => (1, opts.weight_trials),
                _ => (opts.n_max, opts.trials),
            };
            let case = PropertyCase {
                property: p,
                gen: GeneratorSpec::new(dim, n_max),
                trials,
                seed: case_seed(seed, dim, p, identity_label(p)),
            };
            reports.push(run_identity(&case)?);
        }
        if opts.property.is_none() && opts.functional.is_none() {
            for (p, f) in negative_controls(dim) {
                let case = PropertyCase {
                    property: p,
                    gen: GeneratorSpec::new(dim, opts.n_max),
                    trials: opts.trials.min(2_000),
                    seed: case_seed(seed, dim, p, &f.name),
                };
                controls.push(run_property(&case, &f)?);
            }
        }
    }
    Ok(SuiteReport { seed, reports, controls })
}

/// Distinct, stable seed per case.
fn case_seed(seed: u64, dim: usize, p: PropertyId, name: &str) -> u64 {
    // FNV-1a over the case key.
    let key = format!("{dim}/{p}/{name}");
    let h = key.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    rng::child_seed(seed, h)
}
