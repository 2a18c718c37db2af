//! Weight functions `w: R^d → [0, ∞]` and their regularity conditions.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng;

type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Declared regularity conditions. Parameterized conditions carry their
/// constants.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct WeightFlags {
    /// `w(x) = w(−x)`.
    pub w1: bool,
    /// `w(o) = 0` and `w(x) → 0` as `x → o`.
    pub w2: bool,
    /// `w(x) → w_max` as `‖x‖ → ∞`.
    pub w3: bool,
    /// `w(x) ≤ c4·max(‖x‖^p, 1)`, as `(c4, p)`.
    pub w4: Option<(f64, f64)>,
    /// `w(x) = w_max < ∞` for `‖x‖ > c5`, as `c5`.
    pub w5: Option<f64>,
    /// `w(x) ≤ c6·‖x‖^p`, as `(c6, p)`.
    pub w6: Option<(f64, f64)>,
    /// `w(x) = 0` for `‖x‖ ≤ δ`, as `δ`.
    pub w7: Option<f64>,
}

#[derive(Clone)]
enum Kind {
    /// `w(x) = f(‖x‖)`. `level(a)` is a radius beyond which `f ≥ a`;
    /// `zero` is a radius within which `f = 0`.
    Radial {
        f: RadialFn,
        level: Option<RadialFn>,
        zero: f64,
    },
    General(VectorFn),
}

/// A weight function with its supremum and declared conditions.
#[derive(Clone)]
pub struct WeightFunction {
    name: String,
    dim: usize,
    w_max: f64,
    /// `w(x)` is a nondecreasing function of `‖x‖` alone.
    pub radial_monotone: bool,
    pub flags: WeightFlags,
    kind: Kind,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFunction")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("w_max", &self.w_max)
            .field("radial_monotone", &self.radial_monotone)
            .field("flags", &self.flags)
            .finish()
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl WeightFunction {
    /// A weight given by an arbitrary closure. No conditions are declared.
    pub fn general(name: &str, dim: usize, w_max: f64, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.to_string(),
            dim,
            w_max,
            radial_monotone: false,
            flags: WeightFlags::default(),
            kind: Kind::General(Arc::new(f)),
        }
    }

    fn radial(
        name: String,
        dim: usize,
        w_max: f64,
        monotone: bool,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        level: Option<RadialFn>,
        zero: f64,
    ) -> Self {
        let mut w = Self {
            name,
            dim,
            w_max,
            radial_monotone: monotone,
            flags: WeightFlags { w1: true, ..WeightFlags::default() },
            kind: Kind::Radial { f: Arc::new(f), level, zero },
        };
        w.derive_bounded_flags();
        w
    }

    /// W4 is automatic for bounded weights; W5 and W7 follow from the level
    /// and zero radii.
    fn derive_bounded_flags(&mut self) {
        let half = self.dim as f64 / 2.0;
        if self.w_max.is_finite() && self.flags.w4.is_none() {
            self.flags.w4 = Some((self.w_max.max(f64::MIN_POSITIVE), half));
        }
        if let Kind::Radial { level, zero, .. } = &self.kind {
            self.flags.w5 = match level {
                Some(l) if self.w_max.is_finite() => {
                    let c = l(self.w_max);
                    c.is_finite().then_some(c.max(f64::MIN_POSITIVE))
                }
                _ => None,
            };
            self.flags.w7 = (*zero > 0.0).then_some(*zero);
            if *zero > 0.0 {
                self.flags.w2 = true;
            }
        }
    }

    /// `‖x‖^p`, `p > 0`.
    pub fn power(dim: usize, p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Parse(format!("power exponent must be positive, got {p}")));
        }
        let mut w = Self::radial(
            format!("pow:{p}"),
            dim,
            f64::INFINITY,
            true,
            move |t| t.powf(p),
            Some(Arc::new(move |a: f64| a.max(0.0).powf(1.0 / p))),
            0.0,
        );
        w.flags.w2 = true;
        w.flags.w3 = true;
        if p < dim as f64 {
            w.flags.w4 = Some((1.0, p));
            w.flags.w6 = Some((1.0, p));
        }
        Ok(w)
    }

    /// `1 − 1_{B_1(o)}`: zero on the closed unit ball, one outside.
    pub fn indicator(dim: usize) -> Self {
        let mut w = Self::radial(
            "indicator".into(),
            dim,
            1.0,
            true,
            |t| if t <= 1.0 { 0.0 } else { 1.0 },
            Some(Arc::new(|a: f64| if a <= 0.0 { 0.0 } else { 1.0 })),
            1.0,
        );
        w.flags.w3 = true;
        w
    }

    /// `log(‖x‖ + 1)`.
    pub fn log(dim: usize) -> Self {
        let p = (dim as f64 / 2.0).min(1.0);
        // log(1+t) ≤ t ≤ t^p on [0,1]; log(1+t) ≤ ln 2 + t^p/(p e) beyond.
        let c = std::f64::consts::LN_2 + 1.0 / (p * std::f64::consts::E);
        let mut w = Self::radial(
            "log".into(),
            dim,
            f64::INFINITY,
            true,
            |t| t.ln_1p(),
            Some(Arc::new(|a: f64| a.max(0.0).exp_m1())),
            0.0,
        );
        w.flags.w2 = true;
        w.flags.w3 = true;
        w.flags.w4 = Some((c, p));
        w.flags.w6 = Some((c, p));
        w
    }

    /// `‖x‖·(2 + sin ‖x‖)`: unbounded, not monotone in `‖x‖`.
    pub fn sin_mod(dim: usize) -> Self {
        let mut w = Self::radial(
            "sinmod".into(),
            dim,
            f64::INFINITY,
            false,
            |t| t * (2.0 + t.sin()),
            Some(Arc::new(|a: f64| a.max(0.0))),
            0.0,
        );
        w.flags.w2 = true;
        w.flags.w3 = true;
        if dim >= 2 {
            w.flags.w4 = Some((3.0, 1.0));
            w.flags.w6 = Some((3.0, 1.0));
        }
        w
    }

    /// `‖x‖^{3/2} + ‖x‖^{1/2}`.
    pub fn mixed(dim: usize) -> Self {
        let mut w = Self::radial(
            "mixed".into(),
            dim,
            f64::INFINITY,
            true,
            |t| t.powf(1.5) + t.sqrt(),
            Some(Arc::new(|a: f64| a.max(0.0).powf(2.0 / 3.0))),
            0.0,
        );
        w.flags.w2 = true;
        w.flags.w3 = true;
        if dim >= 2 {
            w.flags.w4 = Some((2.0, 1.5));
        }
        w
    }

    /// Parses a weight spec string.
    ///
    /// Grammar: `pow:<p>`, `indicator`, `log`, `sinmod`, `mixed`,
    /// `trunc:<weight>:<a>`, `restrict:<weight>:<delta>`.
    pub fn parse(spec: &str, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        let tokens: Vec<&str> = spec.split(':').map(str::trim).collect();
        let (w, rest) = parse_tokens(&tokens, dim)?;
        if !rest.is_empty() {
            return Err(Error::Parse(format!("trailing tokens in weight spec {spec:?}: {rest:?}")));
        }
        Ok(w)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `sup_x w(x)`, possibly infinite.
    pub fn w_max(&self) -> f64 {
        self.w_max
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.kind {
            Kind::Radial { f, .. } => f(norm(x)),
            Kind::General(f) => f(x),
        }
    }

    /// `w` at distance `t` for radial weights; `None` otherwise.
    pub fn eval_radial(&self, t: f64) -> Option<f64> {
        match &self.kind {
            Kind::Radial { f, .. } => Some(f(t)),
            Kind::General(_) => None,
        }
    }

    /// Edge weight `w(r^{-1}(b − a))`.
    pub fn edge(&self, a: &[f64], b: &[f64], r: f64) -> f64 {
        match &self.kind {
            Kind::Radial { f, .. } => f(crate::pointproc::dist2(a, b).sqrt() / r),
            Kind::General(f) => {
                let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| (y - x) / r).collect();
                f(&d)
            }
        }
    }

    /// `sup_{‖x‖ ≤ ρ} w(x)` when it can be read off exactly.
    pub fn sup_on_ball(&self, rho: f64) -> Option<f64> {
        match &self.kind {
            Kind::Radial { f, .. } if self.radial_monotone => Some(f(rho)),
            _ => None,
        }
    }

    /// `w_a = min(w, a)`.
    pub fn truncate(&self, a: f64) -> Self {
        let a = a.max(0.0);
        let w_max = self.w_max.min(a);
        let name = format!("trunc:{}:{a}", self.name);
        let mut out = match &self.kind {
            Kind::Radial { f, level, zero } => {
                let f = f.clone();
                let lv = level
                    .clone()
                    .map(|l| -> RadialFn { Arc::new(move |b: f64| if b <= a { l(b) } else { f64::INFINITY }) });
                let zero = if a == 0.0 { f64::INFINITY } else { *zero };
                Self::radial(name, self.dim, w_max, self.radial_monotone, move |t| f(t).min(a), lv, zero)
            }
            Kind::General(f) => {
                let f = f.clone();
                let mut w = Self::general(&name, self.dim, w_max, move |x| f(x).min(a));
                w.flags.w1 = self.flags.w1;
                w.flags.w5 = self.flags.w5;
                w.derive_bounded_flags();
                w
            }
        };
        out.flags.w1 = self.flags.w1;
        out.flags.w2 |= self.flags.w2;
        out.flags.w3 = self.flags.w3;
        out.flags.w6 = self.flags.w6;
        out
    }

    /// `w·(1 − 1_{B_δ(o)})`: zero on the closed ball of radius `δ`.
    pub fn restrict(&self, delta: f64) -> Self {
        let delta = delta.max(0.0);
        let name = format!("restrict:{}:{delta}", self.name);
        let mut out = match &self.kind {
            Kind::Radial { f, level, zero } => {
                let f = f.clone();
                let lv = level
                    .clone()
                    .map(|l| -> RadialFn { Arc::new(move |b: f64| if b <= 0.0 { 0.0 } else { l(b).max(delta) }) });
                Self::radial(
                    name,
                    self.dim,
                    self.w_max,
                    self.radial_monotone,
                    move |t| if t <= delta { 0.0 } else { f(t) },
                    lv,
                    zero.max(delta),
                )
            }
            Kind::General(f) => {
                let f = f.clone();
                let mut w =
                    Self::general(&name, self.dim, self.w_max, move |x| if norm(x) <= delta { 0.0 } else { f(x) });
                w.flags.w5 = self.flags.w5.map(|c| c.max(delta));
                w.flags.w7 = (delta > 0.0).then_some(delta);
                w.derive_bounded_flags();
                w
            }
        };
        out.flags.w1 = self.flags.w1;
        out.flags.w2 |= self.flags.w2;
        out.flags.w3 = self.flags.w3;
        out.flags.w4 = self.flags.w4.or(out.flags.w4);
        if let Some((c4, p)) = self.flags.w4 {
            if delta > 0.0 {
                out.flags.w6 = Some((c4 * delta.powf(-p).max(1.0), p));
            }
        }
        out
    }
}

fn parse_tokens<'a>(t: &'a [&'a str], dim: usize) -> Result<(WeightFunction, &'a [&'a str])> {
    let num = |s: Option<&&str>, what: &str| -> Result<f64> {
        let s = s.ok_or_else(|| Error::Parse(format!("missing {what}")))?;
        s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::Parse(format!("bad {what}: {s:?}")))
    };
    match t.first().copied() {
        Some("pow") => Ok((WeightFunction::power(dim, num(t.get(1), "exponent")?)?, &t[2..])),
        Some("indicator") => Ok((WeightFunction::indicator(dim), &t[1..])),
        Some("log") => Ok((WeightFunction::log(dim), &t[1..])),
        Some("sinmod") => Ok((WeightFunction::sin_mod(dim), &t[1..])),
        Some("mixed") => Ok((WeightFunction::mixed(dim), &t[1..])),
        Some(op @ ("trunc" | "restrict")) => {
            let (inner, rest) = parse_tokens(&t[1..], dim)?;
            let v = num(rest.first(), if op == "trunc" { "truncation level" } else { "radius" })?;
            if v < 0.0 {
                return Err(Error::Parse(format!("{op} parameter must be nonnegative")));
            }
            let w = if op == "trunc" { inner.truncate(v) } else { inner.restrict(v) };
            Ok((w, &rest[1..]))
        }
        Some(other) => Err(Error::Parse(format!("unknown weight {other:?}"))),
        None => Err(Error::Parse("empty weight spec".into())),
    }
}

/// Outcome of checking one declared condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlagCheck {
    pub flag: &'static str,
    pub pass: bool,
    pub counterexample: Option<Vec<f64>>,
}

/// Per-condition validation outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightReport {
    pub weight: String,
    pub checks: Vec<FlagCheck>,
}

impl WeightReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, flag: &str) -> Option<&FlagCheck> {
        self.checks.iter().find(|c| c.flag == flag)
    }
}

const VALIDATION_POINTS: usize = 10_000;
const VALIDATION_SEED: u64 = 0x5745_4947_4854;

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Checks every declared condition, plus `0 ≤ w ≤ w_max`, on random points
/// with radii up to `10·max(c5, 1)`.
pub fn validate_weight(w: &WeightFunction) -> WeightReport {
    let dim = w.dim;
    let c5 = w.flags.w5.unwrap_or(1.0);
    let reach = 10.0 * c5.max(1.0);
    let mut rng = rng::stream(VALIDATION_SEED, 0);
    let mut sample_at = |radius: f64| -> Vec<f64> {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = norm(&v).max(f64::MIN_POSITIVE);
        v.iter_mut().for_each(|x| *x *= radius / n);
        v
    };
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(VALIDATION_POINTS + 64);
    pts.push(vec![0.0; dim]);
    let mut u = rng::stream(VALIDATION_SEED, 1);
    for k in 0..VALIDATION_POINTS {
        // Alternate uniform radii with radii concentrated near the origin.
        let t: f64 = u.random();
        let radius = if k % 2 == 0 { t * reach } else { t.powi(4) * reach };
        pts.push(sample_at(radius));
    }
    // Points straddling the declared radii.
    for r in [w.flags.w5, w.flags.w7].into_iter().flatten() {
        if r.is_finite() {
            for eps in [-1e-9, 0.0, 1e-9] {
                pts.push(sample_at((r * (1.0 + eps)).max(0.0)));
            }
        }
    }

    let find = |pred: &dyn Fn(&[f64]) -> bool| pts.iter().find(|x| !pred(x)).cloned();
    let mut checks = Vec::new();
    let mut push = |flag: &'static str, cx: Option<Vec<f64>>| {
        checks.push(FlagCheck { flag, pass: cx.is_none(), counterexample: cx })
    };

    push(
        "range",
        find(&|x| {
            let v = w.eval(x);
            v >= 0.0 && v <= w.w_max * (1.0 + 1e-12)
        }),
    );
    if w.flags.w1 {
        push(
            "W1",
            find(&|x| {
                let neg: Vec<f64> = x.iter().map(|v| -v).collect();
                close(w.eval(x), w.eval(&neg))
            }),
        );
    }
    if w.flags.w2 {
        let origin = vec![0.0; dim];
        let cx = if w.eval(&origin) != 0.0 {
            Some(origin)
        } else {
            // Small enough that |x|^p < 1e-3 for p ≥ 0.05; its square is
            // still a normal float.
            let near: Vec<Vec<f64>> = (0..64).map(|_| sample_at(1e-150)).collect();
            near.into_iter().find(|x| w.eval(x) > 1e-3)
        };
        push("W2", cx);
    }
    if w.flags.w3 {
        let dirs: Vec<Vec<f64>> = (0..64).map(|_| sample_at(1.0)).collect();
        let cx = dirs.into_iter().find_map(|v| {
            let at = |r: f64| w.eval(&v.iter().map(|x| x * r).collect::<Vec<_>>());
            let ok = if w.w_max.is_finite() {
                (at(1e6) - w.w_max).abs() <= 1e-6 * w.w_max.max(1.0)
            } else {
                // Unbounded: nondecreasing along the ray and growing by a
                // factor ten between 1e6 and 1e96.
                let (a, b, c) = (at(1e6), at(1e12), at(1e96));
                a > 0.0 && a <= b && b <= c && c >= 10.0 * a
            };
            (!ok).then(|| v.iter().map(|x| x * 1e6).collect())
        });
        push("W3", cx);
    }
    if let Some((c4, p)) = w.flags.w4 {
        let ok_p = p > 0.0 && p < dim as f64;
        push(
            "W4",
            if ok_p { find(&|x| w.eval(x) <= c4 * norm(x).powf(p).max(1.0) * (1.0 + 1e-12)) } else { Some(vec![p]) },
        );
    }
    if let Some(c5) = w.flags.w5 {
        push(
            "W5",
            if w.w_max.is_finite() {
                find(&|x| norm(x) <= c5 || w.eval(x) == w.w_max)
            } else {
                pts.iter().find(|x| norm(x) > c5).cloned().or(Some(vec![c5]))
            },
        );
    }
    if let Some((c6, p)) = w.flags.w6 {
        let ok_p = p > 0.0 && p < dim as f64;
        push("W6", if ok_p { find(&|x| w.eval(x) <= c6 * norm(x).powf(p) * (1.0 + 1e-12)) } else { Some(vec![p]) });
    }
    if let Some(delta) = w.flags.w7 {
        push("W7", find(&|x| norm(x) > delta || w.eval(x) == 0.0));
    }
    WeightReport { weight: w.name.clone(), checks }
}
