//! Eternal domination by greatest-fixpoint game search.
//!
//! A guard configuration is safe when it dominates and every attack on an
//! unoccupied vertex can be answered by moving one adjacent guard onto it,
//! reaching another safe configuration. The safe family is the greatest
//! fixpoint of this condition over all configurations of a given size.

use std::collections::HashMap;
use std::time::Instant;

use super::clique_cover::theta_component;
use super::independence::alpha_component;
use super::{local_components, Budget, GuardCertificate, Local, Mode, SolveOptions, SolveResult, Witness};
use crate::error::{Error, Result};
use crate::geograph::GeometricGraph;

/// Largest component the bitmask search accepts regardless of options.
const HARD_CAP: usize = 24;

/// `γ^∞(G)` in the one-guard-moves model.
///
/// Components where `α = θ` are settled by the sandwich `α ≤ γ^∞ ≤ θ`.
/// Others with at most `opts.eternal_cap` vertices run the game search for
/// `k = α, …, θ − 1`; larger ones return bounds only.
pub fn eternal_domination_number(g: &GeometricGraph, opts: &SolveOptions) -> Result<SolveResult> {
    let start = Instant::now();
    let mut budget = Budget::new(opts.node_limit);
    let cap = opts.eternal_cap.min(HARD_CAP);
    let (mut lower, mut upper) = (0usize, 0usize);
    let mut certs = Vec::new();
    for local in local_components(g) {
        let a = alpha_component(g, &local, Mode::Exact, &mut budget);
        let t = theta_component(g, &local, Mode::Exact, &mut budget);
        if !a.complete || !t.complete {
            return Err(Error::BudgetExceeded {
                nodes: budget.used,
                lower: (lower + a.set.len()) as f64,
                upper: (upper + t.partition.len()) as f64,
            });
        }
        let (alpha, theta) = (a.set.len(), t.partition.len());
        let partition_cert =
            || GuardCertificate::CliquePartition(t.partition.iter().map(|p| local.to_global(p)).collect());
        if alpha == theta {
            lower += alpha;
            upper += theta;
            certs.push(partition_cert());
            continue;
        }
        if local.n() > cap {
            lower += alpha;
            upper += theta;
            certs.push(partition_cert());
            continue;
        }
        let masks = closed_masks(&local);
        let mut found = None;
        for k in alpha..theta {
            let fam = safe_family(&masks, k);
            if !fam.is_empty() {
                found = Some((k, fam));
                break;
            }
        }
        match found {
            Some((k, fam)) => {
                lower += k;
                upper += k;
                certs.push(GuardCertificate::SafeFamily(fam.iter().map(|&m| local.to_global(&bits(m))).collect()));
            }
            None => {
                lower += theta;
                upper += theta;
                certs.push(partition_cert());
            }
        }
    }
    Ok(SolveResult::bounded(upper as f64, lower as f64, upper as f64, Some(Witness::Guards(certs)), start))
}

fn closed_masks(local: &Local) -> Vec<u32> {
    local.adj.iter().enumerate().map(|(v, a)| a.iter().fold(1u32 << v, |m, &u| m | (1 << u))).collect()
}

fn bits(mut m: u32) -> Vec<usize> {
    let mut out = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// Greatest safe family of `k`-subsets; `closed[v]` is the closed
/// neighborhood mask of `v`.
pub(crate) fn safe_family(closed: &[u32], k: usize) -> Vec<u32> {
    let n = closed.len();
    assert!(n <= HARD_CAP, "game search limited to {HARD_CAP} vertices");
    if k == 0 || k > n {
        return Vec::new();
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut alive = vec![false; 1usize << n];
    let mut family = Vec::new();
    // Gosper's hack over k-subsets.
    let mut s: u32 = (1u32 << k) - 1;
    while s <= full {
        if bits(s).iter().fold(0u32, |m, &v| m | closed[v]) == full {
            alive[s as usize] = true;
            family.push(s);
        }
        let c = s & s.wrapping_neg();
        let r = s + c;
        if r == 0 || r > full {
            break;
        }
        s = (((r ^ s) >> 2) / c) | r;
    }
    loop {
        let mut changed = false;
        let mut i = 0;
        while i < family.len() {
            let s = family[i];
            if defended(s, closed, n, &alive) {
                i += 1;
            } else {
                alive[s as usize] = false;
                family.swap_remove(i);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    family.sort_unstable();
    family
}

fn defended(s: u32, closed: &[u32], n: usize, alive: &[bool]) -> bool {
    (0..n).filter(|&v| s & (1 << v) == 0).all(|v| {
        let movers = closed[v] & s;
        bits(movers).into_iter().any(|u| alive[((s & !(1 << u)) | (1 << v)) as usize])
    })
}

/// `γ_*^∞(G)`: eternal domination with several guards allowed per vertex.
///
/// Searches guard multisets of size `k = 1, 2, …` per component with no
/// sandwich shortcut; components above `opts.multiguard_cap` vertices fail.
pub fn eternal_domination_multiguard(g: &GeometricGraph, opts: &SolveOptions) -> Result<SolveResult> {
    let start = Instant::now();
    let mut total = 0;
    let mut certs = Vec::new();
    for local in local_components(g) {
        let n = local.n();
        if n > opts.multiguard_cap.min(15) {
            return Err(Error::CapExceeded { what: "multiguard component", size: n, cap: opts.multiguard_cap.min(15) });
        }
        let masks = closed_masks(&local);
        let (k, fam) = (1..=n)
            .find_map(|k| {
                let f = safe_multiset_family(&masks, k);
                (!f.is_empty()).then_some((k, f))
            })
            .expect("n guards on distinct vertices are always safe");
        total += k;
        certs.push(GuardCertificate::SafeFamily(
            fam.iter()
                .map(|counts| {
                    let mut v: Vec<usize> = counts
                        .iter()
                        .enumerate()
                        .flat_map(|(i, &c)| std::iter::repeat_n(local.verts[i], c as usize))
                        .collect();
                    v.sort_unstable();
                    v
                })
                .collect(),
        ));
    }
    Ok(SolveResult::exact(total, Some(Witness::Guards(certs)), start))
}

fn safe_multiset_family(closed: &[u32], k: usize) -> Vec<Vec<u8>> {
    let n = closed.len();
    let mut configs: Vec<Vec<u8>> = Vec::new();
    let mut counts = vec![0u8; n];
    compositions(&mut counts, 0, k, &mut configs);
    let full: u32 = (1u32 << n) - 1;
    configs.retain(|c| {
        let occ = c.iter().enumerate().filter(|(_, &x)| x > 0).fold(0u32, |m, (v, _)| m | closed[v]);
        occ == full
    });
    let index: HashMap<Vec<u8>, usize> = configs.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    let mut alive = vec![true; configs.len()];
    loop {
        let mut changed = false;
        for i in 0..configs.len() {
            if !alive[i] {
                continue;
            }
            let c = &configs[i];
            let ok = (0..n).filter(|&v| c[v] == 0).all(|v| {
                bits(closed[v] & !(1 << v)).into_iter().filter(|&u| c[u] > 0).any(|u| {
                    let mut next = c.clone();
                    next[u] -= 1;
                    next[v] += 1;
                    index.get(&next).is_some_and(|&j| alive[j])
                })
            });
            if !ok {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    configs.into_iter().zip(alive).filter_map(|(c, a)| a.then_some(c)).collect()
}

fn compositions(counts: &mut Vec<u8>, pos: usize, left: usize, out: &mut Vec<Vec<u8>>) {
    if pos == counts.len() - 1 {
        counts[pos] = left as u8;
        out.push(counts.clone());
        return;
    }
    for c in 0..=left {
        counts[pos] = c as u8;
        compositions(counts, pos + 1, left - c, out);
    }
    counts[pos] = 0;
}
