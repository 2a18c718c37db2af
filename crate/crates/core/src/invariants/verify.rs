//! Independent certificate checkers.

use std::collections::HashSet;

use super::{GuardCertificate, HPattern};
use crate::geograph::GeometricGraph;

fn distinct_in_range(g: &GeometricGraph, set: &[usize]) -> bool {
    let mut seen = HashSet::new();
    set.iter().all(|&v| v < g.n() && seen.insert(v))
}

pub fn is_independent(g: &GeometricGraph, set: &[usize]) -> bool {
    distinct_in_range(g, set) && set.iter().enumerate().all(|(i, &a)| set[i + 1..].iter().all(|&b| !g.has_edge(a, b)))
}

pub fn is_dominating(g: &GeometricGraph, set: &[usize]) -> bool {
    if !distinct_in_range(g, set) {
        return false;
    }
    let mut dom = vec![false; g.n()];
    for &v in set {
        dom[v] = true;
        g.neighbors(v).iter().for_each(|&u| dom[u] = true);
    }
    dom.into_iter().all(|d| d)
}

pub fn is_clique(g: &GeometricGraph, set: &[usize]) -> bool {
    distinct_in_range(g, set) && set.iter().enumerate().all(|(i, &a)| set[i + 1..].iter().all(|&b| g.has_edge(a, b)))
}

/// Cells are cliques and cover every vertex exactly once.
pub fn is_clique_partition(g: &GeometricGraph, parts: &[Vec<usize>]) -> bool {
    let mut count = vec![0usize; g.n()];
    for p in parts {
        if p.is_empty() || !is_clique(g, p) {
            return false;
        }
        p.iter().for_each(|&v| count[v] += 1);
    }
    count.into_iter().all(|c| c == 1)
}

pub fn is_matching(g: &GeometricGraph, edges: &[(usize, usize)]) -> bool {
    let mut used = vec![false; g.n()];
    edges.iter().all(|&(a, b)| {
        let ok = a < g.n() && b < g.n() && g.has_edge(a, b) && !used[a] && !used[b];
        if ok {
            used[a] = true;
            used[b] = true;
        }
        ok
    })
}

/// Edges of `g` touching every non-isolated vertex.
pub fn is_edge_cover(g: &GeometricGraph, edges: &[(usize, usize)]) -> bool {
    let mut cov = vec![false; g.n()];
    for &(a, b) in edges {
        if a >= g.n() || b >= g.n() || !g.has_edge(a, b) {
            return false;
        }
        cov[a] = true;
        cov[b] = true;
    }
    (0..g.n()).all(|v| cov[v] || g.degree(v) == 0)
}

/// Vertex-disjoint vertex sets, each carrying a copy of `h`.
pub fn is_h_packing(g: &GeometricGraph, copies: &[Vec<usize>], h: &HPattern) -> bool {
    let mut used = vec![false; g.n()];
    for c in copies {
        if c.len() != h.n || !distinct_in_range(g, c) || c.iter().any(|&v| used[v]) {
            return false;
        }
        c.iter().for_each(|&v| used[v] = true);
        let mut perm: Vec<usize> = (0..h.n).collect();
        let mut found = false;
        loop {
            if h.edges.iter().all(|&(a, b)| g.has_edge(c[perm[a]], c[perm[b]])) {
                found = true;
                break;
            }
            if !super::packing::next_permutation(&mut perm) {
                break;
            }
        }
        if !found {
            return false;
        }
    }
    true
}

/// Checks that a family of guard multisets (sorted vertex lists, repeats
/// allowed) is nonempty, of one size, dominating, and closed under attacks on
/// `vertices`. Returns the guard count.
pub fn safe_family_size(g: &GeometricGraph, vertices: &[usize], family: &[Vec<usize>]) -> Option<usize> {
    let k = family.first()?.len();
    let set: HashSet<&Vec<usize>> = family.iter().collect();
    let in_scope: HashSet<usize> = vertices.iter().copied().collect();
    for conf in family {
        if conf.len() != k || conf.iter().any(|v| !in_scope.contains(v)) {
            return None;
        }
        let occ: HashSet<usize> = conf.iter().copied().collect();
        for &v in vertices {
            if occ.contains(&v) {
                continue;
            }
            let answered = g.neighbors(v).iter().filter(|u| occ.contains(u)).any(|&u| {
                let mut next = conf.clone();
                let pos = next.iter().position(|&x| x == u).expect("occupied");
                next[pos] = v;
                next.sort_unstable();
                set.contains(&next)
            });
            if !answered {
                return None;
            }
        }
    }
    Some(k)
}

/// Total guard count certified by per-component certificates, or `None`
/// if any certificate fails or the components are not all covered.
pub fn guard_certificates(g: &GeometricGraph, certs: &[GuardCertificate]) -> Option<usize> {
    let comps = crate::geograph::components(g);
    let mut comp_of = vec![0usize; g.n()];
    for (c, cl) in comps.iter().enumerate() {
        cl.members.iter().for_each(|&v| comp_of[v] = c);
    }
    let mut covered = vec![false; comps.len()];
    let mut total = 0;
    for cert in certs {
        let members = match cert {
            GuardCertificate::CliquePartition(p) => p.first()?.first().map(|&v| comp_of[v])?,
            GuardCertificate::SafeFamily(f) => f.first()?.first().map(|&v| comp_of[v])?,
        };
        if covered[members] {
            return None;
        }
        covered[members] = true;
        let verts = &comps[members].members;
        match cert {
            GuardCertificate::CliquePartition(parts) => {
                let mut seen: Vec<usize> = parts.iter().flatten().copied().collect();
                seen.sort_unstable();
                if seen != *verts || parts.iter().any(|p| !is_clique(g, p)) {
                    return None;
                }
                total += parts.len();
            }
            GuardCertificate::SafeFamily(f) => {
                total += safe_family_size(g, verts, f)?;
            }
        }
    }
    covered.into_iter().all(|c| c).then_some(total)
}
