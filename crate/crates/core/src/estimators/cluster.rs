//! The cluster of the origin in `H_λ ∪ {o}`.
//!
//! The process is generated lazily on unit cells, each cell seeded from the
//! replication seed and its integer coordinates, so the explored cluster is
//! exactly the component of the origin in the infinite process.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Poisson};

use super::{check_positive, replicate, report, EstimatorParams, EstimatorReport};
use crate::error::{Error, Result};
use crate::invariants::FunctionalDescriptor;
use crate::pointproc::{dist2, PointSet};

pub const DEFAULT_CLUSTER_CAP: usize = 100_000;

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct LazyProcess {
    lambda: f64,
    dim: usize,
    seed: u64,
    cells: HashMap<Vec<i64>, Vec<f64>>,
}

impl LazyProcess {
    fn cell(&mut self, key: &[i64]) -> &[f64] {
        if !self.cells.contains_key(key) {
            let mut h = mix(self.seed);
            for &k in key {
                h = mix(h ^ k as u64);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(h);
            let count = Poisson::new(self.lambda).expect("positive intensity").sample(&mut rng) as usize;
            let pts: Vec<f64> = (0..count * self.dim).map(|i| key[i % self.dim] as f64 + rng.random::<f64>()).collect();
            self.cells.insert(key.to_vec(), pts);
        }
        &self.cells[key]
    }
}

/// Points of the component of the origin in `G(H_λ ∪ {o}, 1)`, origin
/// first. Fails once the cluster exceeds `cap` points.
pub fn origin_cluster(lambda: f64, dim: usize, seed: u64, cap: usize) -> Result<PointSet> {
    check_positive("intensity", lambda)?;
    let mut proc = LazyProcess { lambda, dim, seed, cells: HashMap::new() };
    let mut members: Vec<Vec<f64>> = vec![vec![0.0; dim]];
    let mut seen: HashSet<(Vec<i64>, usize)> = HashSet::new();
    let mut head = 0;
    while head < members.len() {
        let p = members[head].clone();
        head += 1;
        let base: Vec<i64> = p.iter().map(|c| c.floor() as i64).collect();
        let mut off = vec![-1i64; dim];
        loop {
            let key: Vec<i64> = base.iter().zip(&off).map(|(b, o)| b + o).collect();
            let pts = proc.cell(&key).to_vec();
            for (i, q) in pts.chunks_exact(dim).enumerate() {
                if dist2(&p, q) <= 1.0 && seen.insert((key.clone(), i)) {
                    members.push(q.to_vec());
                    if members.len() > cap {
                        return Err(Error::CapExceeded {
                            what: "origin cluster (intensity may be supercritical)",
                            size: members.len(),
                            cap,
                        });
                    }
                }
            }
            let mut k = 0;
            while k < dim && off[k] == 1 {
                off[k] = -1;
                k += 1;
            }
            if k == dim {
                break;
            }
            off[k] += 1;
        }
    }
    PointSet::from_points(dim, &members)
}

/// Mean of `ζ(C_o) / |C_o|` over independent origin clusters.
pub fn estimate_rho_cluster(
    f: &FunctionalDescriptor,
    lambda: f64,
    reps: usize,
    seed: u64,
    cluster_cap: usize,
) -> Result<EstimatorReport> {
    if f.c1 != 0.0 {
        return Err(Error::Precondition(format!("cluster estimator needs c1 = 0, {} declares {}", f.name, f.c1)));
    }
    if reps == 0 {
        return Err(Error::Precondition("reps must be positive".into()));
    }
    let start = Instant::now();
    let (vals, failed) = replicate(reps, seed, |rs| {
        let c = origin_cluster(lambda, f.dim, rs, cluster_cap)?;
        Ok(f.evaluate(&c)? / c.len() as f64)
    })?;
    let params = EstimatorParams { functional: f.name.clone(), dim: f.dim, lambda: Some(lambda), ..Default::default() };
    Ok(report(vals, failed, params, seed, false, start))
}
