use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::host::{metric_closure, HostGraph, Instance};
use crate::network::{all_pairs, Network};
use crate::scalar::Scalar;

/// Weight distributions for random hosts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum RandomModel {
    /// Independent weights `lo + (hi - lo)·k/1000` for uniform `k ∈ 0..=1000`.
    /// Not metric in general.
    Uniform { lo: Scalar, hi: Scalar },
    /// Points on the integer grid `[0, size]²` with L1 distances.
    EuclideanPlane { size: u32 },
    /// Closure of a random tree with integer edge weights in `1..=max_weight`.
    TreeMetric { max_weight: u32 },
}

impl Default for RandomModel {
    fn default() -> Self {
        RandomModel::Uniform { lo: Scalar::from_int(1), hi: Scalar::from_int(10) }
    }
}

impl RandomModel {
    pub fn is_metric(&self) -> bool {
        !matches!(self, RandomModel::Uniform { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            RandomModel::Uniform { .. } => "uniform",
            RandomModel::EuclideanPlane { .. } => "euclidean_plane",
            RandomModel::TreeMetric { .. } => "tree_metric",
        }
    }
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Deterministic in `(n, model, alpha, seed)`.
pub fn random_instance(n: usize, model: &RandomModel, alpha: &BigRational, seed: u64) -> Result<Instance, Error> {
    if n < 2 {
        return Err(Error::TooSmall(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let host = match model {
        RandomModel::Uniform { lo, hi } => {
            let (lo, hi) = match (lo.as_rational(), hi.as_rational()) {
                (Some(lo), Some(hi)) if lo <= hi => (lo.clone(), hi.clone()),
                _ => return Err(Error::Config("uniform model needs finite lo <= hi".into())),
            };
            let span = &hi - &lo;
            let mut weights = vec![vec![int(0); n]; n];
            for (u, v) in all_pairs(n) {
                let k: i64 = rng.gen_range(0..=1000);
                let w = &lo + &span * BigRational::new(k.into(), 1000.into());
                weights[u][v] = w.clone();
                weights[v][u] = w;
            }
            let mut h = HostGraph::new(weights)?;
            h.check_metric();
            h
        }
        RandomModel::EuclideanPlane { size } => {
            let pts: Vec<(i64, i64)> = (0..n)
                .map(|_| (rng.gen_range(0..=*size as i64), rng.gen_range(0..=*size as i64)))
                .collect();
            let mut h = HostGraph::from_fn(n, |u, v| {
                int((pts[u].0 - pts[v].0).abs() + (pts[u].1 - pts[v].1).abs())
            })?;
            h.check_metric();
            h
        }
        RandomModel::TreeMetric { max_weight } => {
            let seed_edges: Vec<_> = (1..n)
                .map(|v| {
                    let parent = rng.gen_range(0..v);
                    (parent, v, int(rng.gen_range(1..=(*max_weight).max(1) as i64)))
                })
                .collect();
            metric_closure(n, &seed_edges)?
        }
    };
    Instance::new(host, alpha.clone())
}

/// Random network in which each pair is present with probability `p`.
pub fn random_network(n: usize, p: f64, rng: &mut impl Rng) -> Network {
    let edges: Vec<_> = all_pairs(n).into_iter().filter(|_| rng.gen_bool(p)).collect();
    Network::new(n, edges).expect("pairs are valid")
}

/// Uniform random spanning tree shape: node `v` attaches to a random earlier node
/// of a shuffled order.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> Network {
    use rand::seq::SliceRandom;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let edges: Vec<_> = (1..n).map(|i| (order[rng.gen_range(0..i)], order[i])).collect();
    Network::new(n, edges).expect("tree edges are valid")
}

/// Random connected network: a random tree plus extra edges with probability `p`.
pub fn random_connected_network(n: usize, p: f64, rng: &mut impl Rng) -> Network {
    let tree = random_tree(n, rng);
    let extra: Vec<_> = all_pairs(n)
        .into_iter()
        .filter(|&(u, v)| !tree.contains(u, v) && rng.gen_bool(p))
        .collect();
    tree.with_changes(&[], &extra)
}
