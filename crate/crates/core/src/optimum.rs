//! Social optimum: exhaustive search for small hosts, local search otherwise.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::social_cost;
use crate::distance::spanner_stretch;
use crate::error::Error;
use crate::host::Instance;
use crate::kernel::{Adj, CostModel, CostValue};
use crate::network::{all_pairs, Edge, Network, NetworkFile};
use crate::scalar::Scalar;

/// Default node limit for [`brute_force_opt`].
pub const OPT_NODE_LIMIT: usize = 7;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptResult {
    pub network: Network,
    pub cost: Scalar,
    /// Found by exhaustive enumeration; otherwise only an upper bound.
    pub proven: bool,
}

/// `a < b` in lexicographic order of the edge lists encoded by two masks.
fn mask_lex_cmp(a: u64, b: u64) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let bit = (a ^ b).trailing_zeros();
    let above = if bit == 63 { 0 } else { !0u64 << (bit + 1) };
    let (with, without) = if a >> bit & 1 == 1 { (a, b) } else { (b, a) };
    // the list holding the first difference is smaller, unless the other list
    // has already ended there
    let with_smaller = without & above != 0;
    if (a == with) == with_smaller {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Exhaustive minimum over all connected subgraphs, ties broken by the
/// lexicographically smallest edge list.
pub fn brute_force_opt(inst: &Instance, node_limit: usize) -> Result<OptResult, Error> {
    let n = inst.n();
    if n > node_limit || n > 11 {
        return Err(Error::TooLarge { n, limit: node_limit.min(11) });
    }
    let model = CostModel::exact(inst)?;
    let pairs = all_pairs(n);
    let m = pairs.len();
    let best = (0u64..1u64 << m)
        .into_par_iter()
        .filter(|mask| mask.count_ones() as usize + 1 >= n)
        .filter_map(|mask| {
            let adj = Adj::from_mask(n, &pairs, mask);
            if !adj.is_connected() {
                return None;
            }
            Some((model.social_cost(&adj), mask))
        })
        .reduce_with(|a, b| match a.0.cmp(&b.0).then_with(|| mask_lex_cmp(a.1, b.1)) {
            Ordering::Greater => b,
            _ => a,
        })
        .expect("the complete network is connected");
    let network = Network::from_mask(n, best.1);
    let cost = social_cost(inst, &network);
    Ok(OptResult { network, cost, proven: true })
}

/// Prim's algorithm on the host, ties by smaller node index.
fn minimum_spanning_tree(inst: &Instance) -> Network {
    let n = inst.n();
    let h = &inst.host;
    let mut in_tree = vec![false; n];
    in_tree[0] = true;
    let mut edges = Vec::with_capacity(n - 1);
    for _ in 1..n {
        let mut best: Option<(usize, usize)> = None;
        for u in (0..n).filter(|&u| in_tree[u]) {
            for v in (0..n).filter(|&v| !in_tree[v]) {
                let better = match best {
                    None => true,
                    Some((a, b)) => h.weight(u, v) < h.weight(a, b),
                };
                if better {
                    best = Some((u, v));
                }
            }
        }
        let (u, v) = best.unwrap();
        in_tree[v] = true;
        edges.push((u, v));
    }
    Network::new(n, edges).expect("tree edges are valid")
}

struct Search<'a, T> {
    model: &'a CostModel<T>,
    pairs: Vec<Edge>,
    swaps: bool,
}

impl<T: CostValue> Search<'_, T> {
    fn cost(&self, a: &Adj) -> T {
        self.model.social_cost(a)
    }

    /// First-improvement descent over drops, additions and swaps, scanning
    /// pairs in `order`.
    fn descend(&self, start: Adj, order: &[usize]) -> Adj {
        let mut cur = start;
        let mut cur_cost = self.cost(&cur);
        'restart: loop {
            for &i in order {
                let (u, v) = self.pairs[i];
                let mut a = cur;
                a.toggle(u, v);
                let c = self.cost(&a);
                if c < cur_cost {
                    cur = a;
                    cur_cost = c;
                    continue 'restart;
                }
            }
            if self.swaps {
                for &i in order.iter().filter(|&&i| cur.has(self.pairs[i].0, self.pairs[i].1)) {
                    for &j in order.iter().filter(|&&j| !cur.has(self.pairs[j].0, self.pairs[j].1)) {
                        let mut a = cur;
                        a.toggle(self.pairs[i].0, self.pairs[i].1);
                        a.toggle(self.pairs[j].0, self.pairs[j].1);
                        let c = self.cost(&a);
                        if c < cur_cost {
                            cur = a;
                            cur_cost = c;
                            continue 'restart;
                        }
                    }
                }
            }
            return cur;
        }
    }
}

fn heuristic_with<T: CostValue>(inst: &Instance, model: &CostModel<T>, seed: u64) -> Network {
    let n = inst.n();
    let pairs = all_pairs(n);
    let search = Search { model, swaps: n <= 24, pairs };
    let mst = Adj::from_network(&minimum_spanning_tree(inst));
    let star = (0..n)
        .map(|c| Adj::from_network(&Network::star(n, c)))
        .min_by(|a, b| search.cost(a).partial_cmp(&search.cost(b)).unwrap_or(Ordering::Equal))
        .unwrap();
    let natural: Vec<usize> = (0..search.pairs.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates = vec![mst, star, search.descend(mst, &natural), search.descend(star, &natural)];
    for _ in 0..3 {
        let mut order = natural.clone();
        order.shuffle(&mut rng);
        candidates.push(search.descend(mst, &order));
    }
    candidates
        .into_iter()
        .map(|a| a.to_network())
        .min_by(|a, b| {
            let (ca, cb) = (search.cost(&Adj::from_network(a)), search.cost(&Adj::from_network(b)));
            ca.partial_cmp(&cb).unwrap_or(Ordering::Equal).then_with(|| a.cmp(b))
        })
        .unwrap()
}

/// Upper bound on the optimum: the minimum spanning tree, the best star and
/// local search from both, plus three seeded restarts.
pub fn heuristic_opt(inst: &Instance) -> OptResult {
    heuristic_opt_seeded(inst, 0)
}

pub fn heuristic_opt_seeded(inst: &Instance, seed: u64) -> OptResult {
    let network = match CostModel::exact(inst) {
        Ok(model) => heuristic_with(inst, &model, seed),
        Err(_) => heuristic_with(inst, &CostModel::inexact(inst, 0.0), seed),
    };
    let cost = social_cost(inst, &network);
    OptResult { network, cost, proven: false }
}

/// Exhaustive when `n ≤ node_limit`, heuristic otherwise.
pub fn best_known_opt(inst: &Instance, node_limit: usize) -> Result<OptResult, Error> {
    if inst.n() <= node_limit {
        brute_force_opt(inst, node_limit)
    } else {
        Ok(heuristic_opt(inst))
    }
}

/// Stretch of a proven optimum. A proven optimum is always an
/// `(α+1)`-spanner, see [`within_spanner_bound`].
pub fn opt_spanner_check(inst: &Instance, opt: &OptResult) -> Result<Scalar, Error> {
    if !opt.proven {
        return Err(Error::NotProvenOptimal);
    }
    Ok(spanner_stretch(&opt.network, &inst.host))
}

/// `stretch ≤ α + 1`
pub fn within_spanner_bound(inst: &Instance, stretch: &Scalar) -> bool {
    *stretch <= &inst.alpha_scalar() + &Scalar::one()
}

/// Serialized form: the network plus cost and exactness flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptFile {
    pub edges: Vec<[usize; 2]>,
    pub cost: Scalar,
    pub proven: bool,
}

impl From<&OptResult> for OptFile {
    fn from(o: &OptResult) -> Self {
        OptFile { edges: NetworkFile::from(&o.network).edges, cost: o.cost.clone(), proven: o.proven }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::host::HostGraph;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn frac(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    fn unit(n: usize, alpha: BigRational) -> Instance {
        Instance::new(HostGraph::from_fn(n, |_, _| frac(1, 1)).unwrap(), alpha).unwrap()
    }

    #[test]
    fn mask_order_is_edge_list_order() {
        let n = 4;
        let mut masks: Vec<u64> = (0..1 << 6).collect();
        masks.sort_by(|&a, &b| mask_lex_cmp(a, b));
        let nets: Vec<Network> = masks.iter().map(|&m| Network::from_mask(n, m)).collect();
        assert!(nets.windows(2).all(|w| w[0].edges() < w[1].edges()));
    }

    #[test]
    fn triangle_optima() {
        let opt = brute_force_opt(&unit(3, frac(10, 1)), OPT_NODE_LIMIT).unwrap();
        assert_eq!(opt.cost, Scalar::from_int(48));
        assert_eq!(opt.network.edges(), &[(0, 1), (0, 2)]);
        assert!(opt.proven);
        let opt = brute_force_opt(&unit(3, frac(1, 10)), OPT_NODE_LIMIT).unwrap();
        assert_eq!(opt.cost, Scalar::ratio(33, 5));
        assert_eq!(opt.network, Network::complete(3));
    }

    #[test]
    fn too_large_and_unproven() {
        let inst = unit(8, frac(1, 1));
        assert!(matches!(brute_force_opt(&inst, 7), Err(Error::TooLarge { .. })));
        let h = heuristic_opt(&inst);
        assert!(!h.proven);
        assert_eq!(opt_spanner_check(&inst, &h), Err(Error::NotProvenOptimal));
    }

    #[test]
    fn heuristic_on_pair() {
        let h = heuristic_opt(&unit(2, frac(3, 1)));
        assert_eq!(h.network, Network::complete(2));
    }

    #[test]
    fn tiny_alpha_optimum_is_complete() {
        let inst = unit(4, frac(1, 100));
        let opt = brute_force_opt(&inst, OPT_NODE_LIMIT).unwrap();
        assert_eq!(opt.network, Network::complete(4));
        assert_eq!(opt_spanner_check(&inst, &opt).unwrap(), Scalar::one());
    }

    #[test]
    fn corrupted_opt_is_flagged() {
        let inst = unit(4, frac(1, 2));
        let path = Network::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let fake = OptResult { cost: social_cost(&inst, &path), network: path, proven: true };
        let s = opt_spanner_check(&inst, &fake).unwrap();
        assert_eq!(s, Scalar::from_int(3));
        assert!(!within_spanner_bound(&inst, &s));
    }
}
