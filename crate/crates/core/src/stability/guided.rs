//! Coalition moves suggested by the distance-ratio argument for strong
//! equilibria on metric hosts.
//!
//! `v*` minimizes `D = Σ_u w(v*,u)`. Nodes close to `v*` form `N`, far nodes
//! form `R_far`, the rest `M`. Two moves are proposed: `N` builds an almost
//! complete k-ary tree, and the far part `M'` of `M` buys edges to the nodes
//! `N'` near the hub `z`. Every threshold of the form `c·√α·x` is compared
//! by squaring, so no square root is ever rounded.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::distance::{shortest_distances, DistanceMatrix};
use crate::error::Error;
use crate::host::Instance;
use crate::network::{edge, Edge, Network};
use crate::scalar::Scalar;

use super::{replay, Concept, Move};

/// Multipliers of `√α` in the move thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GuidedParams {
    /// Tree move fires when every `u ∈ N` has `d(u,N) > tree·√α·D`.
    pub tree: u32,
    /// `N'` holds nodes with `d(u,z) ≤ hub·√α·D/n`.
    pub hub: u32,
    /// `M'` holds nodes with `d(v,z) ≥ far·√α·w(v,v*)`.
    pub far: u32,
    /// When set, moves are only proposed if every agent has
    /// `d(u,V) ≥ gate·√α·D`.
    pub gate: Option<u32>,
}

impl Default for GuidedParams {
    fn default() -> Self {
        GuidedParams { tree: 13, hub: 52, far: 88, gate: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuidedPartition {
    pub v_star: usize,
    pub d_vstar: Scalar,
    pub near: Vec<usize>,
    pub middle: Vec<usize>,
    pub far: Vec<usize>,
    /// Node of `N` with the smallest `d(z,N)`; `None` if `G` is disconnected.
    pub hub: Option<usize>,
    pub near_hub: Vec<usize>,
    pub middle_far: Vec<usize>,
    /// Arity of the tree move, `⌊3n/√α⌋ - 1`.
    pub arity: usize,
}

/// Compares `x` with `√k` for `k ≥ 0`.
fn cmp_sqrt(x: &Scalar, k: &BigRational) -> Ordering {
    match x {
        Scalar::Infinity => Ordering::Greater,
        Scalar::Finite(x) => (x * x).cmp(k),
    }
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn set_distance(d: &DistanceMatrix, u: usize, set: &[usize]) -> Scalar {
    set.iter().map(|&v| d.get(u, v).clone()).sum()
}

fn build(inst: &Instance, params: &GuidedParams, d: &DistanceMatrix) -> Result<GuidedPartition, Error> {
    if !inst.is_metric() {
        return Err(Error::NotMetric);
    }
    if inst.alpha <= BigRational::one() {
        return Err(Error::AlphaTooSmall);
    }
    let n = inst.n();
    let h = &inst.host;
    let alpha = &inst.alpha;
    let sums: Vec<BigRational> = (0..n)
        .map(|u| (0..n).fold(BigRational::zero(), |acc, v| acc + h.weight(u, v)))
        .collect();
    let v_star = (0..n).min_by(|&a, &b| sums[a].cmp(&sums[b]).then(a.cmp(&b))).unwrap();
    let dd = sums[v_star].clone();
    let nn = int(n as u64);
    let two = int(2);

    let mut near = Vec::new();
    let mut middle = Vec::new();
    let mut far = Vec::new();
    for u in 0..n {
        let w = h.weight(u, v_star);
        if w * &nn <= &two * &dd {
            near.push(u);
        } else if w * w * alpha > int(4) * &dd * &dd {
            far.push(u);
        } else {
            middle.push(u);
        }
    }

    let hub = if d.is_connected() {
        near.iter()
            .copied()
            .min_by(|&a, &b| set_distance(d, a, &near).cmp(&set_distance(d, b, &near)).then(a.cmp(&b)))
    } else {
        None
    };
    let d2 = &dd * &dd;
    let (near_hub, middle_far) = match hub {
        None => (Vec::new(), Vec::new()),
        Some(z) => {
            let hub_k = int(params.hub as u64 * params.hub as u64) * alpha * &d2;
            let far_c = int(params.far as u64 * params.far as u64) * alpha;
            let nh = near
                .iter()
                .copied()
                .filter(|&u| cmp_sqrt(&(d.get(u, z) * &Scalar::Finite(nn.clone())), &hub_k) != Ordering::Greater)
                .collect();
            let mf = middle
                .iter()
                .copied()
                .filter(|&v| {
                    let w = h.weight(v, v_star);
                    cmp_sqrt(d.get(v, z), &(&far_c * w * w)) != Ordering::Less
                })
                .collect();
            (nh, mf)
        }
    };

    let t = Scalar::Finite(int(9) * &nn * &nn / alpha).floor_sqrt().unwrap_or_default();
    let arity = t.to_usize().unwrap_or(usize::MAX).saturating_sub(1);

    Ok(GuidedPartition {
        v_star,
        d_vstar: Scalar::Finite(dd),
        near,
        middle,
        far,
        hub,
        near_hub,
        middle_far,
        arity,
    })
}

/// The partition that drives [`guided_bse_candidates`].
pub fn guided_partition(inst: &Instance, g: &Network, params: &GuidedParams) -> Result<GuidedPartition, Error> {
    build(inst, params, &shortest_distances(g, &inst.host))
}

/// Edges of an almost complete `k`-ary tree over `nodes` in heap layout.
fn heap_tree(nodes: &[usize], k: usize) -> Vec<Edge> {
    (1..nodes.len()).map(|i| edge(nodes[(i - 1) / k], nodes[i])).collect()
}

fn coalition_move(g: &Network, adds: impl IntoIterator<Item = Edge>) -> Option<Move> {
    let add: Vec<Edge> = adds.into_iter().filter(|&(u, v)| !g.contains(u, v)).collect();
    if add.is_empty() {
        return None;
    }
    let coalition: Vec<usize> = add.iter().flat_map(|&(u, v)| [u, v]).collect();
    Some(Move::new(Concept::Bse, coalition, [], add))
}

/// Proposes the tree move and the matching move, keeping only those that
/// strictly improve every coalition member on exact replay.
pub fn guided_bse_candidates(inst: &Instance, g: &Network, params: &GuidedParams) -> Result<Vec<Move>, Error> {
    let d = shortest_distances(g, &inst.host);
    let p = build(inst, params, &d)?;
    let alpha = &inst.alpha;
    let dd = p.d_vstar.as_rational().cloned().unwrap_or_default();
    let d2 = &dd * &dd;
    let n = inst.n();

    if let Some(gate) = params.gate {
        let k = int(gate as u64 * gate as u64) * alpha * &d2;
        if (0..n).any(|u| cmp_sqrt(&d.row_sum(u), &k) == Ordering::Less) {
            return Ok(Vec::new());
        }
    }

    let mut out = Vec::new();
    let tree_k = int(params.tree as u64 * params.tree as u64) * alpha * &d2;
    let spread = p
        .near
        .iter()
        .all(|&u| cmp_sqrt(&set_distance(&d, u, &p.near), &tree_k) == Ordering::Greater);
    if spread && p.arity >= 1 && p.near.len() >= 2 {
        out.extend(coalition_move(g, heap_tree(&p.near, p.arity)));
    }

    if let Some(z) = p.hub {
        let mut targets = p.near_hub.clone();
        targets.sort_by(|&a, &b| d.get(a, z).cmp(d.get(b, z)).then(a.cmp(&b)));
        let pairs = p
            .middle_far
            .iter()
            .zip((0..).map(|i| i / 2))
            .filter_map(|(&v, j)| targets.get(j).map(|&u| edge(u, v)));
        out.extend(coalition_move(g, pairs));
    }

    let mut kept = Vec::new();
    for m in out {
        if replay(inst, g, &m)?.improving {
            kept.push(m);
        }
    }
    Ok(kept)
}
