//! Fast cost evaluation for the enumerating checkers.
//!
//! In exact mode every weight is multiplied by the common denominator `L` of
//! the host weights and `α = p/q` is kept as a fraction, so
//! `q·L·cost(u) = p·w'(u,S_u) + q·d'(u,V)` is an integer. Comparisons between
//! scaled costs are therefore exact and need no tolerance. Inexact mode runs the
//! same code on `f64` with a comparison margin.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::host::{Instance, MAX_NODES};
use crate::network::{all_pairs, pair_index, Network};

/// Arithmetic used by the checkers. Exact is authoritative; inexact is for
/// large exploratory sweeps only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    #[default]
    Exact,
    Inexact { tolerance: f64 },
}

pub trait CostValue: Copy + PartialOrd + Send + Sync + Debug + 'static {
    const ZERO: Self;
    const INF: Self;
    fn plus(self, o: Self) -> Self;
    fn times(self, o: Self) -> Self;
    fn is_inf(self) -> bool;
    /// `old - new`, infinite when `old` is.
    fn gain(old: Self, new: Self) -> Self;
    fn saturating_plus(self, o: Self) -> Self;
}

impl CostValue for i128 {
    const ZERO: Self = 0;
    const INF: Self = i128::MAX;
    fn plus(self, o: Self) -> Self {
        self + o
    }
    fn times(self, o: Self) -> Self {
        self * o
    }
    fn is_inf(self) -> bool {
        self == i128::MAX
    }
    fn gain(old: Self, new: Self) -> Self {
        if old.is_inf() {
            i128::MAX
        } else {
            old - new
        }
    }
    fn saturating_plus(self, o: Self) -> Self {
        self.saturating_add(o)
    }
}

impl CostValue for f64 {
    const ZERO: Self = 0.0;
    const INF: Self = f64::INFINITY;
    fn plus(self, o: Self) -> Self {
        self + o
    }
    fn times(self, o: Self) -> Self {
        self * o
    }
    fn is_inf(self) -> bool {
        self.is_infinite()
    }
    fn gain(old: Self, new: Self) -> Self {
        old - new
    }
    fn saturating_plus(self, o: Self) -> Self {
        self + o
    }
}

/// Neighbor bitsets for up to [`MAX_NODES`] nodes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Adj {
    n: usize,
    rows: [u64; MAX_NODES],
}

impl Adj {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_NODES);
        Adj { n, rows: [0; MAX_NODES] }
    }

    pub fn from_network(g: &Network) -> Self {
        let mut a = Adj::empty(g.n());
        for &(u, v) in g.edges() {
            a.set(u, v, true);
        }
        a
    }

    pub fn from_mask(n: usize, pairs: &[(usize, usize)], mask: u64) -> Self {
        let mut a = Adj::empty(n);
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            let (u, v) = pairs[i];
            a.set(u, v, true);
        }
        a
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, u: usize) -> u64 {
        self.rows[u]
    }

    #[inline]
    pub fn has(&self, u: usize, v: usize) -> bool {
        self.rows[u] >> v & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, on: bool) {
        if on {
            self.rows[u] |= 1 << v;
            self.rows[v] |= 1 << u;
        } else {
            self.rows[u] &= !(1 << v);
            self.rows[v] &= !(1 << u);
        }
    }

    #[inline]
    pub fn toggle(&mut self, u: usize, v: usize) {
        self.rows[u] ^= 1 << v;
        self.rows[v] ^= 1 << u;
    }

    pub fn all_nodes(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let all = self.all_nodes();
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                let u = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.rows[u];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen & all == all
    }

    /// Edge bitmask over `all_pairs(n)`; requires at most 64 pairs.
    pub fn mask(&self) -> u64 {
        let mut m = 0u64;
        for u in 0..self.n {
            let mut r = self.rows[u] >> (u + 1);
            while r != 0 {
                let v = u + 1 + r.trailing_zeros() as usize;
                r &= r - 1;
                m |= 1 << pair_index(self.n, u, v);
            }
        }
        m
    }

    pub fn to_network(&self) -> Network {
        let edges = (0..self.n)
            .flat_map(|u| ((u + 1)..self.n).filter(move |&v| self.has(u, v)).map(move |v| (u, v)));
        Network::new(self.n, edges).expect("adjacency is a valid network")
    }
}

/// Instance converted to the checker number type.
#[derive(Clone, Debug)]
pub struct CostModel<T> {
    n: usize,
    w: Vec<T>,
    alpha_num: T,
    alpha_den: T,
    eps: T,
}

impl CostModel<i128> {
    pub fn exact(inst: &Instance) -> Result<Self, Error> {
        let n = inst.n();
        let mut lcm = BigInt::one();
        for u in 0..n {
            for v in 0..n {
                lcm = lcm.lcm(inst.host.weight(u, v).denom());
            }
        }
        let scaled: Vec<BigInt> = (0..n * n)
            .map(|i| {
                let w: BigRational = inst.host.weight(i / n, i % n) * BigRational::from_integer(lcm.clone());
                w.to_integer()
            })
            .collect();
        let p = inst.alpha.numer().clone();
        let q = inst.alpha.denom().clone();
        let max_w = scaled.iter().max().cloned().unwrap_or_default();
        let nn = BigInt::from(n as u64);
        // any sum of n agent costs, or of n gains, stays below this bound
        let bound = &max_w * &nn * &nn * (&p + &q * &nn) * 4;
        let limit = BigInt::one() << 120;
        if bound >= limit || p >= limit || q >= limit {
            return Err(Error::ExactOverflow);
        }
        let to = |b: &BigInt| b.to_i128().ok_or(Error::ExactOverflow);
        Ok(CostModel {
            n,
            w: scaled.iter().map(to).collect::<Result<_, _>>()?,
            alpha_num: to(&p)?,
            alpha_den: to(&q)?,
            eps: 0,
        })
    }
}

impl CostModel<f64> {
    pub fn inexact(inst: &Instance, tolerance: f64) -> Self {
        let n = inst.n();
        CostModel {
            n,
            w: (0..n * n)
                .map(|i| inst.host.weight(i / n, i % n).to_f64().unwrap_or(f64::INFINITY))
                .collect(),
            alpha_num: inst.alpha.to_f64().unwrap_or(f64::INFINITY),
            alpha_den: 1.0,
            eps: tolerance.abs(),
        }
    }
}

impl<T: CostValue> CostModel<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, u: usize, v: usize) -> T {
        self.w[u * self.n + v]
    }

    /// `new` is strictly below `old` by more than the comparison margin.
    #[inline]
    pub fn improves(&self, new: T, old: T) -> bool {
        !new.is_inf() && new.plus(self.eps) < old
    }

    /// Scaled `d(s, V)`, infinite if some node is unreachable.
    pub fn distance_sum(&self, adj: &Adj, s: usize) -> T {
        let n = self.n;
        let mut dist = [T::INF; MAX_NODES];
        dist[s] = T::ZERO;
        let mut open = adj.all_nodes();
        let mut sum = T::ZERO;
        for _ in 0..n {
            let mut best = usize::MAX;
            let mut bd = T::INF;
            let mut c = open;
            while c != 0 {
                let v = c.trailing_zeros() as usize;
                c &= c - 1;
                if dist[v] < bd {
                    bd = dist[v];
                    best = v;
                }
            }
            if best == usize::MAX {
                return T::INF;
            }
            open &= !(1u64 << best);
            sum = sum.plus(bd);
            let mut nb = adj.row(best) & open;
            while nb != 0 {
                let v = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                let nd = bd.plus(self.w[best * n + v]);
                if nd < dist[v] {
                    dist[v] = nd;
                }
            }
        }
        sum
    }

    #[inline]
    pub fn edge_sum(&self, adj: &Adj, u: usize) -> T {
        let mut s = T::ZERO;
        let mut nb = adj.row(u);
        while nb != 0 {
            let v = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            s = s.plus(self.w[u * self.n + v]);
        }
        s
    }

    /// Scaled `cost(u, G)`.
    pub fn agent_cost(&self, adj: &Adj, u: usize) -> T {
        let d = self.distance_sum(adj, u);
        if d.is_inf() {
            return T::INF;
        }
        self.alpha_num
            .times(self.edge_sum(adj, u))
            .plus(self.alpha_den.times(d))
    }

    pub fn social_cost(&self, adj: &Adj) -> T {
        if !adj.is_connected() {
            return T::INF;
        }
        (0..self.n).fold(T::ZERO, |acc, u| acc.plus(self.agent_cost(adj, u)))
    }
}

/// Source of scaled agent costs.
pub trait CostOracle<T: CostValue>: Sync {
    fn model(&self) -> &CostModel<T>;
    fn cost(&self, adj: &Adj, u: usize) -> T;
}

impl<T: CostValue> CostOracle<T> for CostModel<T> {
    fn model(&self) -> &CostModel<T> {
        self
    }
    fn cost(&self, adj: &Adj, u: usize) -> T {
        self.agent_cost(adj, u)
    }
}

/// Agent costs of every subgraph, memoized by edge mask.
pub struct CostTable<T> {
    model: CostModel<T>,
    costs: Vec<T>,
}

/// Largest node count for which [`CostTable`] is built.
pub const TABLE_MAX_NODES: usize = 6;

impl<T: CostValue> CostTable<T> {
    pub fn build(model: CostModel<T>) -> Self {
        use rayon::prelude::*;
        let n = model.n();
        assert!(n <= TABLE_MAX_NODES);
        let pairs = all_pairs(n);
        let count = 1usize << pairs.len();
        let costs: Vec<T> = (0..count)
            .into_par_iter()
            .flat_map_iter(|mask| {
                let adj = Adj::from_mask(n, &pairs, mask as u64);
                let row: Vec<T> = (0..n).map(|u| model.agent_cost(&adj, u)).collect();
                row
            })
            .collect();
        CostTable { model, costs }
    }
}

impl<T: CostValue> CostOracle<T> for CostTable<T> {
    fn model(&self) -> &CostModel<T> {
        &self.model
    }
    fn cost(&self, adj: &Adj, u: usize) -> T {
        self.costs[adj.mask() as usize * self.model.n() + u]
    }
}
