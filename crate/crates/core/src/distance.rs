//! Exact shortest paths over networks, shortest-path trees and spanner stretch.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::Error;
use crate::host::HostGraph;
use crate::network::{edge, Network};
use crate::scalar::Scalar;

/// All-pairs shortest-path distances of a network; `Infinity` for unreachable pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<Scalar>,
    connected: bool,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> &Scalar {
        &self.d[u * self.n + v]
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// `d(u, V)`
    pub fn row_sum(&self, u: usize) -> Scalar {
        (0..self.n).map(|v| self.get(u, v).clone()).sum()
    }

    /// `Σ_u d(u, V)`
    pub fn total(&self) -> Scalar {
        (0..self.n).map(|u| self.row_sum(u)).sum()
    }
}

/// Exact Dijkstra from `source`. Returns distances and the settle order
/// (ties broken by node index).
pub(crate) fn single_source(
    host: &HostGraph,
    adj: &[u64],
    source: usize,
) -> (Vec<Option<BigRational>>, Vec<usize>) {
    let n = host.n();
    let mut dist: Vec<Option<BigRational>> = vec![None; n];
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    dist[source] = Some(BigRational::zero());
    loop {
        let mut best: Option<usize> = None;
        for v in 0..n {
            if done[v] {
                continue;
            }
            if let Some(dv) = &dist[v] {
                if best.is_none_or(|b| dv < dist[b].as_ref().unwrap()) {
                    best = Some(v);
                }
            }
        }
        let Some(u) = best else { break };
        done[u] = true;
        order.push(u);
        let du = dist[u].clone().unwrap();
        let mut nb = adj[u];
        while nb != 0 {
            let v = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            if done[v] {
                continue;
            }
            let cand = &du + host.weight(u, v);
            if dist[v].as_ref().is_none_or(|dv| cand < *dv) {
                dist[v] = Some(cand);
            }
        }
    }
    (dist, order)
}

pub fn shortest_distances(g: &Network, host: &HostGraph) -> DistanceMatrix {
    let n = host.n();
    assert_eq!(g.n(), n, "network and host disagree on node count");
    let adj = g.adjacency();
    let mut d = Vec::with_capacity(n * n);
    let mut connected = true;
    for s in 0..n {
        let (dist, _) = single_source(host, &adj, s);
        for x in dist {
            match x {
                Some(r) => d.push(Scalar::Finite(r)),
                None => {
                    connected = false;
                    d.push(Scalar::Infinity);
                }
            }
        }
    }
    DistanceMatrix { n, d, connected }
}

/// Shortest-path tree of `g` rooted at `root`. Each node's parent is the
/// smallest-index neighbor settled before it on some shortest path, which keeps
/// the result acyclic even with zero-weight edges.
pub fn shortest_path_tree(g: &Network, host: &HostGraph, root: usize) -> Result<Network, Error> {
    let adj = g.adjacency();
    let (dist, order) = single_source(host, &adj, root);
    if order.len() != host.n() {
        return Err(Error::Disconnected);
    }
    let mut rank = vec![0usize; host.n()];
    for (i, &u) in order.iter().enumerate() {
        rank[u] = i;
    }
    let mut edges = Vec::with_capacity(host.n() - 1);
    for &u in order.iter().skip(1) {
        let du = dist[u].as_ref().unwrap();
        let parent = g
            .neighbors(u)
            .into_iter()
            .filter(|&p| rank[p] < rank[u])
            .find(|&p| &(dist[p].as_ref().unwrap() + host.weight(p, u)) == du)
            .expect("settled node has a shortest-path predecessor");
        edges.push(edge(parent, u));
    }
    Network::new(host.n(), edges)
}

/// `max d_G(u,v) / d_H(u,v)` over pairs with `d_H > 0`. Pairs with `d_H = 0`
/// are skipped when `d_G = 0` and make the stretch infinite otherwise. A
/// network with no positive host distances has stretch 1.
pub fn spanner_stretch(g: &Network, host: &HostGraph) -> Scalar {
    let dg = shortest_distances(g, host);
    if !dg.is_connected() {
        return Scalar::Infinity;
    }
    let dh = shortest_distances(&Network::complete(host.n()), host);
    let mut worst = Scalar::one();
    for u in 0..host.n() {
        for v in (u + 1)..host.n() {
            let ratio = match dg.get(u, v).checked_div(dh.get(u, v)) {
                Some(r) => r,
                None => continue,
            };
            if ratio > worst {
                worst = ratio;
            }
        }
    }
    worst
}
