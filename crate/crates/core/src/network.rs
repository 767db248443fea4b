//! Networks: canonical edge sets over the host's nodes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::host::MAX_NODES;

/// Unordered node pair, always stored as `(min, max)`.
pub type Edge = (usize, usize);

pub fn edge(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Index of pair `u < v` in the lexicographic list `(0,1), (0,2), ..., (n-2,n-1)`.
pub fn pair_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < n);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

/// All host pairs in lexicographic order.
pub fn all_pairs(n: usize) -> Vec<Edge> {
    (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect()
}

/// A subgraph of the complete host, identified with a consistent strategy
/// profile. Edges are sorted and unique, so `==` and `Ord` are canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Network {
    n: usize,
    edges: Vec<Edge>,
}

impl Network {
    pub fn empty(n: usize) -> Self {
        Network { n, edges: Vec::new() }
    }

    pub fn complete(n: usize) -> Self {
        Network { n, edges: all_pairs(n) }
    }

    /// Normalizes, sorts and validates a list of pairs.
    pub fn new(n: usize, pairs: impl IntoIterator<Item = Edge>) -> Result<Self, Error> {
        if n > MAX_NODES {
            return Err(Error::TooManyNodes { n, max: MAX_NODES });
        }
        let mut edges = Vec::new();
        for (u, v) in pairs {
            if u == v || u >= n || v >= n {
                return Err(Error::InvalidEdge((u, v), n));
            }
            edges.push(edge(u, v));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0]));
        }
        Ok(Network { n, edges })
    }

    /// Network from a bitmask over [`all_pairs`].
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let edges = all_pairs(n)
            .into_iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| e)
            .collect();
        Network { n, edges }
    }

    /// Bitmask over [`all_pairs`]; only defined while the pair count fits in 64 bits.
    pub fn to_mask(&self) -> Option<u64> {
        if self.n * (self.n.saturating_sub(1)) / 2 > 64 {
            return None;
        }
        Some(
            self.edges
                .iter()
                .fold(0u64, |m, &(u, v)| m | 1u64 << pair_index(self.n, u, v)),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&edge(u, v)).is_ok()
    }

    pub fn neighbors(&self, u: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == u {
                    Some(b)
                } else if b == u {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn incident(&self, u: usize) -> Vec<Edge> {
        self.edges.iter().copied().filter(|&(a, b)| a == u || b == u).collect()
    }

    pub fn degree(&self, u: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == u || b == u).count()
    }

    /// Neighbor bitsets, one per node.
    pub fn adjacency(&self) -> Vec<u64> {
        let mut rows = vec![0u64; self.n];
        for &(u, v) in &self.edges {
            rows[u] |= 1 << v;
            rows[v] |= 1 << u;
        }
        rows
    }

    pub fn is_connected(&self) -> bool {
        crate::kernel::Adj::from_network(self).is_connected()
    }

    /// `self - removed + added`, without validation.
    pub fn with_changes(&self, removed: &[Edge], added: &[Edge]) -> Self {
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .copied()
            .filter(|e| !removed.contains(e))
            .collect();
        edges.extend(added.iter().map(|&(u, v)| edge(u, v)));
        edges.sort_unstable();
        edges.dedup();
        Network { n: self.n, edges }
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.n && self.is_connected()
    }

    /// Star centered at `center` over all nodes.
    pub fn star(n: usize, center: usize) -> Self {
        Network::new(n, (0..n).filter(|&v| v != center).map(|v| edge(center, v)))
            .expect("valid star")
    }
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (u, v)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{u}-{v}")?;
        }
        write!(f, "}}")
    }
}

/// Serialized form: `{ "edges": [[u, v], ...] }` with `u < v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkFile {
    pub edges: Vec<[usize; 2]>,
}

impl From<&Network> for NetworkFile {
    fn from(g: &Network) -> Self {
        NetworkFile { edges: g.edges.iter().map(|&(u, v)| [u, v]).collect() }
    }
}

impl NetworkFile {
    pub fn into_network(self, n: usize) -> Result<Network, Error> {
        Network::new(n, self.edges.into_iter().map(|[u, v]| (u, v)))
    }
}
