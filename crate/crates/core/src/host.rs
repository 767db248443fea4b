//! Host graphs, instances and the triangle-inequality check.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::Error;
use crate::scalar::Scalar;

/// Adjacency is kept in `u64` bitsets, which caps the node count.
pub const MAX_NODES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricStatus {
    Unchecked,
    Metric,
    NonMetric,
}

/// Complete undirected host graph with exact non-negative weights.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HostGraph {
    n: usize,
    weights: Vec<BigRational>,
    metric: MetricStatus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricViolation {
    pub u: usize,
    pub z: usize,
    pub v: usize,
    /// `w(u,v) - w(u,z) - w(z,v) > 0`
    pub slack: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricReport {
    pub is_metric: bool,
    pub violation: Option<MetricViolation>,
}

impl HostGraph {
    /// Validates a weight matrix. The returned host has `MetricStatus::Unchecked`.
    pub fn new(weights: Vec<Vec<BigRational>>) -> Result<Self, Error> {
        let n = weights.len();
        for (row, r) in weights.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row, len: r.len(), n });
            }
        }
        if n < 2 {
            return Err(Error::TooSmall(n));
        }
        if n > MAX_NODES {
            return Err(Error::TooManyNodes { n, max: MAX_NODES });
        }
        for u in 0..n {
            for v in 0..n {
                let w = &weights[u][v];
                if u == v && !w.is_zero() {
                    return Err(Error::NonzeroDiagonal(u));
                }
                if w.is_negative() {
                    return Err(Error::NegativeWeight(u, v));
                }
                if v > u && weights[v][u] != *w {
                    return Err(Error::Asymmetric(u, v));
                }
            }
        }
        Ok(HostGraph {
            n,
            weights: weights.into_iter().flatten().collect(),
            metric: MetricStatus::Unchecked,
        })
    }

    /// Same as [`HostGraph::new`] for matrices of [`Scalar`]; infinite entries are rejected.
    pub fn from_scalars(weights: Vec<Vec<Scalar>>) -> Result<Self, Error> {
        let mut rows = Vec::with_capacity(weights.len());
        for (u, row) in weights.into_iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (v, s) in row.into_iter().enumerate() {
                match s {
                    Scalar::Finite(r) => out.push(r),
                    Scalar::Infinity => return Err(Error::InfiniteWeight(u, v)),
                }
            }
            rows.push(out);
        }
        Self::new(rows)
    }

    /// Builds a host from a weight function on pairs `u < v`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Result<Self, Error> {
        let mut rows = vec![vec![BigRational::zero(); n]; n];
        for u in 0..n {
            for v in (u + 1)..n {
                let w = f(u, v);
                rows[u][v] = w.clone();
                rows[v][u] = w;
            }
        }
        Self::new(rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, u: usize, v: usize) -> &BigRational {
        &self.weights[u * self.n + v]
    }

    pub fn weight_scalar(&self, u: usize, v: usize) -> Scalar {
        Scalar::Finite(self.weight(u, v).clone())
    }

    pub fn rows(&self) -> Vec<Vec<BigRational>> {
        self.weights.chunks(self.n).map(|c| c.to_vec()).collect()
    }

    pub fn metric_status(&self) -> MetricStatus {
        self.metric
    }

    /// Runs [`is_metric`] and records the outcome.
    pub fn check_metric(&mut self) -> MetricReport {
        let report = is_metric(self);
        self.metric = if report.is_metric {
            MetricStatus::Metric
        } else {
            MetricStatus::NonMetric
        };
        report
    }

    pub(crate) fn with_status(mut self, metric: MetricStatus) -> Self {
        self.metric = metric;
        self
    }

    /// Host restricted to `keep` (in the given order).
    pub fn induced(&self, keep: &[usize]) -> Result<Self, Error> {
        let rows = keep
            .iter()
            .map(|&u| keep.iter().map(|&v| self.weight(u, v).clone()).collect())
            .collect();
        let status = if self.metric == MetricStatus::Metric {
            MetricStatus::Metric
        } else {
            MetricStatus::Unchecked
        };
        Ok(Self::new(rows)?.with_status(status))
    }
}

/// Checks `w(u,v) <= w(u,z) + w(z,v)` over all ordered triples. The reported
/// violation is the lexicographically smallest `(u, z, v)`.
pub fn is_metric(host: &HostGraph) -> MetricReport {
    let n = host.n();
    for u in 0..n {
        for z in 0..n {
            for v in 0..n {
                let direct = host.weight(u, v);
                let detour = host.weight(u, z) + host.weight(z, v);
                if *direct > detour {
                    return MetricReport {
                        is_metric: false,
                        violation: Some(MetricViolation {
                            u,
                            z,
                            v,
                            slack: Scalar::Finite(direct - detour),
                        }),
                    };
                }
            }
        }
    }
    MetricReport { is_metric: true, violation: None }
}

/// Host whose weights are the shortest-path distances of a weighted seed graph
/// on `n` nodes. Zero distances between distinct nodes are allowed.
pub fn metric_closure(n: usize, seed: &[(usize, usize, BigRational)]) -> Result<HostGraph, Error> {
    if n < 2 {
        return Err(Error::TooSmall(n));
    }
    let mut dist: Vec<Vec<Option<BigRational>>> = vec![vec![None; n]; n];
    for (u, row) in dist.iter_mut().enumerate() {
        row[u] = Some(BigRational::zero());
    }
    for (u, v, w) in seed {
        let (u, v) = (*u, *v);
        if u >= n || v >= n || u == v {
            return Err(Error::InvalidEdge((u.min(v), u.max(v)), n));
        }
        if w.is_negative() {
            return Err(Error::NegativeWeight(u, v));
        }
        let better = dist[u][v].as_ref().is_none_or(|d| w < d);
        if better {
            dist[u][v] = Some(w.clone());
            dist[v][u] = Some(w.clone());
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(dik) = dist[i][k].clone() else { continue };
            for j in 0..n {
                if let Some(dkj) = &dist[k][j] {
                    let cand = &dik + dkj;
                    if dist[i][j].as_ref().is_none_or(|d| cand < *d) {
                        dist[i][j] = Some(cand);
                    }
                }
            }
        }
    }
    let mut rows = Vec::with_capacity(n);
    for row in dist {
        let mut out = Vec::with_capacity(n);
        for d in row {
            out.push(d.ok_or(Error::Disconnected)?);
        }
        rows.push(out);
    }
    Ok(HostGraph::new(rows)?.with_status(MetricStatus::Metric))
}

/// Host graph plus edge-price parameter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    pub host: HostGraph,
    pub alpha: BigRational,
}

impl Instance {
    pub fn new(host: HostGraph, alpha: BigRational) -> Result<Self, Error> {
        if !alpha.is_positive() {
            return Err(Error::InvalidAlpha);
        }
        Ok(Instance { host, alpha })
    }

    pub fn n(&self) -> usize {
        self.host.n()
    }

    pub fn alpha_scalar(&self) -> Scalar {
        Scalar::Finite(self.alpha.clone())
    }

    /// Metric status, computing it if the host is unchecked.
    pub fn is_metric(&self) -> bool {
        match self.host.metric_status() {
            MetricStatus::Metric => true,
            MetricStatus::NonMetric => false,
            MetricStatus::Unchecked => is_metric(&self.host).is_metric,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn matrix(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|row| row.iter().map(|&v| r(v)).collect()).collect()
    }

    #[test]
    fn validate_accepts_unit_triangle() {
        let h = HostGraph::new(matrix(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]])).unwrap();
        assert_eq!(h.n(), 3);
        assert_eq!(h.metric_status(), MetricStatus::Unchecked);
    }

    #[test]
    fn validate_errors() {
        let asym = matrix(&[&[0, 1, 1], &[2, 0, 1], &[1, 1, 0]]);
        assert_eq!(HostGraph::new(asym), Err(Error::Asymmetric(0, 1)));
        let neg = matrix(&[&[0, 1, -1], &[1, 0, 1], &[-1, 1, 0]]);
        assert_eq!(HostGraph::new(neg), Err(Error::NegativeWeight(0, 2)));
        let diag = matrix(&[&[0, 1], &[1, 5]]);
        assert_eq!(HostGraph::new(diag), Err(Error::NonzeroDiagonal(1)));
        assert_eq!(HostGraph::new(matrix(&[&[0]])), Err(Error::TooSmall(1)));
        let ragged = vec![vec![r(0), r(1)], vec![r(1)]];
        assert!(matches!(HostGraph::new(ragged), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn metric_check() {
        let unit = HostGraph::new(matrix(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]])).unwrap();
        assert!(is_metric(&unit).is_metric);

        let mut bad = HostGraph::new(matrix(&[&[0, 1, 3], &[1, 0, 1], &[3, 1, 0]])).unwrap();
        let rep = bad.check_metric();
        assert!(!rep.is_metric);
        let v = rep.violation.unwrap();
        assert_eq!((v.u, v.z, v.v), (0, 1, 2));
        assert_eq!(v.slack, Scalar::from_int(1));
        assert_eq!(bad.metric_status(), MetricStatus::NonMetric);
    }

    #[test]
    fn closure_of_path_and_star() {
        let h = metric_closure(3, &[(0, 1, r(1)), (1, 2, r(1))]).unwrap();
        assert_eq!(*h.weight(0, 2), r(2));
        assert!(is_metric(&h).is_metric);

        // center 0, leaf u=1 at 1, leaves 2,3 at 1/2
        let half = BigRational::new(1.into(), 2.into());
        let star = metric_closure(4, &[(0, 1, r(1)), (0, 2, half.clone()), (0, 3, half)]).unwrap();
        assert_eq!(*star.weight(1, 2), BigRational::new(3.into(), 2.into()));
        assert_eq!(*star.weight(1, 3), BigRational::new(3.into(), 2.into()));
        assert_eq!(*star.weight(2, 3), r(1));

        let single = metric_closure(2, &[(0, 1, r(7))]).unwrap();
        assert_eq!(*single.weight(0, 1), r(7));

        assert_eq!(metric_closure(3, &[(0, 1, r(1))]), Err(Error::Disconnected));
    }

    #[test]
    fn instance_rejects_nonpositive_alpha() {
        let h = HostGraph::new(matrix(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(Instance::new(h, r(0)).unwrap_err(), Error::InvalidAlpha);
    }
}
