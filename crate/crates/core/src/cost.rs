//! The bilateral cost function, evaluated exactly.
//!
//! Agent `u` pays `α·w(u,v)` for every incident edge `{u,v}` (both endpoints
//! pay) plus its distance cost `d_G(u,V)`. This is the reference route; the
//! checkers use the scaled kernel in [`crate::kernel`] and are tested against it.

use num_rational::BigRational;
use num_traits::Zero;

use crate::distance::{shortest_distances, single_source};
use crate::host::{HostGraph, Instance};
use crate::network::Network;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostBreakdown {
    pub edge_cost: Vec<Scalar>,
    pub distance_cost: Vec<Scalar>,
    pub total: Vec<Scalar>,
    pub social: Scalar,
}

impl CostBreakdown {
    pub fn agent(&self, u: usize) -> &Scalar {
        &self.total[u]
    }

    pub fn total_edge_cost(&self) -> Scalar {
        self.edge_cost.iter().cloned().sum()
    }

    pub fn total_distance_cost(&self) -> Scalar {
        self.distance_cost.iter().cloned().sum()
    }
}

/// `w(E)`
pub fn total_weight(g: &Network, host: &HostGraph) -> BigRational {
    g.edges().iter().fold(BigRational::zero(), |acc, &(u, v)| acc + host.weight(u, v))
}

fn edge_cost_of(inst: &Instance, g: &Network, u: usize) -> BigRational {
    let w = g
        .neighbors(u)
        .into_iter()
        .fold(BigRational::zero(), |acc, v| acc + inst.host.weight(u, v));
    &inst.alpha * w
}

pub fn cost_report(inst: &Instance, g: &Network) -> CostBreakdown {
    let d = shortest_distances(g, &inst.host);
    let n = inst.n();
    let edge_cost: Vec<Scalar> = (0..n).map(|u| Scalar::Finite(edge_cost_of(inst, g, u))).collect();
    let distance_cost: Vec<Scalar> = (0..n).map(|u| d.row_sum(u)).collect();
    let total: Vec<Scalar> = edge_cost.iter().zip(&distance_cost).map(|(e, d)| e + d).collect();
    let social = total.iter().cloned().sum();
    CostBreakdown { edge_cost, distance_cost, total, social }
}

/// `cost(u, G)` via a single exact Dijkstra.
pub fn agent_cost(inst: &Instance, g: &Network, u: usize) -> Scalar {
    let (dist, _) = single_source(&inst.host, &g.adjacency(), u);
    let mut dsum = BigRational::zero();
    for d in dist {
        match d {
            Some(x) => dsum += x,
            None => return Scalar::Infinity,
        }
    }
    Scalar::Finite(edge_cost_of(inst, g, u) + dsum)
}

/// Social cost `2α·w(E) + Σ_u d(u,V)`.
pub fn social_cost(inst: &Instance, g: &Network) -> Scalar {
    cost_report(inst, g).social
}

/// Closed form for the social cost of a spanning star: `(2n - 2 + 2α)·w(E)`.
pub fn star_social_cost(n: usize, alpha: &Scalar, total_weight: &Scalar) -> Scalar {
    assert!(n >= 2, "a star needs at least two nodes");
    let factor = &Scalar::from_int(2 * n as i64 - 2) + &(&Scalar::from_int(2) * alpha);
    &factor * total_weight
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn unit_instance(n: usize, alpha: i64) -> Instance {
        Instance::new(HostGraph::from_fn(n, |_, _| r(1)).unwrap(), r(alpha)).unwrap()
    }

    #[test]
    fn single_edge() {
        let inst = Instance::new(HostGraph::from_fn(2, |_, _| r(5)).unwrap(), r(3)).unwrap();
        let rep = cost_report(&inst, &Network::complete(2));
        assert_eq!(rep.total, vec![Scalar::from_int(20), Scalar::from_int(20)]);
        assert_eq!(rep.social, Scalar::from_int(40));
    }

    #[test]
    fn star_matches_closed_form() {
        let inst = unit_instance(3, 2);
        let star = Network::star(3, 0);
        let rep = cost_report(&inst, &star);
        assert_eq!(rep.total[0], Scalar::from_int(6));
        assert_eq!(rep.total[1], Scalar::from_int(5));
        assert_eq!(rep.total[2], Scalar::from_int(5));
        assert_eq!(rep.social, Scalar::from_int(16));
        assert_eq!(
            star_social_cost(3, &Scalar::from_int(2), &Scalar::from_int(2)),
            Scalar::from_int(16)
        );
    }

    #[test]
    fn star_formula_values() {
        assert_eq!(
            star_social_cost(4, &Scalar::from_int(2), &Scalar::from_int(3)),
            Scalar::from_int(30)
        );
        assert_eq!(star_social_cost(4, &Scalar::from_int(2), &Scalar::zero()), Scalar::zero());
    }

    #[test]
    fn disconnected_is_infinite() {
        let inst = unit_instance(3, 1);
        let g = Network::new(3, [(0, 1)]).unwrap();
        assert_eq!(cost_report(&inst, &g).social, Scalar::Infinity);
        assert_eq!(agent_cost(&inst, &g, 0), Scalar::Infinity);
    }

    #[test]
    fn agent_cost_agrees_with_report() {
        let inst = unit_instance(4, 3);
        let g = Network::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let rep = cost_report(&inst, &g);
        for u in 0..4 {
            assert_eq!(agent_cost(&inst, &g, u), rep.total[u]);
        }
    }
}
