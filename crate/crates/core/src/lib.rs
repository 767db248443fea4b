//! Exact laboratory for bilateral network creation games.
//!
//! Agents are the nodes of a complete weighted host graph. An edge exists only
//! when both endpoints agree to it, and each endpoint pays `α·w(u,v)` for it.
//! Costs are exact rationals. The `stability` checkers decide PS, BNE and BSE
//! with replayable witnesses; the rest of the crate is built on them.

pub mod constructions;
pub mod cost;
pub mod distance;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod host;
pub mod io;
pub mod kernel;
pub mod network;
pub mod optimum;
pub mod scalar;
pub mod stability;

pub use cost::{agent_cost, cost_report, social_cost, star_social_cost, total_weight, CostBreakdown};
pub use distance::{shortest_distances, shortest_path_tree, spanner_stretch, DistanceMatrix};
pub use error::Error;
pub use host::{is_metric, metric_closure, HostGraph, Instance, MetricReport, MetricStatus, MetricViolation};
pub use kernel::Arithmetic;
pub use network::{edge, Edge, Network, NetworkFile};
pub use scalar::{parse_rational, Delta, Scalar};
pub use stability::{
    apply_move, best_single_removal, check, guided_bse_candidates, is_bne, is_bse, is_pairwise_stable, replay,
    Budget, CheckOptions, Concept, Move, Selection, Verdict, Witness,
};
