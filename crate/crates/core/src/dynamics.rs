//! Improving-response dynamics with exact cycle detection.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cost::social_cost;
use crate::error::Error;
use crate::host::Instance;
use crate::network::{Network, NetworkFile};
use crate::scalar::Scalar;
use crate::stability::{
    apply_move, check, guided_bse_candidates, replay, CheckOptions, Concept, GuidedParams, Selection, Verdict,
    Witness, WitnessFile,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// The first improving move in canonical order.
    #[default]
    FirstFound,
    /// The move with the largest total improvement over its coalition.
    BestResponse,
    /// Proof-guided coalition moves first, then canonical enumeration.
    GuidedFirst,
}

impl std::str::FromStr for Policy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "first-found" | "first" => Ok(Policy::FirstFound),
            "best-response" | "best" => Ok(Policy::BestResponse),
            "guided-first" | "guided" => Ok(Policy::GuidedFirst),
            _ => Err(Error::Parse(format!("unknown policy {s:?}"))),
        }
    }
}

/// An improving move for `g` under `policy`, or the checker's verdict when
/// there is none.
pub fn find_improving_move(
    inst: &Instance,
    g: &Network,
    concept: Concept,
    policy: Policy,
    opts: &CheckOptions,
) -> Result<Verdict, Error> {
    let selection = match policy {
        Policy::BestResponse => Selection::BestResponse,
        Policy::FirstFound | Policy::GuidedFirst => Selection::Canonical,
    };
    if policy == Policy::GuidedFirst && concept == Concept::Bse {
        match guided_bse_candidates(inst, g, &GuidedParams::default()) {
            Ok(moves) => {
                if let Some(mv) = moves.into_iter().next() {
                    let deltas = replay(inst, g, &mv)?.deltas;
                    return Ok(Verdict::Unstable(Witness { mv, deltas, canonical: false }));
                }
            }
            Err(Error::NotMetric | Error::AlphaTooSmall) => {}
            Err(e) => return Err(e),
        }
    }
    check(inst, g, concept, &CheckOptions { selection, ..*opts })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Equilibrium,
    /// The network after step `start + period` equals the one after step
    /// `start` (step 0 is the initial network).
    CycleDetected { period: usize, start: usize },
    BudgetExhausted { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub witness: Witness,
    pub social_cost: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub initial: Network,
    pub steps: Vec<TraceStep>,
    pub outcome: Outcome,
    pub last: Network,
}

pub fn run_dynamics(
    inst: &Instance,
    g0: &Network,
    concept: Concept,
    policy: Policy,
    max_steps: usize,
    opts: &CheckOptions,
) -> Result<Trace, Error> {
    let mut seen: HashMap<Network, usize> = HashMap::from([(g0.clone(), 0)]);
    let mut g = g0.clone();
    let mut steps = Vec::new();
    let outcome = loop {
        let w = match find_improving_move(inst, &g, concept, policy, opts)? {
            Verdict::Stable => break Outcome::Equilibrium,
            Verdict::Inconclusive { evaluated, frontier } => {
                break Outcome::BudgetExhausted {
                    reason: format!("checker budget exhausted after {evaluated} evaluations at {frontier}"),
                }
            }
            Verdict::Unstable(w) => w,
        };
        if steps.len() == max_steps {
            break Outcome::BudgetExhausted { reason: format!("stopped after {max_steps} steps") };
        }
        g = apply_move(&g, &w.mv)?;
        steps.push(TraceStep { social_cost: social_cost(inst, &g), witness: w });
        if let Some(&start) = seen.get(&g) {
            break Outcome::CycleDetected { period: steps.len() - start, start };
        }
        seen.insert(g.clone(), steps.len());
    };
    Ok(Trace { initial: g0.clone(), steps, outcome, last: g })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStepFile {
    #[serde(rename = "move")]
    pub mv: WitnessFile,
    pub social_cost: Scalar,
}

/// Trace file: initial network, moves with the social cost after each, and
/// the outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFile {
    pub initial: NetworkFile,
    pub initial_cost: Scalar,
    pub steps: Vec<TraceStepFile>,
    pub outcome: Outcome,
}

impl TraceFile {
    pub fn new(inst: &Instance, t: &Trace) -> Self {
        TraceFile {
            initial: NetworkFile::from(&t.initial),
            initial_cost: social_cost(inst, &t.initial),
            steps: t
                .steps
                .iter()
                .map(|s| TraceStepFile {
                    mv: WitnessFile::from(&s.witness),
                    social_cost: s.social_cost.clone(),
                })
                .collect(),
            outcome: t.outcome.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::host::HostGraph;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn unit(n: usize, alpha: i64) -> Instance {
        let one = BigRational::from_integer(BigInt::from(1));
        Instance::new(HostGraph::from_fn(n, |_, _| one.clone()).unwrap(), BigRational::from_integer(alpha.into()))
            .unwrap()
    }

    #[test]
    fn pair_converges_in_one_step() {
        let inst = unit(2, 1);
        for c in Concept::ALL {
            let t = run_dynamics(&inst, &Network::empty(2), c, Policy::FirstFound, 5, &CheckOptions::default())
                .unwrap();
            assert_eq!(t.outcome, Outcome::Equilibrium);
            assert_eq!(t.steps.len(), 1);
            assert_eq!(t.last, Network::complete(2));
        }
    }

    #[test]
    fn zero_steps_still_reports_equilibrium() {
        let inst = unit(2, 1);
        let t = run_dynamics(&inst, &Network::complete(2), Concept::Ps, Policy::FirstFound, 0, &CheckOptions::default())
            .unwrap();
        assert_eq!(t.outcome, Outcome::Equilibrium);
        let t = run_dynamics(&inst, &Network::empty(2), Concept::Ps, Policy::FirstFound, 0, &CheckOptions::default())
            .unwrap();
        assert!(matches!(t.outcome, Outcome::BudgetExhausted { .. }));
    }

    #[test]
    fn triangle_drops_an_edge() {
        let inst = unit(3, 3);
        let v = find_improving_move(&inst, &Network::complete(3), Concept::Ps, Policy::FirstFound, &CheckOptions::default())
            .unwrap();
        assert_eq!(v.witness().unwrap().mv.remove, vec![(0, 1)]);
    }

    #[test]
    fn trace_file_serializes() {
        let inst = unit(3, 3);
        let t = run_dynamics(&inst, &Network::complete(3), Concept::Ps, Policy::BestResponse, 10, &CheckOptions::default())
            .unwrap();
        let text = serde_json::to_string(&TraceFile::new(&inst, &t)).unwrap();
        assert!(text.contains("\"kind\":\"equilibrium\""));
        assert!(text.contains("\"move\""));
    }
}
