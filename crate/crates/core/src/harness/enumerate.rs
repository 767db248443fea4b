//! Exhaustive enumeration of stable networks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::social_cost;
use crate::error::Error;
use crate::host::Instance;
use crate::kernel::{Adj, CostModel, CostOracle, CostTable, CostValue, TABLE_MAX_NODES};
use crate::network::{all_pairs, Network};
use crate::scalar::Scalar;
use crate::stability::search::{search_bne, search_bse, search_ps, Outcome};
use crate::stability::{Budget, Concept, Selection};

/// Largest node counts enumerated per concept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnumerationLimits {
    pub ps: usize,
    pub bne: usize,
    pub bse: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits { ps: 7, bne: 7, bse: 6 }
    }
}

impl EnumerationLimits {
    pub fn limit(&self, concept: Concept) -> usize {
        match concept {
            Concept::Ps => self.ps,
            Concept::Bne => self.bne,
            Concept::Bse => self.bse,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnumerateOptions {
    pub budget: Budget,
    pub limits: EnumerationLimits,
    /// Run each checker on every connected subgraph instead of only on the
    /// survivors of the weaker concepts.
    pub unfiltered: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableSet {
    pub concept: Concept,
    /// Sorted by edge list.
    pub networks: Vec<Network>,
    /// Highest social cost, ties by smaller edge list.
    pub worst: Option<(Network, Scalar)>,
    /// Connected subgraphs examined.
    pub examined: u64,
    /// Networks whose check ran out of budget. They are not in `networks`.
    pub inconclusive: Vec<Network>,
}

impl StableSet {
    /// Every connected subgraph got a definite verdict.
    pub fn is_complete(&self) -> bool {
        self.inconclusive.is_empty()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Stable,
    Unstable,
    Inconclusive,
}

fn status<T>(o: Outcome<T>) -> Status {
    match (o.found, o.complete) {
        (Some(_), _) => Status::Unstable,
        (None, true) => Status::Stable,
        (None, false) => Status::Inconclusive,
    }
}

fn check_one<T: CostValue, O: CostOracle<T>>(oracle: &O, adj: &Adj, concept: Concept, budget: &Budget) -> Status {
    let mode = Selection::FirstFound;
    match concept {
        Concept::Ps => status(search_ps(oracle, adj, mode, budget)),
        Concept::Bne => status(search_bne(oracle, adj, mode, budget)),
        Concept::Bse => status(search_bse(oracle, adj, mode, budget)),
    }
}

/// Verdicts for `targets`, one vector per requested concept.
fn classify<T: CostValue, O: CostOracle<T>>(
    oracle: &O,
    n: usize,
    targets: &[Concept],
    opts: &EnumerateOptions,
) -> (u64, Vec<Vec<(u64, Status)>>) {
    let pairs = all_pairs(n);
    let per_mask: Vec<(u64, Vec<Status>)> = (0u64..1 << pairs.len())
        .into_par_iter()
        .filter_map(|mask| {
            if (mask.count_ones() as usize) + 1 < n {
                return None;
            }
            let adj = Adj::from_mask(n, &pairs, mask);
            if !adj.is_connected() {
                return None;
            }
            let mut out = Vec::with_capacity(targets.len());
            // the chain PS ⊇ BNE ⊇ BSE lets a failed weaker check settle the stronger ones
            let mut settled = false;
            for &c in targets {
                let s = if settled && !opts.unfiltered {
                    Status::Unstable
                } else {
                    check_one(oracle, &adj, c, &opts.budget)
                };
                settled |= s == Status::Unstable;
                out.push(s);
            }
            Some((mask, out))
        })
        .collect();
    let examined = per_mask.len() as u64;
    let sets = (0..targets.len())
        .map(|i| per_mask.iter().map(|(m, s)| (*m, s[i])).collect())
        .collect();
    (examined, sets)
}

fn chain(concept: Concept) -> Vec<Concept> {
    match concept {
        Concept::Ps => vec![Concept::Ps],
        Concept::Bne => vec![Concept::Ps, Concept::Bne],
        Concept::Bse => vec![Concept::Ps, Concept::Bne, Concept::Bse],
    }
}

fn build_set(inst: &Instance, concept: Concept, examined: u64, verdicts: &[(u64, Status)]) -> StableSet {
    let n = inst.n();
    let mut networks = Vec::new();
    let mut inconclusive = Vec::new();
    for &(mask, s) in verdicts {
        match s {
            Status::Stable => networks.push(Network::from_mask(n, mask)),
            Status::Inconclusive => inconclusive.push(Network::from_mask(n, mask)),
            Status::Unstable => {}
        }
    }
    networks.sort();
    inconclusive.sort();
    let worst = networks
        .iter()
        .map(|g| (g.clone(), social_cost(inst, g)))
        .fold(None, |best: Option<(Network, Scalar)>, c| match best {
            Some(b) if b.1 >= c.1 => Some(b),
            _ => Some(c),
        });
    StableSet { concept, networks, worst, examined, inconclusive }
}

/// Stable sets for several concepts in one pass over the subgraphs. The
/// result follows the order of `concepts`.
pub fn enumerate_concepts(inst: &Instance, concepts: &[Concept], opts: &EnumerateOptions) -> Result<Vec<StableSet>, Error> {
    let n = inst.n();
    for &c in concepts {
        let limit = opts.limits.limit(c).min(11);
        if n > limit {
            return Err(Error::TooLarge { n, limit });
        }
    }
    // `Concept` orders weakest first, so the strongest chain covers the rest
    let targets: Vec<Concept> = if opts.unfiltered {
        concepts.to_vec()
    } else {
        let strongest = concepts.iter().copied().max().unwrap_or(Concept::Ps);
        chain(strongest)
    };
    let model = CostModel::exact(inst)?;
    let (examined, verdicts) = if n <= TABLE_MAX_NODES {
        classify(&CostTable::build(model), n, &targets, opts)
    } else {
        classify(&model, n, &targets, opts)
    };
    Ok(concepts
        .iter()
        .map(|&c| {
            let i = targets.iter().position(|&t| t == c).expect("every concept is a target");
            build_set(inst, c, examined, &verdicts[i])
        })
        .collect())
}

/// All stable networks of `inst` under `concept`, found by checking every
/// connected subgraph.
pub fn enumerate_stable(inst: &Instance, concept: Concept, opts: &EnumerateOptions) -> Result<StableSet, Error> {
    Ok(enumerate_concepts(inst, &[concept], opts)?.remove(0))
}
