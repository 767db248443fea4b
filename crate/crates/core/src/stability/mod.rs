//! Stability checkers for the three cooperation levels, witness moves and
//! replay.
//!
//! * Pairwise stability (PS): one agent drops one edge, or two agents jointly
//!   add the edge between them.
//! * Bilateral neighborhood equilibrium (BNE): one agent drops any of its edges
//!   and adds edges to partners who each strictly improve.
//! * Bilateral strong equilibrium (BSE): any coalition drops edges it touches
//!   and adds edges inside itself.
//!
//! Every checker returns the canonical witness by default: the move with the
//! smallest `(|Γ|, Γ, R, A)` under lexicographic order of sorted lists.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cost::agent_cost;
use crate::error::Error;
use crate::host::Instance;
use crate::kernel::{Arithmetic, CostModel, CostOracle, CostValue};
use crate::network::{edge, Edge, Network};
use crate::scalar::{Delta, Scalar};

mod guided;
mod removal;
pub(crate) mod search;

pub use guided::{guided_bse_candidates, guided_partition, GuidedParams, GuidedPartition};
pub use removal::best_single_removal;

/// Largest node count whose pair set fits the coalition checker's bitmasks.
pub const BSE_MAX_NODES: usize = 11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Concept {
    #[serde(rename = "PS", alias = "ps")]
    Ps,
    #[serde(rename = "BNE", alias = "bne")]
    Bne,
    #[serde(rename = "BSE", alias = "bse")]
    Bse,
}

impl Concept {
    pub const ALL: [Concept; 3] = [Concept::Ps, Concept::Bne, Concept::Bse];
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Concept::Ps => "PS",
            Concept::Bne => "BNE",
            Concept::Bse => "BSE",
        })
    }
}

impl FromStr for Concept {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "ps" => Ok(Concept::Ps),
            "bne" => Ok(Concept::Bne),
            "bse" => Ok(Concept::Bse),
            _ => Err(Error::Parse(format!("unknown concept {s:?}"))),
        }
    }
}

/// Joint deviation of a coalition: remove `remove`, add `add`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub concept: Concept,
    pub coalition: Vec<usize>,
    pub remove: Vec<Edge>,
    pub add: Vec<Edge>,
}

impl Move {
    /// Normalizes edges and sorts all three lists.
    pub fn new(
        concept: Concept,
        coalition: impl IntoIterator<Item = usize>,
        remove: impl IntoIterator<Item = Edge>,
        add: impl IntoIterator<Item = Edge>,
    ) -> Self {
        let mut coalition: Vec<usize> = coalition.into_iter().collect();
        coalition.sort_unstable();
        coalition.dedup();
        let norm = |it: &mut dyn Iterator<Item = Edge>| {
            let mut v: Vec<Edge> = it.map(|(a, b)| edge(a, b)).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let remove = norm(&mut remove.into_iter());
        let add = norm(&mut add.into_iter());
        Move { concept, coalition, remove, add }
    }

    /// Ordering key for canonical witnesses.
    pub fn key(&self) -> (usize, &[usize], &[Edge], &[Edge]) {
        (self.coalition.len(), &self.coalition, &self.remove, &self.add)
    }

    pub fn changes(&self) -> usize {
        self.remove.len() + self.add.len()
    }

    fn in_coalition(&self, u: usize) -> bool {
        self.coalition.binary_search(&u).is_ok()
    }

    /// Structural validity against `g`, independent of the concept.
    pub fn validate(&self, g: &Network) -> Result<(), Error> {
        let n = g.n();
        for &(u, v) in self.remove.iter().chain(&self.add) {
            if u == v || v >= n {
                return Err(Error::InvalidEdge((u, v), n));
            }
        }
        if let Some(&u) = self.coalition.iter().find(|&&u| u >= n) {
            return Err(Error::InvalidEdge((u, u), n));
        }
        for &(u, v) in &self.remove {
            if !g.contains(u, v) {
                return Err(Error::RemovalNotPresent((u, v)));
            }
            if !self.in_coalition(u) && !self.in_coalition(v) {
                return Err(Error::RemovalOutsideCoalition((u, v)));
            }
        }
        for &(u, v) in &self.add {
            if g.contains(u, v) {
                return Err(Error::AdditionAlreadyPresent((u, v)));
            }
            if !self.in_coalition(u) || !self.in_coalition(v) {
                return Err(Error::AdditionOutsideCoalition((u, v)));
            }
        }
        Ok(())
    }

    /// Whether the move belongs to its concept's move space.
    pub fn fits_concept(&self) -> bool {
        if self.changes() == 0 {
            return false;
        }
        match self.concept {
            Concept::Ps => match (self.coalition.len(), self.remove.len(), self.add.len()) {
                (1, 1, 0) => {
                    let (a, b) = self.remove[0];
                    self.in_coalition(a) || self.in_coalition(b)
                }
                (2, 0, 1) => self.add[0] == (self.coalition[0], self.coalition[1]),
                _ => false,
            },
            Concept::Bne => self.coalition.iter().any(|&u| {
                let touches = |&(a, b): &Edge| a == u || b == u;
                let mut partners: Vec<usize> =
                    self.add.iter().map(|&(a, b)| if a == u { b } else { a }).collect();
                partners.push(u);
                partners.sort_unstable();
                self.remove.iter().all(touches)
                    && self.add.iter().all(touches)
                    && partners == self.coalition
            }),
            Concept::Bse => true,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |es: &[Edge]| es.iter().map(|(u, v)| format!("{u}-{v}")).collect::<Vec<_>>().join(" ");
        write!(
            f,
            "{} coalition {:?} remove [{}] add [{}]",
            self.concept,
            self.coalition,
            list(&self.remove),
            list(&self.add)
        )
    }
}

/// `G - R + A`.
pub fn apply_move(g: &Network, m: &Move) -> Result<Network, Error> {
    m.validate(g)?;
    Ok(g.with_changes(&m.remove, &m.add))
}

/// Exact before/after costs of every coalition member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replay {
    pub after: Network,
    pub before: BTreeMap<usize, Scalar>,
    pub after_costs: BTreeMap<usize, Scalar>,
    pub deltas: BTreeMap<usize, Delta>,
    /// Every member strictly improves and the move fits its concept.
    pub improving: bool,
}

pub fn replay(inst: &Instance, g: &Network, m: &Move) -> Result<Replay, Error> {
    check_sizes(inst, g)?;
    let after = apply_move(g, m)?;
    let mut before = BTreeMap::new();
    let mut after_costs = BTreeMap::new();
    let mut deltas = BTreeMap::new();
    for &u in &m.coalition {
        let b = agent_cost(inst, g, u);
        let a = agent_cost(inst, &after, u);
        deltas.insert(u, a.delta_from(&b));
        before.insert(u, b);
        after_costs.insert(u, a);
    }
    let improving = m.fits_concept() && deltas.values().all(Delta::is_improvement);
    Ok(Replay { after, before, after_costs, deltas, improving })
}

/// An improving move with its exact cost deltas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub mv: Move,
    pub deltas: BTreeMap<usize, Delta>,
    /// The move is the canonical (smallest-key) one over the full move space.
    pub canonical: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable(Witness),
    Inconclusive { evaluated: u64, frontier: String },
}

impl Verdict {
    pub fn is_stable(&self) -> bool {
        matches!(self, Verdict::Stable)
    }

    pub fn is_unstable(&self) -> bool {
        matches!(self, Verdict::Unstable(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Unstable(w) => Some(w),
            _ => None,
        }
    }
}

/// Search caps. A cap that may hide an improving move turns a would-be
/// `Stable` into `Inconclusive`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    pub max_coalition: Option<usize>,
    pub max_changes: Option<usize>,
    pub max_evaluations: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_coalition: None, max_changes: None, max_evaluations: 1 << 23 }
    }
}

/// Which improving move to report.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Smallest `(|Γ|, Γ, R, A)`.
    #[default]
    Canonical,
    /// Largest summed improvement over the coalition, ties by canonical key.
    BestResponse,
    /// First move in enumeration order. Faster, not canonical.
    FirstFound,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckOptions {
    pub arithmetic: Arithmetic,
    pub budget: Budget,
    pub selection: Selection,
}

impl CheckOptions {
    pub fn with_budget(budget: Budget) -> Self {
        CheckOptions { budget, ..Default::default() }
    }
}

fn check_sizes(inst: &Instance, g: &Network) -> Result<(), Error> {
    if g.n() != inst.n() {
        return Err(Error::NodeCountMismatch { expected: inst.n(), got: g.n() });
    }
    Ok(())
}

pub fn is_pairwise_stable(inst: &Instance, g: &Network) -> Result<Verdict, Error> {
    check(inst, g, Concept::Ps, &CheckOptions::default())
}

pub fn is_bne(inst: &Instance, g: &Network, budget: &Budget) -> Result<Verdict, Error> {
    check(inst, g, Concept::Bne, &CheckOptions::with_budget(*budget))
}

pub fn is_bse(inst: &Instance, g: &Network, budget: &Budget) -> Result<Verdict, Error> {
    check(inst, g, Concept::Bse, &CheckOptions::with_budget(*budget))
}

/// Runs the checker for `concept`.
pub fn check(inst: &Instance, g: &Network, concept: Concept, opts: &CheckOptions) -> Result<Verdict, Error> {
    check_sizes(inst, g)?;
    if concept == Concept::Bse && inst.n() > BSE_MAX_NODES {
        return Err(Error::TooLarge { n: inst.n(), limit: BSE_MAX_NODES });
    }
    match opts.arithmetic {
        Arithmetic::Exact => {
            let model = CostModel::exact(inst)?;
            check_with(inst, g, concept, opts, &model)
        }
        Arithmetic::Inexact { tolerance } => {
            let model = CostModel::inexact(inst, tolerance);
            check_with(inst, g, concept, opts, &model)
        }
    }
}

/// Same as [`check`] over a prepared cost oracle.
pub(crate) fn check_with<T: CostValue, O: CostOracle<T>>(
    inst: &Instance,
    g: &Network,
    concept: Concept,
    opts: &CheckOptions,
    oracle: &O,
) -> Result<Verdict, Error> {
    let outcome = search::search(oracle, g, concept, opts.selection, &opts.budget);
    to_verdict(inst, g, outcome, opts.selection)
}

pub(crate) fn to_verdict<T>(
    inst: &Instance,
    g: &Network,
    outcome: search::Outcome<T>,
    selection: Selection,
) -> Result<Verdict, Error> {
    match outcome.found {
        Some(found) => {
            let deltas = replay(inst, g, &found.mv)?.deltas;
            Ok(Verdict::Unstable(Witness {
                mv: found.mv,
                deltas,
                canonical: outcome.complete && selection == Selection::Canonical,
            }))
        }
        None if outcome.complete => Ok(Verdict::Stable),
        None => Ok(Verdict::Inconclusive { evaluated: outcome.evaluated, frontier: outcome.frontier }),
    }
}

/// Witness file layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub concept: Concept,
    pub coalition: Vec<usize>,
    pub remove: Vec<[usize; 2]>,
    pub add: Vec<[usize; 2]>,
    pub deltas: BTreeMap<String, Delta>,
}

impl From<&Witness> for WitnessFile {
    fn from(w: &Witness) -> Self {
        let pairs = |es: &[Edge]| es.iter().map(|&(u, v)| [u, v]).collect();
        WitnessFile {
            concept: w.mv.concept,
            coalition: w.mv.coalition.clone(),
            remove: pairs(&w.mv.remove),
            add: pairs(&w.mv.add),
            deltas: w.deltas.iter().map(|(u, d)| (u.to_string(), d.clone())).collect(),
        }
    }
}

impl WitnessFile {
    pub fn to_move(&self) -> Move {
        Move::new(
            self.concept,
            self.coalition.iter().copied(),
            self.remove.iter().map(|&[u, v]| (u, v)),
            self.add.iter().map(|&[u, v]| (u, v)),
        )
    }
}
