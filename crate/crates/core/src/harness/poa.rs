//! Worst stable cost over optimum, and the upper bounds every row must obey.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{cost_report, social_cost, total_weight};
use crate::distance::spanner_stretch;
use crate::dynamics::{run_dynamics, Outcome, Policy};
use crate::error::Error;
use crate::host::Instance;
use crate::network::{Network, NetworkFile};
use crate::optimum::{best_known_opt, heuristic_opt, OptResult, OPT_NODE_LIMIT};
use crate::scalar::Scalar;
use crate::stability::{CheckOptions, Concept};

use super::enumerate::{enumerate_stable, EnumerateOptions};
use super::random::random_connected_network;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PoaOptions {
    pub enumerate: EnumerateOptions,
    /// Largest `n` for which the optimum is found exhaustively.
    pub opt_limit: usize,
    /// Dynamics runs used when enumeration is out of reach.
    pub dynamics_starts: usize,
    pub max_steps: usize,
    pub seed: u64,
}

impl Default for PoaOptions {
    fn default() -> Self {
        PoaOptions {
            enumerate: EnumerateOptions::default(),
            opt_limit: OPT_NODE_LIMIT,
            dynamics_starts: 8,
            max_steps: 200,
            seed: 0,
        }
    }
}

/// One measured point. When `complete` is false the ratio is that of the
/// worst stable network found, not the price of anarchy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoaPoint {
    pub n: usize,
    pub alpha: Scalar,
    pub concept: Concept,
    pub stable_found: usize,
    pub worst: Option<NetworkFile>,
    pub worst_cost: Option<Scalar>,
    pub opt_cost: Scalar,
    pub opt_proven: bool,
    pub ratio: Option<Scalar>,
    /// Every connected subgraph received a definite verdict.
    pub complete: bool,
    /// Dynamics outcome from the complete network, attached when nothing
    /// stable was found.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Outcome>,
}

impl PoaPoint {
    pub fn require_ratio(&self) -> Result<&Scalar, Error> {
        self.ratio.as_ref().ok_or(Error::NoStableFound)
    }
}

/// A point together with the networks behind it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoaRun {
    pub point: PoaPoint,
    pub stable: Vec<Network>,
    pub opt: OptResult,
}

fn dynamics_endpoints(
    inst: &Instance,
    concept: Concept,
    opts: &PoaOptions,
    opt: &OptResult,
) -> Result<(Vec<Network>, Option<Outcome>), Error> {
    let n = inst.n();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = vec![Network::complete(n), opt.network.clone(), Network::star(n, 0)];
    while starts.len() < opts.dynamics_starts {
        starts.push(random_connected_network(n, 0.3, &mut rng));
    }
    starts.truncate(opts.dynamics_starts.max(1));
    let check = CheckOptions::with_budget(opts.enumerate.budget);
    let mut found = Vec::new();
    let mut first = None;
    for g0 in &starts {
        let t = run_dynamics(inst, g0, concept, Policy::FirstFound, opts.max_steps, &check)?;
        if t.outcome == Outcome::Equilibrium {
            found.push(t.last);
        }
        first.get_or_insert(t.outcome);
    }
    found.sort();
    found.dedup();
    Ok((found, first))
}

pub fn poa_run(inst: &Instance, concept: Concept, opts: &PoaOptions) -> Result<PoaRun, Error> {
    let n = inst.n();
    let opt = if n <= opts.opt_limit { best_known_opt(inst, opts.opt_limit)? } else { heuristic_opt(inst) };
    let (stable, complete, mut evidence) = if n <= opts.enumerate.limits.limit(concept) {
        let set = enumerate_stable(inst, concept, &opts.enumerate)?;
        let complete = set.is_complete();
        (set.networks, complete, None)
    } else {
        let (found, first) = dynamics_endpoints(inst, concept, opts, &opt)?;
        (found, false, first)
    };
    if stable.is_empty() && evidence.is_none() {
        let check = CheckOptions::with_budget(opts.enumerate.budget);
        let t = run_dynamics(inst, &Network::complete(n), concept, Policy::FirstFound, opts.max_steps, &check)?;
        evidence = Some(t.outcome);
    }
    if !stable.is_empty() {
        evidence = None;
    }
    let worst = stable
        .iter()
        .map(|g| (g, social_cost(inst, g)))
        .fold(None, |best: Option<(&Network, Scalar)>, c| match best {
            Some(b) if b.1 >= c.1 => Some(b),
            _ => Some(c),
        });
    let ratio = worst.as_ref().and_then(|(_, c)| c.checked_div(&opt.cost));
    let point = PoaPoint {
        n,
        alpha: inst.alpha_scalar(),
        concept,
        stable_found: stable.len(),
        worst: worst.as_ref().map(|(g, _)| NetworkFile::from(*g)),
        worst_cost: worst.map(|(_, c)| c),
        opt_cost: opt.cost.clone(),
        opt_proven: opt.proven,
        ratio,
        complete,
        evidence,
    };
    Ok(PoaRun { point, stable, opt })
}

pub fn poa_point(inst: &Instance, concept: Concept, opts: &PoaOptions) -> Result<PoaPoint, Error> {
    Ok(poa_run(inst, concept, opts)?.point)
}

/// Outcome of one upper-bound predicate on a row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub holds: bool,
    /// Recorded only; an asymptotic bound whose failure at small `n` is not a
    /// contradiction.
    pub advisory: bool,
    pub detail: String,
}

impl BoundCheck {
    fn proven(name: &str, holds: bool, detail: String) -> Self {
        BoundCheck { name: name.into(), holds, advisory: false, detail }
    }

    pub fn is_violation(&self) -> bool {
        !self.holds && !self.advisory
    }
}

fn int(v: i64) -> Scalar {
    Scalar::from_int(v)
}

/// Upper bounds for a row. Every stable network of any concept is pairwise
/// stable, so the pairwise bounds apply to all three. A heuristic optimum
/// only underestimates the ratio, so a violation against it is still real.
pub fn bound_checks(inst: &Instance, run: &PoaRun) -> Vec<BoundCheck> {
    let n = inst.n();
    let alpha = inst.alpha_scalar();
    let alpha1 = &alpha + &Scalar::one();
    let mut out = Vec::new();

    if let Some(ratio) = &run.point.ratio {
        let general = &int(2) * &alpha1;
        out.push(BoundCheck::proven("ratio<=2(a+1)", *ratio <= general, format!("{ratio} vs {general}")));
        if inst.is_metric() {
            out.push(BoundCheck::proven("metric ratio<=a+1", *ratio <= alpha1, format!("{ratio} vs {alpha1}")));
            let lin = int(2 * (n as i64 - 1));
            out.push(BoundCheck::proven("metric ratio<=2(n-1)", *ratio <= lin, format!("{ratio} vs {lin}")));
        }
    }

    let mut worst_stretch: Option<(Scalar, &Network)> = None;
    let mut edge_violation: Option<(&Network, Scalar, Scalar)> = None;
    let slope = (&int(2) * &alpha).checked_div(&int(n as i64 - 1)).unwrap_or(Scalar::zero());
    let factor = &slope + &Scalar::one();
    for g in &run.stable {
        let s = spanner_stretch(g, &inst.host);
        if worst_stretch.as_ref().is_none_or(|(w, _)| s > *w) {
            worst_stretch = Some((s, g));
        }
        let lhs = &alpha * &Scalar::Finite(total_weight(g, &inst.host));
        let rhs = &factor * &cost_report(inst, g).total_distance_cost();
        if lhs > rhs && edge_violation.is_none() {
            edge_violation = Some((g, lhs, rhs));
        }
    }
    if let Some((s, g)) = worst_stretch {
        out.push(BoundCheck::proven(
            "stable stretch<=a+1",
            s <= alpha1,
            format!("max stretch {s} on {:?}", g.edges()),
        ));
    }
    if !run.stable.is_empty() {
        let detail = match &edge_violation {
            Some((g, l, r)) => format!("{l} > {r} on {:?}", g.edges()),
            None => format!("{} networks", run.stable.len()),
        };
        out.push(BoundCheck::proven("edge cost<=(2a/(n-1)+1)*dist", edge_violation.is_none(), detail));
    }
    if run.opt.proven {
        let s = spanner_stretch(&run.opt.network, &inst.host);
        out.push(BoundCheck::proven("opt stretch<=a+1", s <= alpha1, format!("{s}")));
    }
    if run.point.concept == Concept::Bse && inst.is_metric() && !run.stable.is_empty() {
        out.push(bse_distance_ratio(inst, run));
    }
    out
}

/// `Σd_G ≤ 380·√α·Σd_OPT`, compared squared.
fn bse_distance_ratio(inst: &Instance, run: &PoaRun) -> BoundCheck {
    let dopt = cost_report(inst, &run.opt.network).total_distance_cost();
    let dmax = run
        .stable
        .iter()
        .map(|g| cost_report(inst, g).total_distance_cost())
        .max()
        .unwrap_or(Scalar::zero());
    let lhs = &dmax * &dmax;
    let rhs = &(&int(380 * 380) * &inst.alpha_scalar()) * &(&dopt * &dopt);
    BoundCheck {
        name: "bse dist<=380sqrt(a)*opt dist".into(),
        holds: lhs <= rhs,
        advisory: true,
        detail: format!("{dmax} vs opt {dopt}"),
    }
}
