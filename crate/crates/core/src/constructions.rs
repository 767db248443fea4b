//! Lower-bound instances with a claimed equilibrium and a cheap reference
//! network, plus a verifier that re-derives every claim with the checkers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cost::social_cost;
use crate::error::Error;
use crate::host::{is_metric, metric_closure, HostGraph, Instance};
use crate::io::InstanceFile;
use crate::network::{Network, NetworkFile};
use crate::optimum::{brute_force_opt, OPT_NODE_LIMIT};
use crate::scalar::Scalar;
use crate::stability::{check, CheckOptions, Concept, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Zero-weight cluster with one expensive edge to an outside node.
    GeneralBse,
    /// Two stars on the closure of a weighted star.
    MetricStar,
    /// Short path plus a zero-weight cluster.
    MetricPath,
}

impl Family {
    pub fn is_metric(self) -> bool {
        self != Family::GeneralBse
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub family: Family,
    pub instance: Instance,
    pub stable: Network,
    pub reference: Network,
    pub concept: Concept,
    /// `cost(stable) / cost(reference)`
    pub expected_ratio: Scalar,
    /// The ratio only matters as `n` grows; at any fixed size only the costs
    /// and the stability claim are checked.
    pub asymptotic_only: bool,
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn fixture_precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

/// Nodes `0..n-1` are the cluster `u_1..u_{n-1}` with pairwise weight 0, node
/// `n-1` is `v`. `w(u_1,v) = α+1`, `w(u_i,v) = 1` otherwise. The stable network
/// hangs `v` off `u_1`; the reference hangs it off `u_2`.
pub fn gen_general_bse(n: usize, alpha: &BigRational) -> Result<Fixture, Error> {
    if n <= 2 {
        return Err(fixture_precondition("the cluster construction needs n > 2"));
    }
    let v = n - 1;
    let far = alpha + BigRational::one();
    let mut host = HostGraph::from_fn(n, |a, b| match (a, b) {
        (0, b) if b == v => far.clone(),
        (_, b) if b == v => int(1),
        _ => BigRational::zero(),
    })?;
    host.check_metric();
    let instance = Instance::new(host, alpha.clone())?;
    let cluster_tree = (1..v).map(|i| (0, i));
    let stable = Network::new(n, cluster_tree.clone().chain([(0, v)]))?;
    let reference = Network::new(n, cluster_tree.chain([(1, v)]))?;
    Ok(Fixture {
        family: Family::GeneralBse,
        instance,
        stable,
        reference,
        concept: Concept::Bse,
        expected_ratio: Scalar::Finite(far),
        asymptotic_only: false,
    })
}

/// Leaf weights `(a, b)` of the seed star for each concept.
pub fn metric_star_weights(n: usize, alpha: &BigRational, variant: Concept) -> Result<(BigRational, BigRational), Error> {
    let two_over = |x: &BigRational| int(2) / x;
    match variant {
        Concept::Ps => Ok((int(1), two_over(alpha))),
        Concept::Bne => {
            let root = Scalar::Finite(alpha.clone())
                .exact_sqrt()
                .ok_or_else(|| Error::AlphaNotSquare(alpha.to_string()))?;
            Ok((int(1), two_over(root.as_rational().unwrap())))
        }
        Concept::Bse => Ok((BigRational::new(1.into(), BigInt::from(n)), two_over(alpha))),
    }
}

/// Seed star: center `c = 0`, leaf `u = 1` at weight `a`, leaves
/// `v_i = 2..n-1` at weight `b`; the host is its metric closure. The stable
/// network is the star at `u`, the reference is the seed star itself.
pub fn gen_metric_star(n: usize, alpha: &BigRational, variant: Concept) -> Result<Fixture, Error> {
    if n < 4 {
        return Err(fixture_precondition("the star construction needs n >= 4"));
    }
    let (a, b) = metric_star_weights(n, alpha, variant)?;
    let seed: Vec<_> = std::iter::once((0, 1, a.clone()))
        .chain((2..n).map(|i| (0, i, b.clone())))
        .collect();
    let host = metric_closure(n, &seed)?;
    let k = int(n as i64 - 2);
    // w(E_S) / w(E*) = (a + k(a+b)) / (a + kb)
    let ratio = BigRational::one() + &k * &a / (&a + &k * &b);
    Ok(Fixture {
        family: Family::MetricStar,
        instance: Instance::new(host, alpha.clone())?,
        stable: Network::star(n, 1),
        reference: Network::star(n, 0),
        concept: variant,
        expected_ratio: Scalar::Finite(ratio),
        asymptotic_only: false,
    })
}

/// Path `v_1..v_x` with `x = ⌊√α/2⌋` (weight 1 between neighbors, 2 otherwise)
/// and `n - x` cluster nodes at distance 0 from `v_1`. The stable network is
/// the path plus a zero star; the reference is the star at `v_1`.
pub fn gen_metric_path(n: usize, alpha: &BigRational) -> Result<Fixture, Error> {
    let root = Scalar::Finite(alpha.clone())
        .exact_sqrt()
        .ok_or_else(|| Error::AlphaNotSquare(alpha.to_string()))?;
    if *alpha < int(16) {
        return Err(fixture_precondition("the path construction needs alpha >= 16"));
    }
    if *alpha > int((n * n) as i64) {
        return Err(fixture_precondition("the path construction needs alpha <= n^2"));
    }
    let x = (root.as_rational().unwrap() / int(2)).floor().to_integer();
    let x: usize = x.try_into().map_err(|_| fixture_precondition("path too long"))?;
    if x >= n {
        return Err(fixture_precondition("path longer than the node count"));
    }
    let mut seed = Vec::new();
    for i in 0..x {
        for j in (i + 1)..x {
            seed.push((i, j, int(if j == i + 1 { 1 } else { 2 })));
        }
    }
    seed.extend((x..n).map(|c| (0, c, BigRational::zero())));
    let host = metric_closure(n, &seed)?;
    let instance = Instance::new(host, alpha.clone())?;
    let stable = Network::new(n, (x..n).map(|c| (0, c)).chain((1..x).map(|i| (i - 1, i))))?;
    let reference = Network::star(n, 0);
    let expected_ratio = social_cost(&instance, &stable)
        .checked_div(&social_cost(&instance, &reference))
        .expect("reference network has positive cost");
    Ok(Fixture {
        family: Family::MetricPath,
        instance,
        stable,
        reference,
        concept: Concept::Bse,
        expected_ratio,
        asymptotic_only: true,
    })
}

/// Dispatch by family. `variant` only matters for the star family.
pub fn generate(family: Family, n: usize, alpha: &BigRational, variant: Concept) -> Result<Fixture, Error> {
    match family {
        Family::GeneralBse => gen_general_bse(n, alpha),
        Family::MetricStar => gen_metric_star(n, alpha, variant),
        Family::MetricPath => gen_metric_path(n, alpha),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixtureCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixtureReport {
    pub checks: Vec<FixtureCheck>,
    pub stable_cost: Scalar,
    pub reference_cost: Scalar,
    pub ratio_vs_reference: Option<Scalar>,
    pub ratio_vs_opt: Option<Scalar>,
    /// The stability checker ran out of budget.
    pub inconclusive: bool,
}

impl FixtureReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&FixtureCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub check: CheckOptions,
    /// `brute_force_opt` runs when `n` is at most this.
    pub opt_limit: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { check: CheckOptions::default(), opt_limit: OPT_NODE_LIMIT }
    }
}

pub fn verify_fixture(f: &Fixture, opts: &VerifyOptions) -> Result<FixtureReport, Error> {
    let inst = &f.instance;
    let mut checks = Vec::new();
    let mut push = |name, passed, detail: String| checks.push(FixtureCheck { name, passed, detail });

    let shape_ok = [&f.stable, &f.reference].iter().all(|g| g.n() == inst.n() && g.is_connected());
    push("networks", shape_ok, "both networks span the host and are connected".into());

    let verdict = check(inst, &f.stable, f.concept, &opts.check)?;
    let inconclusive = matches!(verdict, Verdict::Inconclusive { .. });
    let detail = match &verdict {
        Verdict::Stable => format!("{} stable", f.concept),
        Verdict::Unstable(w) => format!("improving move: {}", w.mv),
        Verdict::Inconclusive { evaluated, frontier } => {
            format!("inconclusive after {evaluated} evaluations at {frontier}")
        }
    };
    push("stability", verdict.is_stable(), detail);

    let stable_cost = social_cost(inst, &f.stable);
    let reference_cost = social_cost(inst, &f.reference);
    let ratio_vs_reference = stable_cost.checked_div(&reference_cost);
    if !f.asymptotic_only {
        let ok = ratio_vs_reference.as_ref() == Some(&f.expected_ratio);
        let shown = ratio_vs_reference.as_ref().map_or("undefined".to_string(), |r| r.to_string());
        push("ratio", ok, format!("measured {shown}, expected {}", f.expected_ratio));
    }

    if f.family.is_metric() {
        let rep = is_metric(&inst.host);
        push("metric", rep.is_metric, format!("{:?}", rep.violation.map(|v| (v.u, v.z, v.v))));
    }

    let mut ratio_vs_opt = None;
    if inst.n() <= opts.opt_limit {
        let opt = brute_force_opt(inst, opts.opt_limit)?;
        let r = stable_cost.checked_div(&opt.cost);
        let ok = opt.cost <= reference_cost;
        push("opt", ok, format!("optimum cost {}, reference cost {reference_cost}", opt.cost));
        ratio_vs_opt = r;
    }

    Ok(FixtureReport { checks, stable_cost, reference_cost, ratio_vs_reference, ratio_vs_opt, inconclusive })
}

/// Bundle file: instance, both networks and the claim.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureFile {
    pub family: Family,
    pub instance: InstanceFile,
    pub stable: NetworkFile,
    pub reference: NetworkFile,
    pub concept: Concept,
    pub expected_ratio: Scalar,
    pub asymptotic_only: bool,
}

impl From<&Fixture> for FixtureFile {
    fn from(f: &Fixture) -> Self {
        FixtureFile {
            family: f.family,
            instance: InstanceFile::from(&f.instance),
            stable: NetworkFile::from(&f.stable),
            reference: NetworkFile::from(&f.reference),
            concept: f.concept,
            expected_ratio: f.expected_ratio.clone(),
            asymptotic_only: f.asymptotic_only,
        }
    }
}

impl FixtureFile {
    pub fn to_fixture(&self) -> Result<Fixture, Error> {
        let instance = self.instance.to_instance()?;
        let n = instance.n();
        Ok(Fixture {
            family: self.family,
            stable: self.stable.clone().into_network(n)?,
            reference: self.reference.clone().into_network(n)?,
            instance,
            concept: self.concept,
            expected_ratio: self.expected_ratio.clone(),
            asymptotic_only: self.asymptotic_only,
        })
    }
}
