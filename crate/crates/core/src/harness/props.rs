//! Seeded property suite for the structural lemmas, with greedy shrinking of
//! counterexamples.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{agent_cost, cost_report, total_weight};
use crate::distance::{shortest_distances, shortest_path_tree, spanner_stretch};
use crate::dynamics::{run_dynamics, Outcome, Policy};
use crate::host::Instance;
use crate::io::InstanceFile;
use crate::network::{Network, NetworkFile};
use crate::optimum::brute_force_opt;
use crate::scalar::Scalar;
use crate::stability::{best_single_removal, CheckOptions, Concept};

use super::random::{random_connected_network, random_instance, random_network, random_tree, RandomModel};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub instance: InstanceFile,
    pub network: NetworkFile,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub trials: usize,
    /// Trials whose premise held.
    pub applicable: usize,
    pub failures: usize,
    /// Shrunk form of the first failing trial.
    pub counterexample: Option<Counterexample>,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropsReport {
    pub seed: u64,
    pub results: Vec<PropertyResult>,
}

impl PropsReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(PropertyResult::passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "seed {}", self.seed);
        for r in &self.results {
            let _ = writeln!(
                out,
                "{:<22} trials {:>6}  applicable {:>6}  failures {:>4}  {}",
                r.name,
                r.trials,
                r.applicable,
                r.failures,
                if r.passed() { "PASS" } else { "FAIL" }
            );
            if let Some(c) = &r.counterexample {
                let _ = writeln!(out, "  counterexample: {} on {:?}", c.detail, c.network.edges);
            }
        }
        out
    }
}

/// Verdict of one trial.
pub enum Trial {
    /// The premise did not hold.
    Vacuous,
    Holds,
    /// Failing input and a description.
    Fails(Instance, Network, String),
}

/// Property over a whole `(instance, network)` pair, used for shrinking.
pub type Predicate = fn(&Instance, &Network) -> Option<String>;

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

const ALPHAS: [(i64, i64); 7] = [(1, 4), (1, 2), (1, 1), (2, 1), (3, 1), (5, 1), (10, 1)];

fn trial_rng(seed: u64, property: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(property);
    rng.set_word_pos(trial as u128 * 1024);
    ChaCha8Rng::seed_from_u64(rng.gen())
}

fn draw_instance(rng: &mut ChaCha8Rng, n: usize, metric: bool) -> Instance {
    let models = if metric {
        vec![RandomModel::TreeMetric { max_weight: 6 }, RandomModel::EuclideanPlane { size: 6 }]
    } else {
        vec![
            RandomModel::Uniform { lo: Scalar::zero(), hi: Scalar::from_int(6) },
            RandomModel::TreeMetric { max_weight: 6 },
            RandomModel::EuclideanPlane { size: 6 },
        ]
    };
    let model = models.choose(rng).unwrap();
    let (p, d) = *ALPHAS.choose(rng).unwrap();
    random_instance(n, model, &q(p, d), rng.gen()).expect("valid parameters")
}

/// Removes edges, then nodes, while `fails` keeps reporting a failure.
pub fn shrink(inst: &Instance, g: &Network, fails: Predicate) -> (Instance, Network, String) {
    let mut inst = inst.clone();
    let mut g = g.clone();
    let mut detail = fails(&inst, &g).unwrap_or_default();
    'outer: loop {
        for &e in g.edges() {
            let smaller = g.with_changes(&[e], &[]);
            if let Some(d) = fails(&inst, &smaller) {
                g = smaller;
                detail = d;
                continue 'outer;
            }
        }
        if inst.n() > 2 {
            for drop in 0..inst.n() {
                let keep: Vec<usize> = (0..inst.n()).filter(|&v| v != drop).collect();
                let host = match inst.host.induced(&keep) {
                    Ok(h) => h,
                    Err(_) => continue,
                };
                let relabel = |v: usize| if v > drop { v - 1 } else { v };
                let edges = g.edges().iter().filter(|&&(u, v)| u != drop && v != drop);
                let smaller_g = Network::new(keep.len(), edges.map(|&(u, v)| (relabel(u), relabel(v))))
                    .expect("relabeled edges are valid");
                let smaller = Instance::new(host, inst.alpha.clone()).expect("alpha unchanged");
                if let Some(d) = fails(&smaller, &smaller_g) {
                    inst = smaller;
                    g = smaller_g;
                    detail = d;
                    continue 'outer;
                }
            }
        }
        return (inst, g, detail);
    }
}

fn run_property(
    name: &str,
    id: u64,
    seed: u64,
    trials: usize,
    trial: impl Fn(&mut ChaCha8Rng) -> Trial + Sync,
    whole: Predicate,
) -> PropertyResult {
    let outcomes: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| trial(&mut trial_rng(seed, id, i)))
        .collect();
    let applicable = outcomes.iter().filter(|t| !matches!(t, Trial::Vacuous)).count();
    let failures = outcomes.iter().filter(|t| matches!(t, Trial::Fails(..))).count();
    let counterexample = outcomes.into_iter().find_map(|t| match t {
        Trial::Fails(inst, g, detail) => {
            let (inst, g, shrunk) = if whole(&inst, &g).is_some() { shrink(&inst, &g, whole) } else { (inst, g, detail) };
            Some(Counterexample { instance: InstanceFile::from(&inst), network: NetworkFile::from(&g), detail: shrunk })
        }
        _ => None,
    });
    PropertyResult { name: name.into(), trials, applicable, failures, counterexample }
}

fn improves(after: &Scalar, before: &Scalar) -> bool {
    after.delta_from(before).is_improvement()
}

fn subsets_of(edges: &[(usize, usize)]) -> impl Iterator<Item = Vec<(usize, usize)>> + '_ {
    (1u32..1 << edges.len()).map(move |m| (0..edges.len()).filter(|i| m >> i & 1 == 1).map(|i| edges[i]).collect())
}

/// Checks one `(u, R)` pair: if dropping `R` helps `u`, a single drop must too,
/// and [`best_single_removal`] must find one.
fn lemma1_case(inst: &Instance, g: &Network, u: usize, r: &[(usize, usize)]) -> Option<String> {
    let before = agent_cost(inst, g, u);
    if !improves(&agent_cost(inst, &g.with_changes(r, &[]), u), &before) {
        return None;
    }
    let single = g
        .incident(u)
        .into_iter()
        .any(|e| improves(&agent_cost(inst, &g.with_changes(&[e], &[]), u), &before));
    let reported = matches!(best_single_removal(inst, g, u), Some((_, d)) if d.is_improvement());
    if single && reported {
        None
    } else {
        Some(format!("agent {u} gains by dropping {r:?} but single drop: scan {single}, reported {reported}"))
    }
}

fn lemma1_whole(inst: &Instance, g: &Network) -> Option<String> {
    (0..inst.n()).find_map(|u| {
        let inc = g.incident(u);
        let found = subsets_of(&inc).find_map(|r| lemma1_case(inst, g, u, &r));
        found
    })
}

/// Removing a set of an agent's edges helps only if removing one of them helps.
pub fn lemma1_property(seed: u64, trials: usize) -> PropertyResult {
    run_property(
        "single-removal",
        1,
        seed,
        trials,
        |rng| {
            let n = rng.gen_range(2..=6);
            let inst = draw_instance(rng, n, false);
            let g = random_network(n, rng.gen_range(0.3..0.9), rng);
            let u = rng.gen_range(0..n);
            let inc = g.incident(u);
            if inc.is_empty() {
                return Trial::Vacuous;
            }
            let r: Vec<_> = loop {
                let pick: Vec<_> = inc.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                if !pick.is_empty() {
                    break pick;
                }
            };
            let before = agent_cost(&inst, &g, u);
            if !improves(&agent_cost(&inst, &g.with_changes(&r, &[]), u), &before) {
                return Trial::Vacuous;
            }
            match lemma1_case(&inst, &g, u, &r) {
                None => Trial::Holds,
                Some(d) => Trial::Fails(inst, g, d),
            }
        },
        lemma1_whole,
    )
}

fn bfs_whole(inst: &Instance, g: &Network) -> Option<String> {
    if !g.is_connected() {
        return None;
    }
    let n = inst.n();
    let dg = shortest_distances(g, &inst.host);
    let total_g = dg.total();
    (0..n).find_map(|z| {
        let t = shortest_path_tree(g, &inst.host, z).ok()?;
        if !t.is_tree() {
            return Some(format!("shortest-path tree at {z} is not a spanning tree"));
        }
        let total_t = shortest_distances(&t, &inst.host).total();
        let bound = &Scalar::from_int(2 * (n as i64 - 1)) * &dg.row_sum(z);
        if total_g <= total_t && total_t <= bound {
            None
        } else {
            Some(format!("z={z}: sum d_G {total_g}, sum d_T {total_t}, bound {bound}"))
        }
    })
}

/// `Σ d_G ≤ Σ d_T ≤ 2(n-1)·d_G(z,V)` for the shortest-path tree `T` at every `z`.
pub fn bfs_tree_property(seed: u64, trials: usize) -> PropertyResult {
    run_property(
        "bfs-tree",
        2,
        seed,
        trials,
        |rng| {
            let n = rng.gen_range(2..=7);
            let inst = draw_instance(rng, n, false);
            let g = random_connected_network(n, rng.gen_range(0.0..0.7), rng);
            match bfs_whole(&inst, &g) {
                None => Trial::Holds,
                Some(d) => Trial::Fails(inst, g, d),
            }
        },
        bfs_whole,
    )
}

fn opt_of(inst: &Instance) -> Network {
    brute_force_opt(inst, 6).expect("small instance").network
}

fn tree_ratio_whole(inst: &Instance, t: &Network) -> Option<String> {
    if !inst.is_metric() || !t.is_tree() {
        return None;
    }
    let wt = total_weight(t, &inst.host);
    let wo = total_weight(&opt_of(inst), &inst.host);
    let n = BigRational::from_integer(BigInt::from(inst.n()));
    (wt > &n * &wo).then(|| format!("w(T) = {wt}, w(OPT) = {wo}"))
}

/// On metric hosts any spanning tree weighs at most `n` times the optimum's edges.
pub fn tree_edge_ratio_property(seed: u64, trials: usize) -> PropertyResult {
    run_property(
        "metric-tree-edge-ratio",
        3,
        seed,
        trials,
        |rng| {
            let n = rng.gen_range(2..=6);
            let inst = draw_instance(rng, n, true);
            let t = random_tree(n, rng);
            match tree_ratio_whole(&inst, &t) {
                None => Trial::Holds,
                Some(d) => Trial::Fails(inst, t, d),
            }
        },
        tree_ratio_whole,
    )
}

fn distance_ratio_whole(inst: &Instance, g: &Network) -> Option<String> {
    if !inst.is_metric() || !g.is_connected() {
        return None;
    }
    let dg = shortest_distances(g, &inst.host).total();
    let dopt = shortest_distances(&opt_of(inst), &inst.host).total();
    let bound = &Scalar::from_int(2 * (inst.n() as i64 - 1)) * &dopt;
    (dg > bound).then(|| format!("sum d_G {dg} > 2(n-1)·{dopt}"))
}

/// On metric hosts every connected network has at most `2(n-1)` times the
/// optimum's distance cost.
pub fn distance_ratio_property(seed: u64, trials: usize) -> PropertyResult {
    run_property(
        "metric-distance-ratio",
        4,
        seed,
        trials,
        |rng| {
            let n = rng.gen_range(2..=6);
            let inst = draw_instance(rng, n, true);
            let g = random_connected_network(n, rng.gen_range(0.0..0.7), rng);
            match distance_ratio_whole(&inst, &g) {
                None => Trial::Holds,
                Some(d) => Trial::Fails(inst, g, d),
            }
        },
        distance_ratio_whole,
    )
}

fn is_ps(inst: &Instance, g: &Network) -> bool {
    crate::stability::is_pairwise_stable(inst, g).map(|v| v.is_stable()).unwrap_or(false)
}

fn ps_bounds_whole(inst: &Instance, g: &Network) -> Option<String> {
    // without a connecting single move every disconnected network is vacuously stable
    if !g.is_connected() || !is_ps(inst, g) {
        return None;
    }
    let n = inst.n() as i64;
    let alpha = inst.alpha_scalar();
    let stretch = spanner_stretch(g, &inst.host);
    let alpha1 = &alpha + &Scalar::one();
    if stretch > alpha1 {
        return Some(format!("stretch {stretch} > {alpha1}"));
    }
    let lhs = &alpha * &Scalar::Finite(total_weight(g, &inst.host));
    let factor = &(&Scalar::Finite(&inst.alpha * BigRational::from_integer(2.into())) * &Scalar::ratio(1, n - 1))
        + &Scalar::one();
    let rhs = &factor * &cost_report(inst, g).total_distance_cost();
    (lhs > rhs).then(|| format!("edge cost {lhs} > {rhs}"))
}

/// Connected pairwise stable networks reached by dynamics are `(α+1)`-spanners and obey
/// `α·w(E) ≤ (2α/(n-1)+1)·Σ d`.
pub fn ps_bounds_property(seed: u64, trials: usize) -> PropertyResult {
    run_property(
        "ps-spanner-edge-cost",
        5,
        seed,
        trials,
        |rng| {
            let n = rng.gen_range(2..=6);
            let inst = draw_instance(rng, n, false);
            let g0 = random_connected_network(n, rng.gen_range(0.0..1.0), rng);
            let t = match run_dynamics(&inst, &g0, Concept::Ps, Policy::FirstFound, 100, &CheckOptions::default()) {
                Ok(t) => t,
                Err(_) => return Trial::Vacuous,
            };
            if t.outcome != Outcome::Equilibrium {
                return Trial::Vacuous;
            }
            match ps_bounds_whole(&inst, &t.last) {
                None => Trial::Holds,
                Some(d) => Trial::Fails(inst, t.last, d),
            }
        },
        ps_bounds_whole,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropsConfig {
    pub seed: u64,
    pub trials: usize,
}

impl Default for PropsConfig {
    fn default() -> Self {
        PropsConfig { seed: 0, trials: 1000 }
    }
}

/// Every property with `cfg.trials` trials each.
pub fn property_suite(cfg: &PropsConfig) -> PropsReport {
    let (s, t) = (cfg.seed, cfg.trials);
    PropsReport {
        seed: s,
        results: vec![
            lemma1_property(s, t),
            bfs_tree_property(s, t),
            tree_edge_ratio_property(s, t),
            distance_ratio_property(s, t),
            ps_bounds_property(s, t),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_small() {
        let r = property_suite(&PropsConfig { seed: 3, trials: 60 });
        assert!(r.passed(), "{}", r.to_text());
        assert!(r.results.iter().all(|p| p.applicable > 0), "{}", r.to_text());
    }

    #[test]
    fn deterministic() {
        let a = lemma1_property(9, 200);
        let b = lemma1_property(9, 200);
        assert_eq!(a, b);
    }

    fn too_many_edges(_: &Instance, g: &Network) -> Option<String> {
        (g.len() >= 2).then(|| format!("{} edges", g.len()))
    }

    #[test]
    fn shrinking_reaches_a_minimal_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let inst = draw_instance(&mut rng, 6, false);
        let (small, g, detail) = shrink(&inst, &Network::complete(6), too_many_edges);
        assert_eq!(g.len(), 2);
        assert_eq!(detail, "2 edges");
        assert_eq!(small.n(), 3);
    }
}
