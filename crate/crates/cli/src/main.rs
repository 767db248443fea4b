//! Command-line front end: checks, optima, fixtures, dynamics and sweeps.
//!
//! Results go to stdout as JSON (or a text table for `sweep` and `props`).
//! Exit codes: 0 ok or stable, 1 unstable with a witness, 2 inconclusive,
//! 3 input error, 4 violation of a proven bound.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use netform::constructions::{generate, verify_fixture, Family, FixtureFile, VerifyOptions};
use netform::dynamics::{run_dynamics, Outcome, Policy, TraceFile};
use netform::harness::{bound_checks, poa_run, poa_sweep, property_suite, PoaOptions, PropsConfig, SweepConfig};
use netform::io::{read_instance, read_json, read_network, to_json};
use netform::optimum::{best_known_opt, brute_force_opt, OptFile, OPT_NODE_LIMIT};
use netform::stability::WitnessFile;
use netform::{
    check, spanner_stretch, Arithmetic, Budget, CheckOptions, Concept, Network, NetworkFile, Scalar, Verdict,
};
use serde_json::json;

const OK: u8 = 0;
const UNSTABLE: u8 = 1;
const INCONCLUSIVE: u8 = 2;
const INPUT_ERROR: u8 = 3;
const VIOLATION: u8 = 4;

#[derive(Parser)]
#[command(name = "netform", version, about = "Bilateral network creation games: stability, optima and sweeps")]
struct Cli {
    #[command(flatten)]
    engine: Engine,
    #[command(subcommand)]
    cmd: Cmd,
}

/// Arithmetic and search caps shared by every checker call.
#[derive(Args)]
struct Engine {
    /// Use floating-point costs with this tolerance instead of exact arithmetic.
    #[arg(long, global = true, value_name = "TOL", num_args = 0..=1, default_missing_value = "1e-9")]
    inexact: Option<f64>,
    /// Largest coalition the BNE/BSE search may form.
    #[arg(long, global = true)]
    max_coalition: Option<usize>,
    /// Largest number of edge changes per move.
    #[arg(long, global = true)]
    max_changes: Option<usize>,
    /// Evaluation budget per check.
    #[arg(long, global = true)]
    max_evaluations: Option<u64>,
}

impl Engine {
    fn options(&self) -> CheckOptions {
        let mut budget = Budget { max_coalition: self.max_coalition, max_changes: self.max_changes, ..Budget::default() };
        if let Some(m) = self.max_evaluations {
            budget.max_evaluations = m;
        }
        let arithmetic = match self.inexact {
            Some(tolerance) => Arithmetic::Inexact { tolerance },
            None => Arithmetic::Exact,
        };
        CheckOptions { arithmetic, budget, ..Default::default() }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether a network is stable and print a witness if not.
    Check {
        instance: PathBuf,
        network: PathBuf,
        #[arg(long)]
        concept: Concept,
    },
    /// Socially optimal network (exhaustive when small, heuristic otherwise).
    Opt {
        instance: PathBuf,
        /// Fail instead of falling back to the heuristic.
        #[arg(long)]
        exact: bool,
    },
    /// Build a lower-bound fixture bundle.
    Gen {
        #[arg(value_parser = parse_family)]
        family: Family,
        #[arg(long)]
        n: usize,
        /// Edge price, as an integer or `p/q`.
        #[arg(long)]
        alpha: Scalar,
        /// Stability concept for the metric star family.
        #[arg(long, default_value = "ps")]
        variant: Concept,
    },
    /// Re-check every claim of a fixture bundle.
    VerifyFixture { bundle: PathBuf },
    /// Run improving-move dynamics.
    Dynamics {
        instance: PathBuf,
        /// Starting network; the complete network by default.
        #[arg(long)]
        from: Option<PathBuf>,
        #[arg(long)]
        concept: Concept,
        #[arg(long, default_value = "first-found")]
        policy: Policy,
        #[arg(long, default_value_t = 200)]
        max_steps: usize,
    },
    /// Price of anarchy on one instance, with bound checks.
    Poa {
        instance: PathBuf,
        #[arg(long)]
        concept: Concept,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a sweep described by a JSON config.
    Sweep {
        config: PathBuf,
        /// One JSON record per row instead of a table.
        #[arg(long)]
        jsonl: bool,
    },
    /// Seeded property suite for the structural lemmas.
    Props {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

fn parse_family(s: &str) -> Result<Family, String> {
    serde_json::from_value(json!(s.replace('-', "_"))).map_err(|_| {
        format!("unknown family {s:?} (expected general-bse, metric-star or metric-path)")
    })
}

fn verdict_json(v: &Verdict) -> serde_json::Value {
    match v {
        Verdict::Stable => json!({ "verdict": "stable" }),
        Verdict::Unstable(w) => json!({ "verdict": "unstable", "witness": WitnessFile::from(w) }),
        Verdict::Inconclusive { evaluated, frontier } => {
            json!({ "verdict": "inconclusive", "evaluated": evaluated, "frontier": frontier })
        }
    }
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Stable => OK,
        Verdict::Unstable(_) => UNSTABLE,
        Verdict::Inconclusive { .. } => INCONCLUSIVE,
    }
}

fn load_network(path: &Path, n: usize) -> Result<Network> {
    read_network(path, n).with_context(|| format!("reading network {}", path.display()))
}

fn run(cli: &Cli) -> Result<u8> {
    let opts = cli.engine.options();
    match &cli.cmd {
        Cmd::Check { instance, network, concept } => {
            let inst = read_instance(instance)?;
            let g = load_network(network, inst.n())?;
            let v = check(&inst, &g, *concept, &opts)?;
            println!("{}", to_json(&verdict_json(&v)));
            Ok(verdict_code(&v))
        }
        Cmd::Opt { instance, exact } => {
            let inst = read_instance(instance)?;
            let opt = if *exact { brute_force_opt(&inst, OPT_NODE_LIMIT)? } else { best_known_opt(&inst, OPT_NODE_LIMIT)? };
            let stretch = spanner_stretch(&opt.network, &inst.host);
            println!("{}", to_json(&json!({ "opt": OptFile::from(&opt), "stretch": stretch })));
            Ok(OK)
        }
        Cmd::Gen { family, n, alpha, variant } => {
            let Some(alpha) = alpha.as_rational() else { bail!("alpha must be finite") };
            let f = generate(*family, *n, alpha, *variant)?;
            println!("{}", to_json(&FixtureFile::from(&f)));
            Ok(OK)
        }
        Cmd::VerifyFixture { bundle } => {
            let f = read_json::<FixtureFile>(bundle)?.to_fixture()?;
            let report = verify_fixture(&f, &VerifyOptions { check: opts, ..Default::default() })?;
            println!("{}", to_json(&report));
            let stability = report.check("stability").is_some_and(|c| c.passed);
            Ok(if report.passed() {
                OK
            } else if report.inconclusive {
                INCONCLUSIVE
            } else if !stability {
                UNSTABLE
            } else {
                VIOLATION
            })
        }
        Cmd::Dynamics { instance, from, concept, policy, max_steps } => {
            let inst = read_instance(instance)?;
            let g0 = match from {
                Some(p) => load_network(p, inst.n())?,
                None => Network::complete(inst.n()),
            };
            let t = run_dynamics(&inst, &g0, *concept, *policy, *max_steps, &opts)?;
            println!("{}", to_json(&json!({ "trace": TraceFile::new(&inst, &t), "last": NetworkFile::from(&t.last) })));
            Ok(match t.outcome {
                Outcome::Equilibrium => OK,
                Outcome::CycleDetected { .. } => UNSTABLE,
                Outcome::BudgetExhausted { .. } => INCONCLUSIVE,
            })
        }
        Cmd::Poa { instance, concept, seed } => {
            let inst = read_instance(instance)?;
            let mut poa = PoaOptions { seed: *seed, ..Default::default() };
            poa.enumerate.budget = opts.budget;
            let r = poa_run(&inst, *concept, &poa)?;
            let checks = bound_checks(&inst, &r);
            println!("{}", to_json(&json!({ "point": r.point, "checks": checks })));
            Ok(if checks.iter().any(|c| c.is_violation()) {
                VIOLATION
            } else if !r.point.complete {
                INCONCLUSIVE
            } else {
                OK
            })
        }
        Cmd::Sweep { config, jsonl } => {
            let cfg: SweepConfig = read_json(config)?;
            let report = poa_sweep(&cfg)?;
            print!("{}", if *jsonl { report.to_json_lines() } else { report.to_table() });
            Ok(if report.violation.is_some() { VIOLATION } else { OK })
        }
        Cmd::Props { seed, trials } => {
            if *trials == 0 {
                bail!("--trials must be positive");
            }
            let report = property_suite(&PropsConfig { seed: *seed, trials: *trials });
            print!("{}", report.to_text());
            Ok(if report.passed() { OK } else { VIOLATION })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { INPUT_ERROR } else { OK });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}
