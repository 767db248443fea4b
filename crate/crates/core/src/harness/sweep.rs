//! Seeded sweeps over instance families with per-row bound checks.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{generate, Family};
use crate::error::Error;
use crate::host::Instance;
use crate::io::InstanceFile;
use crate::network::NetworkFile;
use crate::scalar::Scalar;
use crate::stability::Concept;

use super::poa::{bound_checks, poa_run, BoundCheck, PoaOptions, PoaPoint};
use super::random::{random_instance, RandomModel};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepFamily {
    Fixture {
        fixture: Family,
        #[serde(default)]
        variant: Option<Concept>,
    },
    Random {
        model: RandomModel,
        /// Instances per `(n, α)` cell.
        #[serde(default = "one")]
        instances: usize,
    },
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub family: SweepFamily,
    pub n_min: usize,
    pub n_max: usize,
    pub alphas: Vec<Scalar>,
    /// Defaults to the fixture's own concept; required for random families.
    #[serde(default)]
    pub concept: Option<Concept>,
    /// Required for random families.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub options: PoaOptions,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.n_min < 2 || self.n_min > self.n_max {
            return Err(Error::Config(format!("bad node range {}..={}", self.n_min, self.n_max)));
        }
        if self.alphas.is_empty() {
            return Err(Error::Config("no alpha values".into()));
        }
        if self.alphas.iter().any(|a| a.is_infinite() || a.is_zero()) {
            return Err(Error::Config("alpha values must be positive and finite".into()));
        }
        if let SweepFamily::Random { instances, .. } = &self.family {
            if self.seed.is_none() {
                return Err(Error::Config("random families need a seed".into()));
            }
            if self.concept.is_none() {
                return Err(Error::Config("random families need a concept".into()));
            }
            if *instances == 0 {
                return Err(Error::Config("instances must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_seed: Option<u64>,
    pub metric: bool,
    #[serde(flatten)]
    pub point: PoaPoint,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_ratio: Option<Scalar>,
    pub checks: Vec<BoundCheck>,
}

impl SweepRow {
    pub fn violations(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| c.is_violation())
    }
}

/// Everything needed to reproduce a violated bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub row: usize,
    pub instance: InstanceFile,
    pub concept: Concept,
    pub violated: Vec<BoundCheck>,
    pub stable: Vec<NetworkFile>,
    pub opt: NetworkFile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Set when a proven bound failed. Rows after the failing one are dropped.
    pub violation: Option<Diagnostic>,
}

/// Seed of instance `i` at size `n`, independent of α so that every α in a
/// sweep sees the same hosts.
pub fn instance_seed(seed: u64, n: usize, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((n as u64) << 32) ^ i as u64
}

struct Job {
    family: String,
    seed: Option<u64>,
    instance: Instance,
    concept: Concept,
    expected_ratio: Option<Scalar>,
}

fn jobs(cfg: &SweepConfig) -> Result<Vec<Job>, Error> {
    let mut out = Vec::new();
    for n in cfg.n_min..=cfg.n_max {
        for alpha in &cfg.alphas {
            let a = alpha.as_rational().expect("validated finite");
            match &cfg.family {
                SweepFamily::Fixture { fixture, variant } => {
                    let variant = variant.or(cfg.concept).unwrap_or(Concept::Ps);
                    let f = generate(*fixture, n, a, variant)?;
                    out.push(Job {
                        family: serde_json::to_value(fixture).unwrap().as_str().unwrap_or("fixture").to_string(),
                        seed: None,
                        concept: cfg.concept.unwrap_or(f.concept),
                        expected_ratio: (!f.asymptotic_only).then(|| f.expected_ratio.clone()),
                        instance: f.instance,
                    });
                }
                SweepFamily::Random { model, instances } => {
                    for i in 0..*instances {
                        let s = instance_seed(cfg.seed.expect("validated"), n, i);
                        out.push(Job {
                            family: model.name().to_string(),
                            seed: Some(s),
                            instance: random_instance(n, model, a, s)?,
                            concept: cfg.concept.expect("validated"),
                            expected_ratio: None,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn poa_sweep(cfg: &SweepConfig) -> Result<SweepReport, Error> {
    cfg.validate()?;
    let jobs = jobs(cfg)?;
    let results: Vec<Result<(SweepRow, Option<Diagnostic>), Error>> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, job)| {
            let mut opts = cfg.options;
            opts.seed = job.seed.unwrap_or(opts.seed);
            let run = poa_run(&job.instance, job.concept, &opts)?;
            let checks = bound_checks(&job.instance, &run);
            let violated: Vec<BoundCheck> = checks.iter().filter(|c| c.is_violation()).cloned().collect();
            let diagnostic = (!violated.is_empty()).then(|| Diagnostic {
                row: i,
                instance: InstanceFile::from(&job.instance),
                concept: job.concept,
                violated,
                stable: run.stable.iter().map(NetworkFile::from).collect(),
                opt: NetworkFile::from(&run.opt.network),
            });
            let row = SweepRow {
                family: job.family.clone(),
                instance_seed: job.seed,
                metric: job.instance.is_metric(),
                point: run.point,
                expected_ratio: job.expected_ratio.clone(),
                checks,
            };
            Ok((row, diagnostic))
        })
        .collect();
    let mut rows = Vec::new();
    for r in results {
        let (row, diagnostic) = r?;
        rows.push(row);
        if diagnostic.is_some() {
            return Ok(SweepReport { rows, violation: diagnostic });
        }
    }
    Ok(SweepReport { rows, violation: None })
}

fn opt_str(s: &Option<Scalar>) -> String {
    s.as_ref().map_or("-".into(), |s| s.to_string())
}

impl SweepReport {
    /// Plain-text table, one line per row.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<16} {:>3} {:>6} {:<4} {:>6} {:>12} {:>12} {:>10} {:>10} {:<5} bounds",
            "family", "n", "alpha", "conc", "stable", "worst", "opt", "ratio", "expected", "full"
        );
        for r in &self.rows {
            let p = &r.point;
            let bounds = if r.checks.iter().all(|c| c.holds) {
                "ok".to_string()
            } else {
                r.checks
                    .iter()
                    .filter(|c| !c.holds)
                    .map(|c| if c.advisory { format!("({})", c.name) } else { format!("VIOLATED {}", c.name) })
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let opt = format!("{}{}", p.opt_cost, if p.opt_proven { "" } else { "*" });
            let _ = writeln!(
                out,
                "{:<16} {:>3} {:>6} {:<4} {:>6} {:>12} {:>12} {:>10} {:>10} {:<5} {}",
                r.family,
                p.n,
                p.alpha.to_string(),
                p.concept.to_string(),
                p.stable_found,
                opt_str(&p.worst_cost),
                opt,
                opt_str(&p.ratio),
                opt_str(&r.expected_ratio),
                p.complete,
                bounds
            );
        }
        if let Some(d) = &self.violation {
            let names: Vec<&str> = d.violated.iter().map(|c| c.name.as_str()).collect();
            let _ = writeln!(out, "aborted at row {}: {}", d.row, names.join(", "));
        }
        out
    }

    /// One JSON object per row, then the diagnostic if any.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&serde_json::to_string(r).expect("rows serialize"));
            out.push('\n');
        }
        if let Some(d) = &self.violation {
            out.push_str(&serde_json::to_string(&serde_json::json!({ "violation": d })).expect("serializes"));
            out.push('\n');
        }
        out
    }
}
