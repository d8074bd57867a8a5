//! Experiment runner: instantiate a model, evaluate its bound, measure the distance with an
//! oracle, and record whether the bound held.

pub mod catalog;
pub mod checks;
pub mod config;
pub mod dispatch;
pub mod trend;

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::BoundReport;
use crate::dist::RngStream;
use crate::error::{Result, SteinError};
use catalog::{ExperimentDef, Oracle, CATALOG};
use config::{ExperimentConfig, OracleSpec};

/// Slack in the soundness comparison, absorbing last-digit rounding.
pub const SOUND_SLACK: f64 = 1e-12;

pub const CSV_HEADER: &str = "experiment_id,metric,bound,distance,ci_low,ci_high,sound,seed,runtime_ms";

/// What an experiment measured, before it is stamped with seed and timing.
#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub metric: String,
    /// the bound's upper edge (its value when all inputs are exact)
    pub bound: f64,
    pub distance: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub exact: bool,
    pub notes: Vec<String>,
    pub report: Option<BoundReport>,
}

impl Outcome {
    pub fn sound(&self) -> bool {
        self.ci_high <= self.bound + SOUND_SLACK
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub experiment_id: String,
    pub seed: u64,
    pub outcome: std::result::Result<Outcome, String>,
    pub runtime_ms: Option<u128>,
}

impl RunRecord {
    pub fn sound(&self) -> bool {
        matches!(&self.outcome, Ok(o) if o.sound())
    }

    /// One CSV line without the terminator. Errors keep the row with empty numeric fields.
    pub fn csv_row(&self) -> String {
        let rt = self.runtime_ms.map(|m| m.to_string()).unwrap_or_default();
        match &self.outcome {
            Ok(o) => format!(
                "{},{},{},{},{},{},{},{},{}",
                self.experiment_id,
                o.metric,
                o.bound,
                o.distance,
                o.ci_low,
                o.ci_high,
                o.sound(),
                self.seed,
                rt
            ),
            Err(_) => format!("{},error,,,,,false,{},{}", self.experiment_id, self.seed, rt),
        }
    }
}

pub fn csv_text(records: &[RunRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// 64-bit FNV-1a, used to derive each experiment's stream id from its name so results do not
/// depend on which other experiments ran.
pub fn stream_id(experiment_id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in experiment_id.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn resolve(def: &ExperimentDef, spec: Option<OracleSpec>) -> Oracle {
    match spec {
        None => def.default_oracle(),
        Some(OracleSpec::Exact) => Oracle::Exact,
        Some(OracleSpec::MonteCarlo { n_draws }) => Oracle::MonteCarlo(n_draws),
    }
}

fn lookup(id: &str) -> Result<&'static ExperimentDef> {
    catalog::find(id).ok_or_else(|| {
        SteinError::Config(format!(
            "unknown experiment '{id}'; registered: {}",
            CATALOG.iter().map(|d| d.id).collect::<Vec<_>>().join(", ")
        ))
    })
}

/// Run one configured experiment. Configuration problems (unknown id or parameter, an
/// oracle unavailable at the requested size) are returned as errors; model failures too.
pub fn run_experiment(cfg: &ExperimentConfig, timings: bool) -> Result<RunRecord> {
    let def = lookup(&cfg.experiment_id)?;
    if let Some(t) = &cfg.theorem_id {
        if t != def.theorem {
            return Err(SteinError::Config(format!("{} is registered with theorem '{}', not '{t}'", def.id, def.theorem)));
        }
    }
    let mut rng = RngStream::new(cfg.seed, stream_id(def.id));
    let start = Instant::now();
    let outcome = def.run(&cfg.params, resolve(def, cfg.oracle), &mut rng)?;
    Ok(RunRecord {
        experiment_id: def.id.to_string(),
        seed: cfg.seed,
        outcome: Ok(outcome),
        runtime_ms: timings.then(|| start.elapsed().as_millis()),
    })
}

pub fn matching(filter: Option<&str>) -> Result<Vec<&'static ExperimentDef>> {
    let pat = match filter {
        None => return Ok(CATALOG.iter().collect()),
        Some(f) => glob::Pattern::new(f).map_err(|e| SteinError::Config(format!("bad filter '{f}': {e}")))?,
    };
    Ok(CATALOG.iter().filter(|d| pat.matches(d.id)).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub seed: u64,
    pub records: Vec<RunRecord>,
}

impl SuiteResult {
    pub fn passed(&self) -> usize {
        self.records.iter().filter(|r| r.sound()).count()
    }
    pub fn failed(&self) -> usize {
        self.records.len() - self.passed()
    }
    pub fn all_sound(&self) -> bool {
        self.failed() == 0
    }

    pub fn csv(&self) -> String {
        csv_text(&self.records)
    }

    pub fn summary_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Suite summary\n");
        let _ = writeln!(s, "seed {}: {} experiments, {} PASS, {} FAIL\n", self.seed, self.records.len(), self.passed(), self.failed());
        let _ = writeln!(s, "| experiment | metric | bound | distance | ci | verdict | notes |");
        let _ = writeln!(s, "|---|---|---|---|---|---|---|");
        for r in &self.records {
            match &r.outcome {
                Ok(o) => {
                    let ci = if o.exact { "exact".to_string() } else { format!("[{:.4e}, {:.4e}]", o.ci_low, o.ci_high) };
                    let _ = writeln!(
                        s,
                        "| {} | {} | {:.6e} | {:.6e} | {} | {} | {} |",
                        r.experiment_id,
                        o.metric,
                        o.bound,
                        o.distance,
                        ci,
                        if o.sound() { "PASS" } else { "FAIL" },
                        o.notes.join("; ")
                    );
                }
                Err(e) => {
                    let _ = writeln!(s, "| {} | error | | | | FAIL | {} |", r.experiment_id, e.replace('|', "/"));
                }
            }
        }
        s
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("suite.csv"), self.csv())?;
        std::fs::write(dir.join("summary.md"), self.summary_markdown())?;
        Ok(())
    }
}

/// Run every registered experiment matching `filter` (a glob over ids) at its defaults.
/// Experiments run in parallel, each on its own stream, and are merged in catalog order.
pub fn run_suite(filter: Option<&str>, seed: u64, timings: bool) -> Result<SuiteResult> {
    let defs = matching(filter)?;
    let records = defs
        .par_iter()
        .map(|def| {
            let cfg = ExperimentConfig::new(def.id, seed);
            match run_experiment(&cfg, timings) {
                Ok(r) => r,
                Err(e) => RunRecord { experiment_id: def.id.to_string(), seed, outcome: Err(e.to_string()), runtime_ms: None },
            }
        })
        .collect();
    Ok(SuiteResult { seed, records })
}

/// Process exit status for an error: 2 when the request itself was unusable, 1 when a run
/// failed after it started.
pub fn exit_code(err: &SteinError) -> i32 {
    match err {
        SteinError::ModelBug(_) | SteinError::Quadrature(_) | SteinError::Unknown(_) => 1,
        _ => 2,
    }
}
