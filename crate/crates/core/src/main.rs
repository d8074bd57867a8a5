use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use stein::bounds::THEOREMS;
use stein::harness::checks::{coupling_check, COUPLINGS};
use stein::harness::config::{Document, ExperimentConfig, OracleSpec, Params};
use stein::harness::dispatch::evaluate_bound;
use stein::harness::trend::{trend_report, FAMILIES};
use stein::harness::{self, catalog::CATALOG, exit_code};
use stein::{Result, SteinError};

#[derive(Parser)]
#[command(name = "stein", version, about = "Stein's method error bounds checked against exact and Monte Carlo oracles")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one bound calculator and print its report as JSON
    Bound {
        #[arg(long)]
        theorem: String,
        /// key = value file (a [params] section or bare keys), or JSON
        #[arg(long)]
        params: Option<PathBuf>,
        /// extra key=value inputs, applied after the file
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Run one experiment and write its CSV row
    Verify {
        #[arg(long)]
        experiment: Option<String>,
        /// experiment config file; command-line flags override it
        #[arg(long)]
        config: Option<PathBuf>,
        /// Monte Carlo draws; implies the Monte Carlo oracle
        #[arg(long)]
        samples: Option<usize>,
        /// exact or monte_carlo
        #[arg(long)]
        oracle: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// fill the runtime_ms column
        #[arg(long)]
        timings: bool,
        /// print the full outcome, including the bound report, as JSON
        #[arg(long)]
        json: bool,
    },
    /// Run every registered experiment (or those matching a glob)
    Suite {
        #[arg(long)]
        filter: Option<String>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "suite_out")]
        out: PathBuf,
        #[arg(long)]
        timings: bool,
    },
    /// Monte Carlo check of a coupling's defining identity
    CouplingCheck {
        #[arg(long)]
        coupling: String,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Bound and distance over a size grid, with fitted log-log slopes
    Trend {
        #[arg(long)]
        family: String,
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List registered experiments, theorems, couplings and trend families
    List,
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| SteinError::Config(format!("cannot read {}: {e}", path.display())))
}

// a closed pipe (`stein list | head`) is not an error worth a panic
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).unwrap_or_else(|e| format!("{{\"error\": \"{e}\"}}"))
}

fn bound(theorem: &str, params: Option<&PathBuf>, set: &[String]) -> Result<u8> {
    let mut p = Params::new();
    if let Some(path) = params {
        let doc = Document::parse(&read(path)?)?;
        for name in ["", "params"] {
            if let Some(sec) = doc.section(name) {
                for (k, v) in &sec.0 {
                    p.set(k, v.clone());
                }
            }
        }
    }
    for kv in set {
        p.apply_override(kv)?;
    }
    let rep = evaluate_bound(theorem, &p)?;
    emit(&format!("{}\n", to_json(&rep)));
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn verify(
    experiment: Option<String>,
    config: Option<&PathBuf>,
    samples: Option<usize>,
    oracle: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    set: &[String],
    timings: bool,
    json: bool,
) -> Result<u8> {
    let mut cfg = match (config, &experiment) {
        (Some(path), _) => ExperimentConfig::from_text(&read(path)?)?,
        (None, Some(id)) => {
            let s = seed.ok_or_else(|| SteinError::Config("--seed is mandatory".into()))?;
            ExperimentConfig::new(id, s)
        }
        (None, None) => return Err(SteinError::Config("give --experiment or --config".into())),
    };
    if let Some(id) = experiment {
        cfg.experiment_id = id;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    for kv in set {
        cfg.params.apply_override(kv)?;
    }
    match oracle.as_deref() {
        None => {}
        Some("exact") => cfg.oracle = Some(OracleSpec::Exact),
        Some("monte_carlo") => {}
        Some(o) => return Err(SteinError::Config(format!("oracle must be 'exact' or 'monte_carlo', got '{o}'"))),
    }
    if oracle.as_deref() == Some("monte_carlo") || samples.is_some() {
        if cfg.oracle == Some(OracleSpec::Exact) && samples.is_some() {
            return Err(SteinError::Config("--samples conflicts with the exact oracle".into()));
        }
        let n = samples.or(match cfg.oracle {
            Some(OracleSpec::MonteCarlo { n_draws }) => Some(n_draws),
            _ => None,
        });
        let n = match n {
            Some(n) => n,
            None => harness::catalog::find(&cfg.experiment_id).and_then(|d| d.mc_draws).unwrap_or(100_000),
        };
        cfg.oracle = Some(OracleSpec::MonteCarlo { n_draws: n });
    }
    if out.is_some() {
        cfg.out = out;
    }
    let rec = harness::run_experiment(&cfg, timings)?;
    let text = harness::csv_text(std::slice::from_ref(&rec));
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &text)?;
        }
        None => emit(&text),
    }
    if json {
        eprintln!("{}", to_json(&rec));
    }
    let sound = rec.sound();
    eprintln!("{}: {}", rec.experiment_id, if sound { "PASS" } else { "FAIL" });
    Ok(if sound { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Bound { theorem, params, set } => bound(&theorem, params.as_ref(), &set),
        Cmd::Verify { experiment, config, samples, oracle, seed, out, set, timings, json } => {
            verify(experiment, config.as_ref(), samples, oracle, seed, out, &set, timings, json)
        }
        Cmd::Suite { filter, seed, out, timings } => {
            let res = harness::run_suite(filter.as_deref(), seed, timings)?;
            res.write(&out)?;
            for r in &res.records {
                if let Err(e) = &r.outcome {
                    eprintln!("{}: error: {e}", r.experiment_id);
                }
            }
            emit(&format!("{} experiments, {} PASS, {} FAIL; wrote {}\n", res.records.len(), res.passed(), res.failed(), out.display()));
            Ok(if res.all_sound() { 0 } else { 1 })
        }
        Cmd::CouplingCheck { coupling, samples, seed, json } => {
            let rep = coupling_check(&coupling, samples, seed)?;
            if json {
                emit(&format!("{}\n", to_json(&rep)));
            } else {
                for line in rep.lines() {
                    emit(&format!("{line}\n"));
                }
            }
            emit(&format!("{coupling}: {}\n", if rep.pass() { "PASS" } else { "FAIL" }));
            Ok(if rep.pass() { 0 } else { 1 })
        }
        Cmd::Trend { family, sizes, out, seed } => {
            let rep = trend_report(&family, &sizes, seed)?;
            match &out {
                Some(path) => std::fs::write(path, rep.csv())?,
                None => emit(&rep.csv()),
            }
            let fmt = |s: Option<f64>| s.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into());
            eprintln!("{family}: log-log slope of bound {}, of distance {}", fmt(rep.bound_slope), fmt(rep.distance_slope));
            Ok(0)
        }
        Cmd::List => {
            emit("experiments:\n");
            for d in CATALOG {
                let oracle = match (d.exact, d.mc_draws) {
                    (true, Some(_)) => "exact|monte_carlo",
                    (true, None) => "exact",
                    (false, _) => "monte_carlo",
                };
                emit(&format!("  {:<28} {:<26} {:<18} {} [{}]\n", d.id, d.theorem, oracle, d.description, d.defaults));
            }
            emit("theorems:\n");
            for (id, inputs) in THEOREMS {
                emit(&format!("  {id:<28} {inputs}\n"));
            }
            emit("couplings:\n");
            for (id, desc) in COUPLINGS {
                emit(&format!("  {id:<28} {desc}\n"));
            }
            emit(&format!("trend families: {}\n", FAMILIES.join(", ")));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
