use std::process::Command;

use stein::bounds::{self, Estimate, THEOREMS};
use stein::dist::{FinitePmf, RngStream};
use stein::harness::catalog::{find, CATALOG};
use stein::harness::config::{Document, ExperimentConfig, OracleSpec, ParamValue, Params};
use stein::harness::dispatch::evaluate_bound;
use stein::harness::trend::{head_runs_tuned_k, loglog_slope, trend_report};
use stein::harness::*;
use stein::metrics::dtv_discrete;
use stein::models::antivoter::{antivoter_complete_stationary, AntiVoter, RegularGraph};
use stein::models::er::DegreeMode;
use stein::SteinError;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn params(text: &str) -> Params {
    let mut p = Params::new();
    for kv in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        p.apply_override(kv).unwrap();
    }
    p
}

fn run(id: &str, seed: u64) -> Outcome {
    run_experiment(&ExperimentConfig::new(id, seed), false).unwrap().outcome.unwrap()
}

#[test]
fn config_text_and_json() {
    let cfg = ExperimentConfig::from_text(
        "# coupon example\n[experiment]\nid = coupon\nseed = 9   # fixed\noracle = exact\n\n[params]\nn = 8\nk = 16\n",
    )
    .unwrap();
    assert_eq!(cfg.experiment_id, "coupon");
    assert_eq!(cfg.seed, 9);
    assert_eq!(cfg.oracle, Some(OracleSpec::Exact));
    assert_eq!(cfg.params.usize("k").unwrap(), 16);

    let json = ExperimentConfig::from_text(r#"{"experiment": {"id": "head_runs", "seed": 3, "samples": 5000}, "params": {"n": 30}}"#).unwrap();
    assert_eq!(json.oracle, Some(OracleSpec::MonteCarlo { n_draws: 5000 }));
    assert_eq!(json.params.usize("n").unwrap(), 30);

    let doc = Document::parse("[params]\np = 0.1, 0.2,0.3\nmode = at_least\n").unwrap();
    let p = doc.section("params").unwrap();
    assert_eq!(p.list("p").unwrap(), vec![0.1, 0.2, 0.3]);
    assert_eq!(p.text("mode").unwrap(), "at_least");
    assert!(matches!(ParamValue::parse(" 2.5 "), ParamValue::Num(x) if x == 2.5));
}

#[test]
fn config_errors() {
    let bad = [
        "[experiment]\nid = coupon\n",
        "[experiment]\nid = coupon\nseed = -1\n",
        "[experiment]\nid = coupon\nseed = 1.5\n",
        "[experiment]\nid = coupon\nseed = 1\nseed = 2\n",
        "[experiment]\nid = coupon\nseed = 1\nflavour = x\n",
        "[experiment]\nid = coupon\nseed = 1\n[extras]\na = 1\n",
        "[experiment]\nid = coupon\nseed = 1\noracle = psychic\n",
        "[experiment\nid = coupon\n",
        "[params]\nn = 3\n",
        "[experiment]\njust words\n",
        "{\"experiment\": [1, 2]}",
        "{not json",
    ];
    for text in bad {
        assert!(matches!(ExperimentConfig::from_text(text), Err(SteinError::Config(_))), "accepted: {text:?}");
    }
    let mut p = Params::new();
    assert!(p.apply_override("novalue").is_err());
    p.apply_override("n=2.5").unwrap();
    assert!(p.usize("n").is_err());
    assert!(p.f64("missing").is_err());
}

#[test]
fn run_rejects_bad_requests() {
    let mut cfg = ExperimentConfig::new("no_such_experiment", 1);
    assert!(matches!(run_experiment(&cfg, false), Err(SteinError::Config(_))));

    cfg = ExperimentConfig::new("fixed_points", 1);
    cfg.params.apply_override("colour=3").unwrap();
    assert!(matches!(run_experiment(&cfg, false), Err(SteinError::Config(_))));

    cfg = ExperimentConfig::new("fixed_points", 1);
    cfg.theorem_id = Some("tv_coupon".into());
    assert!(matches!(run_experiment(&cfg, false), Err(SteinError::Config(_))));

    // exact enumeration of G(n,p) is capped; the cap is reported, not silently switched
    cfg = ExperimentConfig::new("er_triangles_p01", 1);
    cfg.params.apply_override("n=9").unwrap();
    cfg.oracle = Some(OracleSpec::Exact);
    let e = run_experiment(&cfg, false).unwrap_err();
    assert!(matches!(e, SteinError::OracleInfeasible(_)));
    assert_eq!(exit_code(&e), 2);

    cfg = ExperimentConfig::new("er_isolated_normal", 1);
    cfg.oracle = Some(OracleSpec::Exact);
    assert!(matches!(run_experiment(&cfg, false), Err(SteinError::OracleInfeasible(_))));

    cfg = ExperimentConfig::new("fixed_points", 1);
    cfg.oracle = Some(OracleSpec::MonteCarlo { n_draws: 10 });
    assert!(matches!(run_experiment(&cfg, false), Err(SteinError::InsufficientSamples { .. })));

    assert_eq!(exit_code(&SteinError::ModelBug("x".into())), 1);
    assert_eq!(exit_code(&SteinError::Config("x".into())), 2);
}

#[test]
fn worked_examples() {
    let fp = run("fixed_points", 1);
    assert!(close(fp.bound, 0.4, 1e-15) && fp.sound() && fp.exact && fp.distance > 0.0);
    let ua = run("uniform_attachment_n100", 1);
    assert!(close(ua.bound, 2.0 * (100f64.ln() + 1.0) / 100.0, 1e-15));
    assert!(close(ua.bound, 0.1121, 1e-4));
    let coupon = run("coupon", 1);
    assert!(coupon.sound() && coupon.distance < coupon.bound);
    let geo = run("geometric_exponential_p020", 1);
    assert!(close(geo.bound, 0.2, 1e-15) && geo.sound());
}

#[test]
fn every_experiment_is_sound_at_defaults() {
    let res = run_suite(None, 1, false).unwrap();
    assert_eq!(res.records.len(), CATALOG.len());
    for r in &res.records {
        assert!(r.sound(), "{}: {:?}", r.experiment_id, r.outcome);
    }
    // records come back in catalog order despite the parallel run
    let ids: Vec<&str> = res.records.iter().map(|r| r.experiment_id.as_str()).collect();
    assert_eq!(ids, CATALOG.iter().map(|d| d.id).collect::<Vec<_>>());
}

#[test]
fn monte_carlo_oracles_are_sound() {
    for def in CATALOG.iter().filter(|d| d.exact && d.mc_draws.is_some()) {
        let mut cfg = ExperimentConfig::new(def.id, 2);
        cfg.oracle = Some(OracleSpec::MonteCarlo { n_draws: 20_000 });
        let o = run_experiment(&cfg, false).unwrap().outcome.unwrap();
        assert!(!o.exact && o.ci_low <= o.distance && o.distance <= o.ci_high, "{}", def.id);
        // a wide interval may straddle a small bound (er_triangles_p01 at p³ = 1e-3); what a
        // Monte Carlo oracle can refute is a bound below the whole interval
        assert!(o.ci_low <= o.bound, "{}: ci_low {} > bound {}", def.id, o.ci_low, o.bound);
    }
}

#[test]
fn suite_csv_contract() {
    let a = run_suite(Some("binomial_*"), 42, false).unwrap();
    let b = run_suite(Some("binomial_*"), 42, false).unwrap();
    assert_eq!(a.csv(), b.csv());
    assert_eq!(a.records.len(), 5);
    let text = a.csv();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER);
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 9, "{line}");
        assert_eq!(cols[6], "true");
        assert_eq!(cols[7], "42");
        assert_eq!(cols[8], "");
    }
    assert!(!text.contains('\r'));

    let empty = run_suite(Some("zzz*"), 42, false).unwrap();
    assert_eq!(empty.csv(), format!("{CSV_HEADER}\n"));
    assert!(run_suite(Some("[unclosed"), 42, false).is_err());

    let timed = run_suite(Some("fixed_points"), 42, true).unwrap();
    assert!(timed.records[0].runtime_ms.is_some());

    let err = RunRecord { experiment_id: "x".into(), seed: 3, outcome: Err("boom".into()), runtime_ms: None };
    assert_eq!(err.csv_row(), "x,error,,,,,false,3,");
    assert!(!err.sound());
}

#[test]
fn seeds_change_only_monte_carlo_rows() {
    let a = run_suite(Some("head_runs*"), 1, false).unwrap();
    let b = run_suite(Some("head_runs*"), 2, false).unwrap();
    assert!(a.records.iter().any(|r| r.outcome.as_ref().unwrap().exact));
    assert!(a.records.iter().any(|r| !r.outcome.as_ref().unwrap().exact));
    for (ra, rb) in a.records.iter().zip(&b.records) {
        let (oa, ob) = (ra.outcome.as_ref().unwrap(), rb.outcome.as_ref().unwrap());
        if oa.exact {
            assert_eq!(oa.distance, ob.distance, "{}", ra.experiment_id);
        }
    }
    assert_ne!(a.csv(), b.csv());
    assert_ne!(stream_id("a"), stream_id("b"));
}

#[test]
fn suite_writes_outputs() {
    let dir = std::env::temp_dir().join(format!("stein-harness-{}", std::process::id()));
    let res = run_suite(Some("coupon"), 5, false).unwrap();
    res.write(&dir).unwrap();
    assert_eq!(std::fs::read_to_string(dir.join("suite.csv")).unwrap(), res.csv());
    let md = std::fs::read_to_string(dir.join("summary.md")).unwrap();
    assert!(md.contains("| coupon | dTV |") && md.contains("1 PASS, 0 FAIL"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn dispatch_matches_direct_calls() {
    let cases: Vec<(&str, &str, f64)> = vec![
        ("be_iid", "abs3=1.5; n=100", bounds::be_iid(1.5, 100).unwrap().value),
        ("wass_iid_sum", "abs3=1,1,1,1; m4=1,1,1,1", bounds::wass_iid_sum(&[1.0; 4], &[1.0; 4]).unwrap().value),
        ("wass_dependency", "abs3=1,1; m4=1,1; D=2; sigma=1.5", bounds::wass_dependency(&[1.0; 2], &[1.0; 2], 2.0, 1.5).unwrap().value),
        ("wass_triangles", "n=10; p=0.5", bounds::wass_triangles(10, 0.5).unwrap().value),
        ("wass_exch_pair", "a=0.1; var_cond_sq=0.01; abs3_diff=0.02", bounds::wass_exch_pair(0.1, 0.01, 0.02).unwrap().value),
        ("wass_antivoter", "n=8; r=7; sigma2=0.5; var_q=2", bounds::wass_antivoter(8, 7, 0.5, 2.0).unwrap().value),
        ("wass_size_bias", "mu=3; sigma2=2; var_cond=0.1; sq_diff=0.5", bounds::wass_size_bias(3.0, 2.0, 0.1, 0.5).unwrap().value),
        ("wass_zero_bias", "e_abs_diff=0.1", bounds::wass_zero_bias(0.1).unwrap().value),
        ("kolm_zero_bias", "delta=0.2", bounds::kolm_zero_bias(0.2).unwrap().value),
        ("kolm_exch_pair", "a=0.1; var_cond_sq=0.01; delta=0.2", bounds::kolm_exch_pair(0.1, 0.01, 0.2).unwrap().value),
        ("tv_small_numbers", "p=0.1,0.2,0.05", bounds::tv_small_numbers(&[0.1, 0.2, 0.05]).unwrap().value),
        ("tv_head_runs", "n=20; p=0.5; k=3", bounds::tv_head_runs(20, 0.5, 3).unwrap().value),
        ("tv_size_bias_poisson", "lambda=2; e_abs=0.3", bounds::tv_size_bias_poisson(2.0, 0.3).unwrap().value),
        ("tv_size_bias_increasing", "lambda=2; variance=2.2; sum_p2=0.1", bounds::tv_size_bias_increasing(2.0, 2.2, 0.1).unwrap().value),
        ("tv_triangles", "n=6; p=0.3", bounds::tv_subgraph(0.3, &bounds::SubgraphDescriptor::triangle(6)).unwrap().value),
        ("tv_kcycles", "n=7; p=0.3; k=4", bounds::tv_subgraph(0.3, &bounds::SubgraphDescriptor::kcycle(7, 4).unwrap()).unwrap().value),
        ("tv_size_bias_decreasing", "lambda=2; variance=1.8", bounds::tv_size_bias_decreasing(2.0, 1.8).unwrap().value),
        ("tv_hypergeometric", "N=20; n=5; m=6", bounds::tv_hypergeometric(20, 5, 6).unwrap().value),
        ("tv_coupon", "n=8; k=16", bounds::tv_coupon(8, 16).unwrap().value),
        ("tv_exch_pair_poisson", "lambda=1; c=1; cond_up=0.1; cond_down=0.05", bounds::tv_exch_pair_poisson(1.0, 1.0, 0.1, 0.05).unwrap().value),
        ("tv_fixed_points", "n=10", 0.4),
        ("tv_degree_vertices", "n=6; p=0.1; d=3; mode=at_least", bounds::tv_degree_vertices(6, 0.1, 3, DegreeMode::AtLeast).unwrap().value),
        ("wass_equilibrium", "e_abs=0.25", bounds::wass_equilibrium(0.25).unwrap().value),
        ("wass_geometric_sum", "p=0.2; mu2=1; e_nm=0; e_xme=0.5", 0.2),
        ("tv_discrete_equilibrium", "p=0.5; e_abs=0.1", bounds::tv_discrete_equilibrium(0.5, 0.1).unwrap().value),
        ("tv_uniform_attachment", "n=100", 2.0 * (100f64.ln() + 1.0) / 100.0),
    ];
    assert_eq!(cases.len(), THEOREMS.len());
    for (id, text, want) in &cases {
        let got = evaluate_bound(id, &params(text)).unwrap_or_else(|e| panic!("{id}: {e}"));
        assert!(close(got.value, *want, 1e-12 * want.abs().max(1.0)), "{id}: {} vs {want}", got.value);
    }
    for (id, _) in THEOREMS {
        assert!(cases.iter().any(|c| c.0 == *id), "{id} untested");
    }
    // an estimated input carries its radius into the report
    let rep = evaluate_bound("wass_zero_bias", &params("e_abs_diff=0.1; e_abs_diff_ci=0.01")).unwrap();
    assert!(rep.ci_radius > 0.0);
    assert!(close(rep.value, bounds::wass_zero_bias(Estimate::mc(0.1, 0.01)).unwrap().value, 1e-15));
    assert!(matches!(evaluate_bound("tv_degree_vertices", &params("n=6; p=0.1; d=3; mode=sideways")), Err(SteinError::Config(_))));
    assert!(matches!(evaluate_bound("nonsense", &Params::new()), Err(SteinError::Config(_))));
    assert!(evaluate_bound("tv_coupon", &params("n=8")).is_err());
}

#[test]
fn trend_grids() {
    for bad in [vec![10u64, 20], vec![10, 10, 20], vec![0, 10, 20]] {
        assert!(matches!(trend_report("constant", &bad, 0), Err(SteinError::Config(_))));
    }
    assert!(trend_report("weather", &[1, 2, 3], 0).is_err());
    let c = trend_report("constant", &[10, 20, 40], 0).unwrap();
    assert_eq!(c.bound_slope, Some(0.0));
    assert_eq!(c.csv(), "size,bound,distance\n10,1,1\n20,1,1\n40,1,1\n");

    let fp = trend_report("fixed_points", &[8, 12, 16], 0).unwrap();
    assert!(close(fp.bound_slope.unwrap(), -1.0, 1e-9));
    let ua = trend_report("uniform_attachment", &[50, 100, 200, 400], 0).unwrap();
    assert!(ua.rows.iter().all(|r| r.distance.unwrap() <= r.bound.unwrap()));
    assert!((-1.2..-0.6).contains(&ua.distance_slope.unwrap()));
    let hr = trend_report("head_runs", &[64, 256, 1024], 0).unwrap();
    assert!(hr.rows.iter().all(|r| r.distance.unwrap() <= r.bound.unwrap()));
    assert!(hr.bound_slope.unwrap() < -0.5);

    assert_eq!(head_runs_tuned_k(64, 0.5), 5);
    assert!(close(loglog_slope(&[(1.0, 1.0), (10.0, 0.1), (100.0, 0.01)]).unwrap(), -1.0, 1e-12));
    assert_eq!(loglog_slope(&[(1.0, 1.0)]), None);
}

#[test]
fn antivoter_stationary_law_matches_the_chain() {
    let n = 8;
    let law = antivoter_complete_stationary(n).unwrap();
    assert!(close(law.mean(), 0.0, 1e-12));
    assert!(law.iter().all(|(s, p)| p == 0.0 || (s + n as i64) % 2 == 0));
    assert_eq!(law.pmf(n as i64), 0.0);
    let mut rng = RngStream::new(4, 0);
    let mut chain = AntiVoter::random_start(RegularGraph::complete(n).unwrap(), &mut rng).unwrap();
    for _ in 0..5_000 {
        chain.step(&mut rng);
    }
    let mut counts = vec![0u64; 2 * n + 1];
    for _ in 0..200_000 {
        chain.step(&mut rng);
        counts[(chain.sum() + n as i64) as usize] += 1;
    }
    let emp = FinitePmf::from_counts(-(n as i64), &counts).unwrap();
    assert!(dtv_discrete(&emp, &law).value < 0.01);
    assert!(antivoter_complete_stationary(2).is_err());
}

fn stein(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_stein")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn cli_commands() {
    let (code, out, _) = stein(&["list"]);
    assert_eq!(code, 0);
    assert!(CATALOG.iter().all(|d| out.contains(d.id)));

    let (code, out, _) = stein(&["bound", "--theorem", "tv_fixed_points", "--set", "n=10"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(close(v["value"].as_f64().unwrap(), 0.4, 1e-15));

    let (code, out, err) = stein(&["verify", "--experiment", "fixed_points", "--seed", "1"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with(CSV_HEADER) && out.contains("\nfixed_points,dTV,0.4,"));
    assert!(err.contains("PASS"));

    let (code, out, _) = stein(&["verify", "--experiment", "coupon", "--seed", "1", "--samples", "2000"]);
    assert_eq!(code, 0);
    assert!(out.lines().nth(1).unwrap().split(',').nth(4).unwrap() != out.lines().nth(1).unwrap().split(',').nth(5).unwrap());

    assert_eq!(stein(&["bound", "--theorem", "nonsense"]).0, 2);
    assert_eq!(stein(&["verify", "--experiment", "fixed_points"]).0, 2);
    assert_eq!(stein(&["verify", "--experiment", "er_triangles_p01", "--seed", "1", "--set", "n=9", "--oracle", "exact"]).0, 2);
    assert_eq!(stein(&["suite"]).0, 2);
    assert_eq!(stein(&["frobnicate"]).0, 2);
    assert_eq!(stein(&["trend", "--family", "constant", "--sizes", "1,2"]).0, 2);

    let (code, out, err) = stein(&["trend", "--family", "fixed_points", "--sizes", "8,12,16"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("size,bound,distance\n8,"));
    assert!(err.contains("slope"));

    let (code, out, _) = stein(&["coupling-check", "--coupling", "hypergeometric", "--samples", "20000", "--seed", "1"]);
    assert_eq!(code, 0);
    assert!(out.trim_end().ends_with("hypergeometric: PASS"));
}

#[test]
fn cli_config_file() {
    let dir = std::env::temp_dir().join(format!("stein-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("c.cfg");
    let csv = dir.join("row.csv");
    std::fs::write(&cfg, format!("[experiment]\nid = hypergeometric\nseed = 4\nout = {}\n[params]\nN = 30\n", csv.display())).unwrap();
    let (code, _, err) = stein(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.contains("\nhypergeometric,dTV,") && text.contains(",true,4,"));
    std::fs::write(&cfg, "[experiment]\nid = hypergeometric\n").unwrap();
    assert_eq!(stein(&["verify", "--config", cfg.to_str().unwrap()]).0, 2);
    std::fs::remove_dir_all(&dir).unwrap();
    assert!(find("hypergeometric").is_some());
}
