//! The registered experiments. Each pairs a bound calculator with an oracle for the
//! distance it controls: exact enumeration where the law is computable, Monte Carlo
//! otherwise.

use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};

use super::config::Params;
use super::Outcome;
use crate::bounds::{self, BoundReport, Estimate, SubgraphDescriptor};
use crate::concentration::{self, TailReport};
use crate::dist::{
    binomial_pmf, geometric_pmf, poisson_binomial_pmf, sample_uniform_permutation, Atoms, FinitePmf, GeometricConvention,
    RngStream, TargetLaw, DEFAULT_TOL,
};
use crate::error::{invalid, Result, SteinError};
use crate::metrics::{self, estimate_metric_mc, Metric, MetricValue, Reference};
use crate::models::antivoter::{antivoter_complete_stationary, AntiVoter, RegularGraph};
use crate::models::coupon::{coupon_empty_boxes, coupon_exact_pmf};
use crate::models::curie_weiss::curie_weiss_gibbs;
use crate::models::er::{self, er_exact_statistic_pmf, er_sample, er_statistic, DegreeMode, ErStatistic};
use crate::models::geometric_sum::{CountLaw, GeometricSum, Increment};
use crate::models::head_runs::{
    cyclic_runs_count, cyclic_runs_moments, head_runs_exact_pmf, head_runs_sampler,
};
use crate::models::hypergeometric::Hypergeometric;
use crate::models::permutations::{fp_exact_pmf, permutation_fixed_points};
use crate::models::uniform_attachment::{ua_exact_pmf, uniform_attachment_indegree};

/// Which oracle an experiment was run against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Oracle {
    Exact,
    MonteCarlo(usize),
}

type Runner = fn(&Params, Oracle, &mut RngStream) -> Result<Outcome>;

pub struct ExperimentDef {
    pub id: &'static str,
    /// calculator id, or a short label for derived bounds
    pub theorem: &'static str,
    pub description: &'static str,
    /// `key = value` pairs separated by ';'
    pub defaults: &'static str,
    pub exact: bool,
    /// draw count when run against Monte Carlo; None if no sampler is registered
    pub mc_draws: Option<usize>,
    run: Runner,
}

impl ExperimentDef {
    pub fn default_params(&self) -> Params {
        let mut p = Params::new();
        for kv in self.defaults.split(';').filter(|s| !s.trim().is_empty()) {
            p.apply_override(kv).expect("catalog defaults are well formed");
        }
        p
    }

    pub fn default_oracle(&self) -> Oracle {
        match (self.exact, self.mc_draws) {
            (true, _) => Oracle::Exact,
            (false, Some(n)) => Oracle::MonteCarlo(n),
            (false, None) => unreachable!("experiment {} has no oracle", self.id),
        }
    }

    pub fn run(&self, params: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
        match oracle {
            Oracle::Exact if !self.exact => {
                return Err(SteinError::OracleInfeasible(format!("{} has no exact oracle; use monte_carlo", self.id)))
            }
            Oracle::MonteCarlo(_) if self.mc_draws.is_none() => {
                return Err(SteinError::OracleInfeasible(format!("{} has no Monte Carlo sampler; use exact", self.id)))
            }
            _ => {}
        }
        let mut merged = self.default_params();
        for (k, v) in &params.0 {
            if !merged.contains(k) {
                return Err(SteinError::Config(format!("{}: unknown parameter '{k}' (expected: {})", self.id, self.defaults)));
            }
            merged.set(k, v.clone());
        }
        (self.run)(&merged, oracle, rng)
    }
}

pub fn find(id: &str) -> Option<&'static ExperimentDef> {
    CATALOG.iter().find(|d| d.id == id)
}

macro_rules! exp {
    ($id:expr, $thm:expr, $desc:expr, $defaults:expr, exact = $exact:expr, mc = $mc:expr, $run:expr) => {
        ExperimentDef { id: $id, theorem: $thm, description: $desc, defaults: $defaults, exact: $exact, mc_draws: $mc, run: $run }
    };
}

pub static CATALOG: &[ExperimentDef] = &[
    // Poisson targets
    exp!("fixed_points", "tv_fixed_points", "fixed points of a uniform permutation", "n=10", exact = true, mc = Some(100_000), run_fixed_points),
    exp!("coupon", "tv_coupon", "empty boxes after k uniform balls into n boxes", "n=8; k=16", exact = true, mc = Some(100_000), run_coupon),
    exp!("hypergeometric", "tv_hypergeometric", "red balls among m drawn from N with n red", "N=20; n=5; m=6", exact = true, mc = Some(100_000), run_hypergeometric),
    exp!("head_runs", "tv_head_runs", "de-clumped head runs of length at least k", "n=20; k=3; p=0.5", exact = true, mc = Some(100_000), run_head_runs),
    exp!("small_numbers", "tv_small_numbers", "sum of independent Bernoullis", "p=0.1,0.2,0.05,0.15,0.3,0.1", exact = true, mc = Some(100_000), run_small_numbers),
    exp!("er_triangles_p01", "tv_subgraph", "triangles in G(n,p)", "n=6; p=0.1", exact = true, mc = Some(100_000), run_er_triangles),
    exp!("er_triangles_p03", "tv_subgraph", "triangles in G(n,p)", "n=6; p=0.3", exact = true, mc = Some(100_000), run_er_triangles),
    exp!("er_four_cycles", "tv_subgraph", "k-cycles in G(n,p)", "n=6; p=0.3; k=4", exact = true, mc = Some(100_000), run_er_kcycles),
    exp!("er_isolated_poisson", "tv_size_bias_increasing", "isolated vertices in G(n,p)", "n=6; p=0.3", exact = true, mc = Some(100_000), run_er_isolated_poisson),
    exp!("er_degree_at_least", "tv_degree_vertices", "vertices of degree at least d in G(n,p)", "n=6; p=0.1; d=3", exact = true, mc = Some(100_000), run_er_degree_at_least),
    exp!("er_degree_at_most", "tv_degree_vertices", "vertices of degree at most d in G(n,p)", "n=6; p=0.6; d=1", exact = true, mc = Some(100_000), run_er_degree_at_most),
    // geometric target
    exp!("uniform_attachment_n25", "tv_uniform_attachment", "in-degree of a uniform node in uniform attachment", "n=25", exact = true, mc = Some(100_000), run_uniform_attachment),
    exp!("uniform_attachment_n50", "tv_uniform_attachment", "in-degree of a uniform node in uniform attachment", "n=50", exact = true, mc = Some(100_000), run_uniform_attachment),
    exp!("uniform_attachment_n100", "tv_uniform_attachment", "in-degree of a uniform node in uniform attachment", "n=100", exact = true, mc = Some(100_000), run_uniform_attachment),
    // exponential target
    exp!("geometric_exponential_p020", "wass_geometric_sum", "p·Ge1(p) against Exp(1)", "p=0.2", exact = true, mc = Some(100_000), run_geometric_exponential),
    exp!("geometric_exponential_p005", "wass_geometric_sum", "p·Ge1(p) against Exp(1)", "p=0.05", exact = true, mc = Some(100_000), run_geometric_exponential),
    exp!("geometric_exponential_p001", "wass_geometric_sum", "p·Ge1(p) against Exp(1)", "p=0.01", exact = true, mc = Some(100_000), run_geometric_exponential),
    exp!("geometric_sum_uniform", "wass_geometric_sum", "geometric sum of uniform [0,2] increments, relaxed bound", "p=0.05", exact = false, mc = Some(100_000), run_geometric_sum_uniform),
    // normal target
    exp!("binomial_normal_n16", "wass_iid_sum", "standardized Bin(n,1/2)", "n=16", exact = true, mc = Some(100_000), run_binomial_normal),
    exp!("binomial_normal_n64", "wass_iid_sum", "standardized Bin(n,1/2)", "n=64", exact = true, mc = Some(100_000), run_binomial_normal),
    exp!("binomial_normal_n256", "wass_iid_sum", "standardized Bin(n,1/2)", "n=256", exact = true, mc = Some(100_000), run_binomial_normal),
    exp!("binomial_be_n64", "be_iid", "standardized Bin(n,1/2), Berry–Esseen", "n=64", exact = true, mc = Some(100_000), run_binomial_be),
    exp!("binomial_dk_from_dw_n64", "dk_from_dw", "standardized Bin(n,1/2), dK from the dW bound", "n=64", exact = true, mc = Some(100_000), run_binomial_dk_from_dw),
    exp!("rademacher_zero_bias_n64", "wass_zero_bias", "Rademacher sum through the zero-bias coupling", "n=64", exact = true, mc = Some(100_000), run_rademacher_zero_bias),
    exp!("rademacher_kolmogorov_n64", "kolm_zero_bias", "Rademacher sum, bounded zero-bias coupling", "n=64", exact = true, mc = Some(100_000), run_rademacher_kolmogorov),
    exp!("triangles_normal", "wass_triangles", "standardized triangle count in G(n,p)", "n=6; p=0.5", exact = true, mc = Some(100_000), run_triangles_normal),
    exp!("er_isolated_normal", "wass_size_bias", "standardized isolated-vertex count in G(n,p)", "n=30; p=0.05", exact = false, mc = Some(100_000), run_er_isolated_normal),
    exp!("antivoter_complete", "wass_antivoter", "stationary anti-voter sum on K_n", "n=8; burn_in=1000; thin=20", exact = true, mc = Some(20_000), run_antivoter_complete),
    // tails
    exp!("chernoff_normal", "chernoff", "P(Z ≥ t) against the optimized Chernoff bound", "t=2", exact = false, mc = Some(100_000), run_chernoff_normal),
    exp!("hoeffding_permutation", "hoeffding_combinatorial", "|Σa_iπ(i) − Σa/n| on a random [0,1] matrix", "n=10; t=6", exact = false, mc = Some(10_000), run_hoeffding),
    exp!("curie_weiss_tail", "curie_weiss_concentration", "Curie–Weiss magnetization deviation", "n=100; beta=0.5; h=0; t=3; burn_in=200; thin=2", exact = false, mc = Some(10_000), run_curie_weiss_tail),
    exp!("head_runs_tail", "size_bias_tails", "upper tail of cyclic head-window counts", "n=100; k=3; p=0.5; t=2", exact = false, mc = Some(20_000), run_head_runs_tail),
];

// ---- shared plumbing ----

fn from_metric(rep: BoundReport, mv: MetricValue) -> Outcome {
    Outcome {
        metric: mv.metric.label().to_string(),
        bound: rep.upper(),
        distance: mv.value,
        ci_low: (mv.value - mv.ci_radius).max(0.0),
        ci_high: mv.value + mv.ci_radius,
        exact: mv.ci_radius == 0.0 && rep.ci_radius == 0.0,
        notes: rep.notes.clone(),
        report: Some(rep),
    }
}

/// Exact distance between an integer law and the calculator's target.
fn exact_integer(rep: &BoundReport, pmf: &FinitePmf) -> Result<MetricValue> {
    match (rep.metric, rep.target.is_discrete()) {
        (Metric::Tv, true) => Ok(metrics::dtv_discrete(pmf, &rep.target.pmf(DEFAULT_TOL)?)),
        (Metric::Kolmogorov, true) => metrics::dk_discrete_vs_target(pmf, &rep.target),
        (Metric::Wasserstein, true) => metrics::dw_discrete_vs_target(pmf, &rep.target),
        _ => Err(invalid("integer oracle needs a discrete target")),
    }
}

/// Exact distance between a real-valued discrete law and a continuous target.
fn exact_atoms(rep: &BoundReport, atoms: &Atoms) -> Result<MetricValue> {
    match rep.metric {
        Metric::Wasserstein => metrics::dw_atoms_vs_continuous(atoms, &rep.target),
        Metric::Kolmogorov => metrics::dk_atoms_vs_continuous(atoms, &rep.target),
        Metric::Tv => Err(invalid("dTV against a continuous target is always 1")),
    }
}

fn draws<F>(n: usize, rng: &mut RngStream, mut f: F) -> Result<Vec<f64>>
where
    F: FnMut(&mut RngStream) -> Result<f64>,
{
    (0..n).map(|_| f(rng)).collect()
}

fn mc(rep: BoundReport, samples: &[f64]) -> Result<Outcome> {
    let mv = estimate_metric_mc(samples, Reference::Law(rep.target), rep.metric)?;
    Ok(from_metric(rep, mv))
}

/// Integer-valued experiment with both oracles.
fn integer_experiment<E, S>(rep: BoundReport, oracle: Oracle, rng: &mut RngStream, exact: E, mut sampler: S) -> Result<Outcome>
where
    E: FnOnce() -> Result<FinitePmf>,
    S: FnMut(&mut RngStream) -> Result<u64>,
{
    match oracle {
        Oracle::Exact => {
            let mv = exact_integer(&rep, &exact()?)?;
            Ok(from_metric(rep, mv))
        }
        Oracle::MonteCarlo(n) => {
            let xs = draws(n, rng, |r| sampler(r).map(|x| x as f64))?;
            mc(rep, &xs)
        }
    }
}

/// Integer-valued statistic X standardized as (X − shift)·scale, against a continuous target.
fn scaled_experiment<E, S>(rep: BoundReport, oracle: Oracle, rng: &mut RngStream, scale: f64, shift: f64, exact: E, mut sampler: S) -> Result<Outcome>
where
    E: FnOnce() -> Result<FinitePmf>,
    S: FnMut(&mut RngStream) -> Result<f64>,
{
    match oracle {
        Oracle::Exact => {
            let atoms = exact()?.to_atoms(scale, -shift * scale);
            let mv = exact_atoms(&rep, &atoms)?;
            Ok(from_metric(rep, mv))
        }
        Oracle::MonteCarlo(n) => {
            let xs = draws(n, rng, |r| sampler(r).map(|x| (x - shift) * scale))?;
            mc(rep, &xs)
        }
    }
}

fn er_experiment(rep: BoundReport, oracle: Oracle, rng: &mut RngStream, n: usize, p: f64, stat: ErStatistic) -> Result<Outcome> {
    integer_experiment(rep, oracle, rng, || er_exact_statistic_pmf(n, p, stat), |r| er_statistic(&er_sample(n, p, r)?, stat))
}

fn tail_outcome(rep: TailReport) -> Result<Outcome> {
    if rep.t_grid.len() != 1 {
        return Err(SteinError::ModelBug("tail experiments use a single threshold".into()));
    }
    let mut notes = Vec::new();
    if rep.bound[0] > 1.0 {
        notes.push(format!("vacuous: raw bound {} clipped to 1", rep.bound[0]));
    }
    Ok(Outcome {
        metric: "tail".into(),
        bound: rep.bound_clipped[0],
        distance: rep.empirical_freq[0],
        ci_low: rep.ci_low[0],
        ci_high: rep.ci_high[0],
        exact: false,
        notes,
        report: None,
    })
}

fn mc_draws(oracle: Oracle) -> usize {
    match oracle {
        Oracle::MonteCarlo(n) => n,
        Oracle::Exact => 0,
    }
}

// ---- Poisson ----

fn run_fixed_points(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let n = p.usize("n")?;
    let rep = bounds::tv_fixed_points(n)?;
    integer_experiment(rep, oracle, rng, || fp_exact_pmf(n), |r| permutation_fixed_points(n, r))
}

fn run_coupon(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let (n, k) = (p.usize("n")?, p.usize("k")?);
    let rep = bounds::tv_coupon(n, k)?;
    integer_experiment(rep, oracle, rng, || coupon_exact_pmf(n, k, None), |r| coupon_empty_boxes(n, k, None, r))
}

fn run_hypergeometric(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let (total, red, m) = (p.usize("N")?, p.usize("n")?, p.usize("m")?);
    let h = Hypergeometric::new(total, red, m)?;
    let rep = bounds::tv_hypergeometric(total, red, m)?;
    integer_experiment(rep, oracle, rng, || h.exact_pmf(), |r| Ok(h.sample(r)))
}

fn run_head_runs(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let (n, k, q) = (p.usize("n")?, p.usize("k")?, p.f64("p")?);
    let rep = bounds::tv_head_runs(n, q, k)?;
    integer_experiment(rep, oracle, rng, || head_runs_exact_pmf(n, q, k), |r| head_runs_sampler(n, q, k, r))
}

fn run_small_numbers(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let ps = p.list("p")?;
    let rep = bounds::tv_small_numbers(&ps)?;
    integer_experiment(rep, oracle, rng, || poisson_binomial_pmf(&ps), |r| Ok(ps.iter().filter(|&&q| r.random_bool(q)).count() as u64))
}

fn run_er_triangles(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let (n, q) = (p.usize("n")?, p.f64("p")?);
    let rep = bounds::tv_subgraph(q, &SubgraphDescriptor::triangle(n))?;
    er_experiment(rep, oracle, rng, n, q, ErStatistic::Triangles)
}

fn run_er_kcycles(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let (n, q, k) = (p.usize("n")?, p.f64("p")?, p.usize("k")?);
    let rep = bounds::tv_subgraph(q, &SubgraphDescriptor::kcycle(n, k)?)?;
    er_experiment(rep, oracle, rng, n, q, ErStatistic::KCycles(k))
}

fn run_er_isolated_poisson(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let (n, q) = (p.usize("n")?, p.f64("p")?);
    if n < 2 {
        return Err(invalid("need n ≥ 2"));
    }
    let (mean, var) = er::isolated_moments(n, q);
    // each vertex is isolated with probability (1−p)^{n−1}
    let pi = (1.0 - q).powi(n as i32 - 1);
    let rep = bounds::tv_size_bias_increasing(mean, var, n as f64 * pi * pi)?;
    er_experiment(rep, oracle, rng, n, q, ErStatistic::Isolated)
}

fn run_er_degree_at_least(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let (n, q, d) = (p.usize("n")?, p.f64("p")?, p.usize("d")?);
    let rep = bounds::tv_degree_vertices(n, q, d, DegreeMode::AtLeast)?;
    er_experiment(rep, oracle, rng, n, q, ErStatistic::DegreeAtLeast(d))
}

fn run_er_degree_at_most(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let (n, q, d) = (p.usize("n")?, p.f64("p")?, p.usize("d")?);
    let rep = bounds::tv_degree_vertices(n, q, d, DegreeMode::AtMost)?;
    er_experiment(rep, oracle, rng, n, q, ErStatistic::DegreeAtMost(d))
}

// ---- geometric and exponential ----

fn run_uniform_attachment(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let n = p.usize("n")?;
    let rep = bounds::tv_uniform_attachment(n)?;
    integer_experiment(rep, oracle, rng, || ua_exact_pmf(n), |r| uniform_attachment_indegree(n, r))
}

fn run_geometric_exponential(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let q = p.f64("p")?;
    // X ≡ 1 and N ~ Ge1(p): E|N − M| = 0 and E|X_M − X_M^e| = E|1 − U| = 1/2
    let rep = bounds::wass_geometric_sum(q, 1.0, 0.0, Some(Estimate::exact(0.5)))?;
    let gs = GeometricSum::new(Increment::One, CountLaw::Geometric1 { p: q })?;
    scaled_experiment(rep, oracle, rng, q, 0.0, || geometric_pmf(q, GeometricConvention::One, 1e-14), |r| Ok(gs.sample(r) / q))
}

fn run_geometric_sum_uniform(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let q = p.f64("p")?;
    let inc = Increment::Uniform02;
    let rep = bounds::wass_geometric_sum(q, inc.second_moment(), 0.0, None)?;
    let gs = GeometricSum::new(inc, CountLaw::Geometric1 { p: q })?;
    let xs = draws(mc_draws(oracle), rng, |r| Ok(gs.sample(r)))?;
    mc(rep, &xs)
}

// ---- normal ----

fn binomial_sampler(n: usize) -> Result<impl FnMut(&mut RngStream) -> Result<f64>> {
    let b = Binomial::new(n as u64, 0.5).map_err(|e| invalid(e.to_string()))?;
    Ok(move |r: &mut RngStream| Ok(b.sample(r) as f64))
}

// W = (S − n/2)/(√n/2)
fn binomial_experiment(rep: BoundReport, n: usize, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let nf = n as f64;
    scaled_experiment(rep, oracle, rng, 2.0 / nf.sqrt(), nf / 2.0, || binomial_pmf(n as u64, 0.5), binomial_sampler(n)?)
}

fn run_binomial_normal(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let n = p.usize("n")?;
    // standardized ±1 summands: E|X|³ = E X⁴ = 1
    let rep = bounds::wass_iid_sum(&vec![1.0; n], &vec![1.0; n])?;
    binomial_experiment(rep, n, oracle, rng)
}

fn run_binomial_be(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let n = p.usize("n")?;
    let rep = bounds::be_iid(1.0, n as u64)?;
    binomial_experiment(rep, n, oracle, rng)
}

fn run_binomial_dk_from_dw(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let n = p.usize("n")?;
    let dw = bounds::wass_iid_sum(&vec![1.0; n], &vec![1.0; n])?;
    let mut rep = dw.clone();
    rep.theorem_id = "dk_from_dw".into();
    rep.metric = Metric::Kolmogorov;
    rep.value = metrics::dk_from_dw_normal(dw.value)?;
    rep.terms = vec![("dk_from_dw".into(), rep.value)];
    rep.notes.push(format!("dK ≤ √(2·dW/√(2π)) with dW bound {}", dw.value));
    binomial_experiment(rep, n, oracle, rng)
}

fn run_rademacher_zero_bias(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let n = p.usize("n")?;
    // X^z uniform on (−n^{−1/2}, n^{−1/2}) independent of X = ±n^{−1/2}: E|X^z − X| = n^{−1/2}
    let rep = bounds::wass_zero_bias(1.0 / (n as f64).sqrt())?;
    binomial_experiment(rep, n, oracle, rng)
}

fn run_rademacher_kolmogorov(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let n = p.usize("n")?;
    let rep = bounds::kolm_zero_bias(2.0 / (n as f64).sqrt())?;
    binomial_experiment(rep, n, oracle, rng)
}

fn run_triangles_normal(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let (n, q) = (p.usize("n")?, p.f64("p")?);
    let rep = bounds::wass_triangles(n, q)?;
    let (mu, var) = er::triangle_moments(n, q);
    let stat = ErStatistic::Triangles;
    scaled_experiment(
        rep,
        oracle,
        rng,
        1.0 / var.sqrt(),
        mu,
        || er_exact_statistic_pmf(n, q, stat),
        |r| Ok(er_statistic(&er_sample(n, q, r)?, stat)? as f64),
    )
}

fn mean_ci(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    Estimate::mc(m, 2.576 * (v / n).sqrt())
}

/// Isolated vertices with the vertex-isolating size-bias coupling. Given the graph G, the
/// coupling moves X by 1[deg v > 0] + #{u ~ v : deg u = 1} at a uniform v, so both
/// E[X^s − X | G] and E[(X^s − X)² | G] are computed exactly per sampled graph; conditioning
/// on G rather than X only enlarges the variance term.
fn run_er_isolated_normal(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let (n, q) = (p.usize("n")?, p.f64("p")?);
    let draws_n = mc_draws(oracle);
    if draws_n < metrics::MIN_MC_SAMPLES {
        return Err(SteinError::InsufficientSamples { need: metrics::MIN_MC_SAMPLES, got: draws_n });
    }
    let (mu, var) = er::isolated_moments(n, q);
    if !(var > 0.0) {
        return Err(invalid("isolated-vertex count is degenerate"));
    }
    let sigma = var.sqrt();
    let mut ws = Vec::with_capacity(draws_n);
    let mut cond = Vec::with_capacity(draws_n);
    let mut cond_sq = Vec::with_capacity(draws_n);
    for _ in 0..draws_n {
        let g = er_sample(n, q, rng)?;
        let deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
        let (mut s1, mut s2) = (0.0, 0.0);
        for v in 0..n {
            let d = (deg[v] > 0) as usize + g.neighbors(v).iter().filter(|&&u| deg[u] == 1).count();
            s1 += d as f64;
            s2 += (d * d) as f64;
        }
        ws.push((er::er_isolated(&g) as f64 - mu) / sigma);
        cond.push(s1 / n as f64);
        cond_sq.push(s2 / n as f64);
    }
    let cm = cond.iter().sum::<f64>() / draws_n as f64;
    let dev: Vec<f64> = cond.iter().map(|c| (c - cm).powi(2)).collect();
    let rep = bounds::wass_size_bias(mu, var, mean_ci(&dev), mean_ci(&cond_sq))?;
    mc(rep, &ws)
}

/// Exact on K_n through the stationary birth–death law; Monte Carlo runs the chain and
/// thins it.
fn run_antivoter_complete(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let n = p.usize("n")?;
    let law = antivoter_complete_stationary(n)?;
    // Q = Σ_i Σ_{j≠i} X_i X_j = S² − n
    let sigma2 = law.variance();
    let var_q = law.expect(|s| ((s * s) as f64).powi(2)) - law.expect(|s| (s * s) as f64).powi(2);
    let rep = bounds::wass_antivoter(n, n - 1, sigma2, var_q.max(0.0))?;
    let scale = 1.0 / sigma2.sqrt();
    match oracle {
        Oracle::Exact => {
            let mv = exact_atoms(&rep, &law.to_atoms(scale, 0.0))?;
            Ok(from_metric(rep, mv))
        }
        Oracle::MonteCarlo(k) => {
            let (burn, thin) = (p.usize("burn_in")?, p.usize("thin")?.max(1));
            let mut chain = AntiVoter::random_start(RegularGraph::complete(n)?, rng)?;
            for _ in 0..burn {
                chain.step(rng);
            }
            let xs = draws(k, rng, |r| {
                for _ in 0..thin {
                    chain.step(r);
                }
                Ok(chain.sum() as f64 * scale)
            })?;
            mc(rep, &xs)
        }
    }
}

// ---- tails ----

fn run_chernoff_normal(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let t = p.f64("t")?;
    let rep = concentration::empirical_tail_check(
        "chernoff_normal",
        |r| Ok(StandardNormal.sample(r)),
        |t| Ok(concentration::chernoff_bound(|th: f64| (th * th / 2.0).exp(), t, (0.0, 20.0), Some(t))?.value),
        &[t],
        mc_draws(oracle),
        rng,
    )?;
    tail_outcome(rep)
}

fn run_hoeffding(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let (n, t) = (p.usize("n")?, p.f64("t")?);
    if n == 0 {
        return Err(invalid("need n ≥ 1"));
    }
    let a: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()).collect();
    let rep = concentration::empirical_tail_check(
        "hoeffding_permutation",
        |r| Ok(concentration::hoeffding_statistic(&a, &sample_uniform_permutation(n, r)?).abs()),
        |t| concentration::hoeffding_combinatorial(&a, t),
        &[t],
        mc_draws(oracle),
        rng,
    )?;
    tail_outcome(rep)
}

fn run_curie_weiss_tail(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let (n, beta, h, t) = (p.usize("n")?, p.f64("beta")?, p.f64("h")?, p.f64("t")?);
    let (burn, thin) = (p.usize("burn_in")?, p.usize("thin")?.max(1));
    let mut cfg = curie_weiss_gibbs(n, beta, h, burn, rng)?;
    let sn = (n as f64).sqrt();
    // the event |m − tanh(βm + βh)| ≥ β/n + t/√n rewritten as a statistic ≥ t
    let rep = concentration::empirical_tail_check(
        "curie_weiss_tail",
        |r| {
            for _ in 0..thin {
                cfg.sweep(r);
            }
            let m = cfg.magnetization();
            Ok(sn * ((m - (beta * m + beta * h).tanh()).abs() - beta / n as f64))
        },
        |t| concentration::curie_weiss_concentration(beta, h, n, t),
        &[t],
        mc_draws(oracle),
        rng,
    )?;
    tail_outcome(rep)
}

fn run_head_runs_tail(p: &Params, oracle: Oracle, rng: &mut RngStream) -> Result<Outcome> {
    let (n, k, q, t) = (p.usize("n")?, p.usize("k")?, p.f64("p")?, p.f64("t")?);
    if k == 0 || k > n {
        return Err(invalid(format!("window length must lie in [1, n], got k={k}")));
    }
    let (mu, var) = cyclic_runs_moments(n, q, k);
    let sigma = var.sqrt();
    let c = (2 * k - 1) as f64;
    let rep = concentration::empirical_tail_check(
        "head_runs_tail",
        |r| {
            let bits: Vec<bool> = (0..n).map(|_| r.random_bool(q)).collect();
            Ok((cyclic_runs_count(&bits, k)? as f64 - mu) / sigma)
        },
        // X^s ≥ X and the count is bounded, so both tails are available
        |t| Ok(concentration::size_bias_tails(mu, var, c, t, true, true)?.0.unwrap()),
        &[t],
        mc_draws(oracle),
        rng,
    )?;
    tail_outcome(rep)
}

/// Exact normal targets for the binomial family, shared with the trend report.
pub(crate) fn binomial_exact_dw(n: usize) -> Result<(f64, f64)> {
    let rep = bounds::wass_iid_sum(&vec![1.0; n], &vec![1.0; n])?;
    let nf = n as f64;
    let atoms = binomial_pmf(n as u64, 0.5)?.to_atoms(2.0 / nf.sqrt(), -nf.sqrt());
    Ok((rep.value, metrics::dw_atoms_vs_continuous(&atoms, &TargetLaw::Normal)?.value))
}
