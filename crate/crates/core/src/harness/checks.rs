//! Registered coupling checks: each draws coupled pairs from a model and tests the defining
//! identity of its transform (or the linearity statistics of an exchangeable pair).

use rand::Rng;
use serde::Serialize;

use super::stream_id;
use crate::couplings::{
    check_discrete_equilibrium, check_equilibrium, check_size_bias, check_zero_bias, collect_draws, exchangeable_pair_check,
    iid_replacement_pair, size_bias_sum_coupler, CouplingDraw, ExchangeableReport, IdentityReport, IndependentSummands,
    ZeroBiasSum,
};
use crate::dist::{binomial_pmf, Atoms, FinitePmf, RngStream};
use crate::error::{Result, SteinError};
use crate::models::antivoter::{AntiVoter, RegularGraph};
use crate::models::coupon::{coupon_mean, coupon_size_bias_coupler};
use crate::models::er::{
    er_isolated_size_bias_coupler, er_kcycle_size_bias_coupler, isolated_moments, triangle_moments,
};
use crate::models::geometric_sum::{CountLaw, GeometricSum, Increment};
use crate::models::head_runs::{cyclic_runs_moments, cyclic_runs_size_bias_coupler};
use crate::models::hypergeometric::Hypergeometric;
use crate::models::uniform_attachment::ua_equilibrium_coupler;
use crate::stein_eq::{smooth_suite, standard_suite};

pub const COUPLINGS: &[(&str, &str)] = &[
    ("size_bias_sum", "independent nonnegative summands, size-bias identity"),
    ("zero_bias_sum", "independent mean-zero summands with unit total variance, zero-bias identity"),
    ("equilibrium", "geometric sum of uniform [0,2] increments with p=0.2, equilibrium identity"),
    ("discrete_equilibrium", "uniform attachment in-degree at n=20 against Geo0(1/2)"),
    ("er_isolated", "isolated vertices of G(10, 0.1), size-bias identity"),
    ("er_triangles", "triangles of G(8, 0.3), size-bias identity"),
    ("coupon", "empty boxes, n=8 and k=16, size-bias identity"),
    ("hypergeometric", "hypergeometric (20, 5, 6), size-bias identity"),
    ("cyclic_runs", "head windows of length 3 on a 30-cycle, size-bias identity"),
    ("exchangeable_iid", "index-replacement pair for 50 Rademacher signs, a = 1/n"),
    ("antivoter", "stationary anti-voter chain on K_8, a = 2/n"),
];

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckOutcome {
    Identity(IdentityReport),
    Pair(ExchangeableReport),
}

impl CheckOutcome {
    pub fn pass(&self) -> bool {
        match self {
            CheckOutcome::Identity(r) => r.pass(),
            CheckOutcome::Pair(r) => r.pass(),
        }
    }

    /// Human-readable lines, one per tested statistic.
    pub fn lines(&self) -> Vec<String> {
        let verdict = |b: bool| if b { "PASS" } else { "FAIL" };
        match self {
            CheckOutcome::Identity(r) => r
                .checks
                .iter()
                .map(|c| {
                    let z = if c.estimate.se > 0.0 { (c.estimate.mean - c.target) / c.estimate.se } else { 0.0 };
                    format!("{:<28} mean {:+.3e}  se {:.3e}  z {:+.2}  {}", c.name, c.estimate.mean, c.estimate.se, z, verdict(c.pass))
                })
                .collect(),
            CheckOutcome::Pair(r) => vec![
                format!("antisymmetry E[tanh W' - tanh W]  {:+.3e} ± {:.3e}  {}", r.antisymmetric.mean, r.antisymmetric.se, verdict(r.pass_antisymmetric)),
                format!("slope of W'-W on W  {:+.5} ± {:.5} (target {:+.5})  {}", r.slope.mean, r.slope.se, -r.a, verdict(r.pass_slope)),
                format!(
                    "E[(W'-W)^2] - 2a var  {:+.3e} ± {:.3e} (E[(W'-W)^2] = {:.5}, var = {:.5})  {}",
                    r.second_moment_gap.mean,
                    r.second_moment_gap.se,
                    r.mean_sq_diff,
                    r.sigma2_hat,
                    verdict(r.pass_second_moment)
                ),
            ],
        }
    }
}

fn sized(id: &str, draws: Vec<CouplingDraw>, mu: f64) -> Result<CheckOutcome> {
    let mut r = check_size_bias(&draws, mu, &standard_suite())?;
    r.coupling = id.to_string();
    Ok(CheckOutcome::Identity(r))
}

fn zero_bias_model() -> Result<ZeroBiasSum> {
    // five signs of variance 0.1 and two skewed three-point laws of variance 0.25
    let mut laws = vec![Atoms::new(vec![(-0.1f64.sqrt(), 0.5), (0.1f64.sqrt(), 0.5)], 0.0)?; 5];
    let s = (0.25f64 / 1.2).sqrt();
    let skewed = Atoms::new(vec![(-s, 0.4), (0.0, 0.4), (2.0 * s, 0.2)], 0.0)?;
    laws.extend([skewed.clone(), skewed]);
    ZeroBiasSum::new(laws)
}

pub fn coupling_check(id: &str, samples: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = RngStream::new(seed, stream_id(&format!("coupling:{id}")));
    let rng = &mut rng;
    match id {
        "size_bias_sum" => {
            let pmfs = vec![
                FinitePmf::new(0, vec![0.3, 0.7], 0.0)?,
                binomial_pmf(3, 0.5)?,
                FinitePmf::new(0, vec![0.2, 0.5, 0.3], 0.0)?,
                FinitePmf::new(1, vec![0.6, 0.0, 0.4], 0.0)?,
            ];
            let mu: f64 = pmfs.iter().map(|p| p.mean()).sum();
            let model = IndependentSummands::new(pmfs)?;
            sized(id, collect_draws(samples, rng, |r| size_bias_sum_coupler(&model, r))?, mu)
        }
        "zero_bias_sum" => {
            let model = zero_bias_model()?;
            let draws = collect_draws(samples, rng, |r| crate::couplings::zero_bias_sum_coupler(&model, r))?;
            let mut r = check_zero_bias(&draws, 1.0, &smooth_suite())?;
            r.coupling = id.to_string();
            Ok(CheckOutcome::Identity(r))
        }
        "equilibrium" => {
            let gs = GeometricSum::new(Increment::Uniform02, CountLaw::Geometric1 { p: 0.2 })?;
            let draws = collect_draws(samples, rng, |r| gs.coupled_draw(r))?;
            // E W = p·E N·E X = 1
            let mut r = check_equilibrium(&draws, 1.0, &smooth_suite())?;
            r.coupling = id.to_string();
            Ok(CheckOutcome::Identity(r))
        }
        "discrete_equilibrium" => {
            let draws = collect_draws(samples, rng, |r| ua_equilibrium_coupler(20, r))?;
            let mut r = check_discrete_equilibrium(&draws, 0.5, &standard_suite())?;
            r.coupling = id.to_string();
            Ok(CheckOutcome::Identity(r))
        }
        "er_isolated" => {
            let (mu, _) = isolated_moments(10, 0.1);
            sized(id, collect_draws(samples, rng, |r| er_isolated_size_bias_coupler(10, 0.1, r))?, mu)
        }
        "er_triangles" => {
            let (mu, _) = triangle_moments(8, 0.3);
            sized(id, collect_draws(samples, rng, |r| er_kcycle_size_bias_coupler(8, 0.3, 3, r))?, mu)
        }
        "coupon" => sized(id, collect_draws(samples, rng, |r| coupon_size_bias_coupler(8, 16, None, r))?, coupon_mean(8, 16)),
        "hypergeometric" => {
            let h = Hypergeometric::new(20, 5, 6)?;
            sized(id, collect_draws(samples, rng, |r| h.size_bias_coupler(r))?, h.mean())
        }
        "cyclic_runs" => {
            let (mu, _) = cyclic_runs_moments(30, 0.5, 3);
            sized(id, collect_draws(samples, rng, |r| cyclic_runs_size_bias_coupler(30, 0.5, 3, r))?, mu)
        }
        "exchangeable_iid" => {
            let n = 50;
            let pair = iid_replacement_pair(n, |r: &mut RngStream| if r.random_bool(0.5) { 1.0 } else { -1.0 }, 1.0 / (n as f64).sqrt());
            Ok(CheckOutcome::Pair(exchangeable_pair_check(pair, 1.0 / n as f64, samples, rng)?))
        }
        "antivoter" => {
            let n = 8;
            let mut chain = AntiVoter::random_start(RegularGraph::complete(n)?, rng)?;
            for _ in 0..10_000 {
                chain.step(rng);
            }
            let s = 1.0 / (n as f64).sqrt();
            let pair = move |r: &mut RngStream| {
                let (before, after) = chain.step(r);
                Ok((before as f64 * s, after as f64 * s))
            };
            Ok(CheckOutcome::Pair(exchangeable_pair_check(pair, 2.0 / n as f64, samples, rng)?))
        }
        other => Err(SteinError::Config(format!(
            "unknown coupling '{other}'; registered: {}",
            COUPLINGS.iter().map(|c| c.0).collect::<Vec<_>>().join(", ")
        ))),
    }
}
