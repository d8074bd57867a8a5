//! Name-based access to the bound calculators, for `stein bound`.
//!
//! Scalar inputs are numbers; an estimated input `x` may carry its confidence radius as
//! `x_ci`. List inputs are comma-separated.

use super::config::Params;
use crate::bounds::{self, BoundReport, Estimate, SubgraphDescriptor, THEOREMS};
use crate::error::{Result, SteinError};
use crate::models::er::DegreeMode;

fn est(p: &Params, key: &str) -> Result<Estimate> {
    let v = p.f64(key)?;
    Ok(match p.opt_f64(&format!("{key}_ci"))? {
        Some(r) => Estimate::mc(v, r),
        None => Estimate::exact(v),
    })
}

pub fn evaluate_bound(theorem: &str, p: &Params) -> Result<BoundReport> {
    match theorem {
        "be_iid" => bounds::be_iid(est(p, "abs3")?, p.usize("n")? as u64),
        "wass_iid_sum" => bounds::wass_iid_sum(&p.list("abs3")?, &p.list("m4")?),
        "wass_dependency" => bounds::wass_dependency(&p.list("abs3")?, &p.list("m4")?, p.f64("D")?, p.f64("sigma")?),
        "wass_triangles" => bounds::wass_triangles(p.usize("n")?, p.f64("p")?),
        "wass_exch_pair" => bounds::wass_exch_pair(p.f64("a")?, est(p, "var_cond_sq")?, est(p, "abs3_diff")?),
        "wass_antivoter" => bounds::wass_antivoter(p.usize("n")?, p.usize("r")?, est(p, "sigma2")?, est(p, "var_q")?),
        "wass_size_bias" => bounds::wass_size_bias(p.f64("mu")?, p.f64("sigma2")?, est(p, "var_cond")?, est(p, "sq_diff")?),
        "wass_zero_bias" => bounds::wass_zero_bias(est(p, "e_abs_diff")?),
        "kolm_zero_bias" => bounds::kolm_zero_bias(p.f64("delta")?),
        "kolm_exch_pair" => bounds::kolm_exch_pair(p.f64("a")?, est(p, "var_cond_sq")?, p.f64("delta")?),
        "tv_small_numbers" => bounds::tv_small_numbers(&p.list("p")?),
        "tv_head_runs" => bounds::tv_head_runs(p.usize("n")?, p.f64("p")?, p.usize("k")?),
        "tv_size_bias_poisson" => bounds::tv_size_bias_poisson(p.f64("lambda")?, est(p, "e_abs")?),
        "tv_size_bias_increasing" => bounds::tv_size_bias_increasing(p.f64("lambda")?, p.f64("variance")?, p.f64("sum_p2")?),
        "tv_triangles" => bounds::tv_subgraph(p.f64("p")?, &SubgraphDescriptor::triangle(p.usize("n")?)),
        "tv_kcycles" => bounds::tv_subgraph(p.f64("p")?, &SubgraphDescriptor::kcycle(p.usize("n")?, p.usize("k")?)?),
        "tv_size_bias_decreasing" => bounds::tv_size_bias_decreasing(p.f64("lambda")?, p.f64("variance")?),
        "tv_hypergeometric" => bounds::tv_hypergeometric(p.usize("N")?, p.usize("n")?, p.usize("m")?),
        "tv_coupon" => bounds::tv_coupon(p.usize("n")?, p.usize("k")?),
        "tv_exch_pair_poisson" => {
            bounds::tv_exch_pair_poisson(p.f64("lambda")?, p.f64("c")?, est(p, "cond_up")?, est(p, "cond_down")?)
        }
        "tv_fixed_points" => bounds::tv_fixed_points(p.usize("n")?),
        "tv_degree_vertices" => {
            let mode = match p.text("mode")?.as_str() {
                "at_least" => DegreeMode::AtLeast,
                "at_most" => DegreeMode::AtMost,
                m => return Err(SteinError::Config(format!("mode must be 'at_least' or 'at_most', got '{m}'"))),
            };
            bounds::tv_degree_vertices(p.usize("n")?, p.f64("p")?, p.usize("d")?, mode)
        }
        "wass_equilibrium" => bounds::wass_equilibrium(est(p, "e_abs")?),
        "wass_geometric_sum" => {
            let e_xme = if p.contains("e_xme") { Some(est(p, "e_xme")?) } else { None };
            bounds::wass_geometric_sum(p.f64("p")?, p.f64("mu2")?, est(p, "e_nm")?, e_xme)
        }
        "tv_discrete_equilibrium" => bounds::tv_discrete_equilibrium(p.f64("p")?, est(p, "e_abs")?),
        "tv_uniform_attachment" => bounds::tv_uniform_attachment(p.usize("n")?),
        other => Err(SteinError::Config(format!(
            "unknown theorem '{other}'; registered: {}",
            THEOREMS.iter().map(|t| t.0).collect::<Vec<_>>().join(", ")
        ))),
    }
}
