//! Size sweeps of a bound and its measured distance, with fitted log-log slopes.

use std::fmt::Write as _;

use serde::Serialize;

use super::stream_id;
use crate::bounds;
use crate::dist::{FinitePmf, RngStream, TargetLaw, DEFAULT_TOL};
use crate::error::{Result, SteinError};
use crate::metrics::dtv_discrete;
use crate::models::gw_spine::{gw_spine_tree, GwOffspring};
use crate::models::head_runs::head_runs_exact_pmf;
use crate::models::permutations::fp_exact_pmf;
use crate::models::uniform_attachment::ua_exact_pmf;

pub const FAMILIES: &[&str] = &["head_runs", "uniform_attachment", "binomial_normal", "fixed_points", "gw_spine", "constant"];

/// Draws per size for the spine-tree family.
pub const GW_DRAWS: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendRow {
    pub size: u64,
    pub bound: Option<f64>,
    pub distance: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrendReport {
    pub family: String,
    pub rows: Vec<TrendRow>,
    pub bound_slope: Option<f64>,
    pub distance_slope: Option<f64>,
}

impl TrendReport {
    pub fn csv(&self) -> String {
        let mut s = String::from("size,bound,distance\n");
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{}", r.size, opt(r.bound), opt(r.distance));
        }
        s
    }
}

/// Least-squares slope of ln y on ln x over the points with positive finite y.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite()).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

/// Run length tuned so that λ = p^k((n−k)(1−p) + 1) stays near 1.
pub fn head_runs_tuned_k(n: u64, p: f64) -> usize {
    let k = ((n as f64 * (1.0 - p)).ln() / (1.0 / p).ln()).round();
    (k.max(1.0) as usize).min(n as usize)
}

fn tv_to(pmf: &FinitePmf, target: TargetLaw) -> Result<f64> {
    Ok(dtv_discrete(pmf, &target.pmf(DEFAULT_TOL)?).value)
}

fn row(family: &str, n: u64, seed: u64) -> Result<TrendRow> {
    let nu = n as usize;
    let (bound, distance) = match family {
        "head_runs" => {
            let p = 0.5;
            let k = head_runs_tuned_k(n, p);
            let rep = bounds::tv_head_runs(nu, p, k)?;
            (Some(rep.value), Some(tv_to(&head_runs_exact_pmf(nu, p, k)?, rep.target)?))
        }
        "uniform_attachment" => {
            let rep = bounds::tv_uniform_attachment(nu)?;
            (Some(rep.value), Some(tv_to(&ua_exact_pmf(nu)?, rep.target)?))
        }
        "binomial_normal" => {
            let (b, d) = super::catalog::binomial_exact_dw(nu)?;
            (Some(b), Some(d))
        }
        "fixed_points" => {
            let rep = bounds::tv_fixed_points(nu)?;
            (Some(rep.value), Some(tv_to(&fp_exact_pmf(nu)?, rep.target)?))
        }
        "gw_spine" => {
            // Bin(2, 1/2) offspring; the column holds E|Y_n − Y_n^e|/n, the rate quantity
            let off = GwOffspring::new(FinitePmf::new(0, vec![0.25, 0.5, 0.25], 0.0)?)?;
            let mut rng = RngStream::new(seed, stream_id("trend_gw_spine") ^ n);
            let mut acc = 0.0;
            for _ in 0..GW_DRAWS {
                let s = gw_spine_tree(&off, nu, &mut rng)?;
                acc += (s.y as f64 - s.y_e).abs();
            }
            (None, Some(acc / GW_DRAWS as f64 / n as f64))
        }
        "constant" => (Some(1.0), Some(1.0)),
        other => return Err(SteinError::Config(format!("unknown trend family '{other}'; known: {}", FAMILIES.join(", ")))),
    };
    Ok(TrendRow { size: n, bound, distance })
}

pub fn trend_report(family: &str, sizes: &[u64], seed: u64) -> Result<TrendReport> {
    if !FAMILIES.contains(&family) {
        return Err(SteinError::Config(format!("unknown trend family '{family}'; known: {}", FAMILIES.join(", "))));
    }
    if sizes.len() < 3 {
        return Err(SteinError::Config(format!("degenerate grid: need at least 3 sizes, got {}", sizes.len())));
    }
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != sizes.len() || sorted[0] == 0 {
        return Err(SteinError::Config("degenerate grid: sizes must be distinct and positive".into()));
    }
    let rows = sizes.iter().map(|&n| row(family, n, seed)).collect::<Result<Vec<_>>>()?;
    let pts = |f: fn(&TrendRow) -> Option<f64>| -> Vec<(f64, f64)> {
        rows.iter().filter_map(|r| f(r).map(|y| (r.size as f64, y))).collect()
    };
    let bound_slope = loglog_slope(&pts(|r| r.bound));
    let distance_slope = loglog_slope(&pts(|r| r.distance));
    Ok(TrendReport { family: family.to_string(), rows, bound_slope, distance_slope })
}
