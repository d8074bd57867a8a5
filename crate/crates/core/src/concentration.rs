//! Tail bounds from exchangeable pairs and size-bias couplings, plus empirical frequency
//! checks against them.
//!
//! Raw calculators return the formula value (possibly above 1); only [`TailReport`] clips.

use serde::Serialize;

use crate::dist::RngStream;
use crate::error::{invalid, Result, SteinError};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChernoffResult {
    pub value: f64,
    pub theta: f64,
}

/// min over θ ∈ [lo, hi] of m(θ)e^{−θt}: a 200-point grid (plus an optional analytic
/// starting point), refined by golden-section search around the best grid point.
pub fn chernoff_bound<M>(mgf: M, t: f64, theta_range: (f64, f64), start: Option<f64>) -> Result<ChernoffResult>
where
    M: Fn(f64) -> f64,
{
    let (lo, hi) = theta_range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) || !t.is_finite() {
        return Err(invalid("chernoff_bound: need a finite range lo < hi and finite t"));
    }
    let g = |th: f64| -> Result<f64> {
        let m = mgf(th);
        if !m.is_finite() || m <= 0.0 {
            return Err(invalid(format!("chernoff_bound: m({th}) = {m} is not finite and positive")));
        }
        Ok(m.ln() - th * t)
    };
    let steps = 199;
    let mut grid: Vec<f64> = (0..=steps).map(|i| lo + (hi - lo) * i as f64 / steps as f64).collect();
    if let Some(s) = start {
        if (lo..=hi).contains(&s) {
            grid.push(s);
        }
    }
    grid.sort_by(|a, b| a.total_cmp(b));
    let vals: Vec<f64> = grid.iter().map(|&th| g(th)).collect::<Result<_>>()?;
    let (best, _) = vals.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, v)| if *v < acc.1 { (i, *v) } else { acc });
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(grid.len() - 1)];
    let (mut theta, mut val) = (grid[best], vals[best]);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 * (1.0 + theta.abs()) {
            break;
        }
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - GOLDEN * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + GOLDEN * (b - a);
            gd = g(d)?;
        }
    }
    for (th, v) in [(c, gc), (d, gd)] {
        if v < val {
            theta = th;
            val = v;
        }
    }
    Ok(ChernoffResult { value: val.exp(), theta })
}

fn check_bc(b: f64, c: f64, t: f64) -> Result<()> {
    if !(b >= 0.0 && c >= 0.0) || !t.is_finite() || t < 0.0 {
        return Err(invalid(format!("need B, C ≥ 0 and t ≥ 0, got B={b}, C={c}, t={t}")));
    }
    Ok(())
}

/// (P(W ≥ t), P(W ≤ −t)) bounds for an a-Stein pair with E[(W′−W)²|F]/(2a) ≤ BW + C:
/// exp{−t²/(2C+2Bt)} and exp{−t²/(2C)}.
pub fn exch_pair_tails(b: f64, c: f64, t: f64) -> Result<(f64, f64)> {
    check_bc(b, c, t)?;
    if t == 0.0 {
        return Ok((1.0, 1.0));
    }
    if c == 0.0 {
        return Err(invalid("C = 0 with t > 0 leaves the lower-tail exponent undefined"));
    }
    Ok(((-t * t / (2.0 * c + 2.0 * b * t)).exp(), (-t * t / (2.0 * c)).exp()))
}

/// The same exponents for f(X) = E[F(X,X′)|X] with F antisymmetric and
/// ½E[|(f(X) − f(X′))F(X,X′)| | X] ≤ Bf(X) + C.
pub fn generalized_exch_tails(b: f64, c: f64, t: f64) -> Result<(f64, f64)> {
    exch_pair_tails(b, c, t)
}

/// 2exp{−t²/(4(1+β))} for the event |m − tanh(βm + βh)| ≥ β/n + t/√n.
pub fn curie_weiss_concentration(beta: f64, h: f64, n: usize, t: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() || !h.is_finite() || n < 2 || !(t >= 0.0) {
        return Err(invalid(format!("need β > 0, finite h, n ≥ 2 and t ≥ 0, got β={beta}, n={n}, t={t}")));
    }
    Ok(2.0 * (-t * t / (4.0 * (1.0 + beta))).exp())
}

/// The deviation threshold β/n + t/√n of the Curie–Weiss event.
pub fn curie_weiss_threshold(beta: f64, n: usize, t: f64) -> f64 {
    beta / n as f64 + t / (n as f64).sqrt()
}

/// Size-bias tails for (X − μ)/σ with |X^s − X| ≤ C. The lower tail needs X^s ≥ X; the
/// upper tail needs E[e^{2X/C}] < ∞, which callers assert through `mgf_ok`.
pub fn size_bias_tails(mu: f64, sigma2: f64, c: f64, t: f64, monotone_up: bool, mgf_ok: bool) -> Result<(Option<f64>, Option<f64>)> {
    if !(mu > 0.0 && sigma2 > 0.0 && c > 0.0) || !(t >= 0.0) {
        return Err(invalid(format!("need μ, σ², C > 0 and t ≥ 0, got μ={mu}, σ²={sigma2}, C={c}, t={t}")));
    }
    if !monotone_up && !mgf_ok {
        return Err(invalid("neither tail is available: X^s ≥ X not asserted and the mgf condition not asserted"));
    }
    let k = c * mu / sigma2;
    let upper = mgf_ok.then(|| (-t * t / (2.0 * (k + c * t / (2.0 * sigma2.sqrt())))).exp());
    let lower = monotone_up.then(|| (-t * t / (2.0 * k)).exp());
    Ok((upper, lower))
}

/// 2exp{−t²/((4/n)Σa_ij + 2t)} for P(|W| ≥ t), W = Σ_i a_{iπ(i)} − (1/n)Σa_ij, 0 ≤ a_ij ≤ 1.
pub fn hoeffding_combinatorial(a: &[Vec<f64>], t: f64) -> Result<f64> {
    let n = a.len();
    if n == 0 || a.iter().any(|r| r.len() != n) {
        return Err(invalid("need a nonempty square matrix"));
    }
    if a.iter().flatten().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(invalid("matrix entries must lie in [0,1]"));
    }
    if !(t >= 0.0) {
        return Err(invalid("t must be nonnegative"));
    }
    if t == 0.0 {
        return Ok(2.0);
    }
    let s: f64 = a.iter().flatten().sum();
    Ok(2.0 * (-t * t / (4.0 / n as f64 * s + 2.0 * t)).exp())
}

/// W = Σ_i a_{iπ(i)} − (1/n)Σa_ij
pub fn hoeffding_statistic(a: &[Vec<f64>], perm: &[usize]) -> f64 {
    let n = a.len() as f64;
    let total: f64 = a.iter().flatten().sum();
    perm.iter().enumerate().map(|(i, &j)| a[i][j]).sum::<f64>() - total / n
}

/// Wilson score interval at normal quantile z.
pub fn wilson_interval(successes: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * nf)) / (1.0 + z2 / nf);
    let half = z / (1.0 + z2 / nf) * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

pub const MIN_TAIL_DRAWS: usize = 10_000;
const Z99: f64 = 2.576;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailReport {
    pub label: String,
    pub t_grid: Vec<f64>,
    /// raw calculator values
    pub bound: Vec<f64>,
    pub bound_clipped: Vec<f64>,
    pub empirical_freq: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    pub sound: Vec<bool>,
    pub n_draws: usize,
}

impl TailReport {
    pub fn all_sound(&self) -> bool {
        self.sound.iter().all(|s| *s)
    }
}

/// Frequencies of {statistic ≥ t} over `n_draws` draws, compared with `bound(t)`.
/// Lower tails and two-sided events are expressed by passing −W or |W|.
pub fn empirical_tail_check<S, B>(label: &str, mut sampler: S, bound: B, t_grid: &[f64], n_draws: usize, rng: &mut RngStream) -> Result<TailReport>
where
    S: FnMut(&mut RngStream) -> Result<f64>,
    B: Fn(f64) -> Result<f64>,
{
    if n_draws < MIN_TAIL_DRAWS {
        return Err(SteinError::InsufficientSamples { need: MIN_TAIL_DRAWS, got: n_draws });
    }
    if t_grid.is_empty() {
        return Err(invalid("empty t grid"));
    }
    let mut xs = Vec::with_capacity(n_draws);
    for _ in 0..n_draws {
        let x = sampler(rng)?;
        if x.is_nan() {
            return Err(SteinError::ModelBug("statistic evaluated to NaN".into()));
        }
        xs.push(x);
    }
    let mut rep = TailReport {
        label: label.to_string(),
        t_grid: t_grid.to_vec(),
        bound: Vec::new(),
        bound_clipped: Vec::new(),
        empirical_freq: Vec::new(),
        ci_low: Vec::new(),
        ci_high: Vec::new(),
        sound: Vec::new(),
        n_draws,
    };
    for &t in t_grid {
        let b = bound(t)?;
        let hits = xs.iter().filter(|x| **x >= t).count();
        let (lo, hi) = wilson_interval(hits, n_draws, Z99);
        rep.bound.push(b);
        rep.bound_clipped.push(b.clamp(0.0, 1.0));
        rep.empirical_freq.push(hits as f64 / n_draws as f64);
        rep.ci_low.push(lo);
        rep.ci_high.push(hi);
        rep.sound.push(hi <= b.clamp(0.0, 1.0) + 1e-12);
    }
    Ok(rep)
}
