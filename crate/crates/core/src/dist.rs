//! Exact finite laws, the four reference targets and seeded random streams.

use std::sync::OnceLock;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Result, SteinError};

/// Default truncation tolerance for pmf builders.
pub const DEFAULT_TOL: f64 = 1e-12;

const MASS_SLACK: f64 = 1e-12;

/// Integer-indexed probability vector with the mass beyond the stored support kept on the side.
#[derive(Clone, Debug, PartialEq)]
pub struct FinitePmf {
    offset: i64,
    probs: Vec<f64>,
    tail_mass: f64,
}

impl FinitePmf {
    pub fn new(offset: i64, probs: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(SteinError::InvalidDistribution("empty support".into()));
        }
        if !(tail_mass >= 0.0) || !tail_mass.is_finite() {
            return Err(SteinError::InvalidDistribution(format!("bad tail mass {tail_mass}")));
        }
        if let Some(bad) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(SteinError::InvalidDistribution(format!("bad mass {bad}")));
        }
        let total = kahan_sum(probs.iter().copied()) + tail_mass;
        if (total - 1.0).abs() > MASS_SLACK {
            return Err(SteinError::InvalidDistribution(format!(
                "masses sum to {total}, expected 1"
            )));
        }
        Ok(FinitePmf { offset, probs, tail_mass })
    }

    /// Builder for masses that may carry rounding noise of order 1e-15 below zero.
    pub(crate) fn from_noisy(offset: i64, mut probs: Vec<f64>, tail_mass: f64) -> Result<Self> {
        for p in probs.iter_mut() {
            if *p < 0.0 && *p > -1e-13 {
                *p = 0.0;
            }
        }
        // trim exact zeros at both ends so the support stays tight
        let first = probs.iter().position(|&p| p > 0.0).unwrap_or(0);
        let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        let trimmed = probs[first..=last.max(first)].to_vec();
        FinitePmf::new(offset + first as i64, trimmed, tail_mass)
    }

    pub fn point_mass(k: i64) -> Self {
        FinitePmf { offset: k, probs: vec![1.0], tail_mass: 0.0 }
    }

    /// Empirical law of integer-valued observations.
    pub fn from_counts(offset: i64, counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(invalid("no observations"));
        }
        let probs = counts.iter().map(|&c| c as f64 / total as f64).collect();
        FinitePmf::from_noisy(offset, probs, 0.0)
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }
    pub fn min_support(&self) -> i64 {
        self.offset
    }
    pub fn max_support(&self) -> i64 {
        self.offset + self.probs.len() as i64 - 1
    }

    pub fn pmf(&self, k: i64) -> f64 {
        if k < self.offset {
            return 0.0;
        }
        self.probs.get((k - self.offset) as usize).copied().unwrap_or(0.0)
    }

    /// Stored mass at or below `k`.
    pub fn cdf(&self, k: i64) -> f64 {
        if k < self.offset {
            return 0.0;
        }
        let upto = ((k - self.offset) as usize).min(self.probs.len() - 1);
        kahan_sum(self.probs[..=upto].iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs.iter().enumerate().map(move |(i, &p)| (self.offset + i as i64, p))
    }

    pub fn expect<F: Fn(i64) -> f64>(&self, f: F) -> f64 {
        kahan_sum(self.iter().map(|(k, p)| p * f(k)))
    }

    pub fn mean(&self) -> f64 {
        self.expect(|k| k as f64)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expect(|k| (k as f64 - m).powi(2))
    }

    pub fn moment_abs(&self, order: i32) -> f64 {
        self.expect(|k| (k as f64).abs().powi(order))
    }

    pub fn convolve(&self, other: &FinitePmf) -> Result<FinitePmf> {
        let mut out = vec![0.0; self.probs.len() + other.probs.len() - 1];
        for (i, &a) in self.probs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.probs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        let stored_a: f64 = 1.0 - self.tail_mass;
        let stored_b: f64 = 1.0 - other.tail_mass;
        let tail = (1.0 - stored_a * stored_b).max(0.0);
        FinitePmf::from_noisy(self.offset + other.offset, out, tail)
    }

    /// Inverse-CDF draw; a uniform landing in the tail returns the largest stored point.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.random::<f64>() * (1.0 - self.tail_mass);
        let mut acc = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return self.offset + i as i64;
            }
        }
        self.max_support()
    }

    /// Real-valued image k ↦ scale·k + shift.
    pub fn to_atoms(&self, scale: f64, shift: f64) -> Atoms {
        let mut pts: Vec<(f64, f64)> =
            self.iter().filter(|(_, p)| *p > 0.0).map(|(k, p)| (scale * k as f64 + shift, p)).collect();
        if scale < 0.0 {
            pts.reverse();
        }
        Atoms { points: pts.iter().map(|x| x.0).collect(), probs: pts.iter().map(|x| x.1).collect(), tail_mass: self.tail_mass }
    }
}

/// A discrete law on arbitrary sorted real atoms (standardized counts, empirical samples).
#[derive(Clone, Debug, PartialEq)]
pub struct Atoms {
    pub points: Vec<f64>,
    pub probs: Vec<f64>,
    pub tail_mass: f64,
}

impl Atoms {
    pub fn new(mut pairs: Vec<(f64, f64)>, tail_mass: f64) -> Result<Self> {
        if pairs.is_empty() {
            return Err(SteinError::InvalidDistribution("no atoms".into()));
        }
        if pairs.iter().any(|(x, p)| !x.is_finite() || !(*p >= 0.0)) {
            return Err(SteinError::InvalidDistribution("non-finite atom or negative mass".into()));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut points: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut probs: Vec<f64> = Vec::with_capacity(pairs.len());
        for (x, p) in pairs {
            if points.last() == Some(&x) {
                *probs.last_mut().unwrap() += p;
            } else {
                points.push(x);
                probs.push(p);
            }
        }
        let total = kahan_sum(probs.iter().copied()) + tail_mass;
        if (total - 1.0).abs() > 1e-9 {
            return Err(SteinError::InvalidDistribution(format!("atom masses sum to {total}")));
        }
        Ok(Atoms { points, probs, tail_mass })
    }

    /// Empirical law of a sample, equal weights.
    pub fn empirical(samples: &[f64]) -> Result<Self> {
        let w = 1.0 / samples.len() as f64;
        Atoms::new(samples.iter().map(|&x| (x, w)).collect(), 0.0)
    }

    pub fn mean(&self) -> f64 {
        kahan_sum(self.points.iter().zip(&self.probs).map(|(x, p)| x * p))
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        kahan_sum(self.points.iter().zip(&self.probs).map(|(x, p)| p * (x - m).powi(2)))
    }

    /// Right-continuous CDF values after each atom.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = KahanAcc::default();
        self.probs
            .iter()
            .map(|&p| {
                acc.add(p);
                acc.value()
            })
            .collect()
    }
}

/// The approximating laws.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum TargetLaw {
    Normal,
    Poisson { lambda: f64 },
    Exponential,
    Geometric0 { p: f64 },
    Geometric1 { p: f64 },
}

impl TargetLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TargetLaw::Poisson { lambda } if !(lambda > 0.0) || !lambda.is_finite() => {
                Err(invalid(format!("Poisson mean must be positive, got {lambda}")))
            }
            TargetLaw::Geometric0 { p } | TargetLaw::Geometric1 { p } if !(p > 0.0 && p <= 1.0) => {
                Err(invalid(format!("geometric parameter must lie in (0,1], got {p}")))
            }
            _ => Ok(()),
        }
    }

    pub fn is_discrete(&self) -> bool {
        !matches!(self, TargetLaw::Normal | TargetLaw::Exponential)
    }

    pub fn name(&self) -> String {
        match *self {
            TargetLaw::Normal => "N(0,1)".into(),
            TargetLaw::Poisson { lambda } => format!("Po({lambda})"),
            TargetLaw::Exponential => "Exp(1)".into(),
            TargetLaw::Geometric0 { p } => format!("Geo0({p})"),
            TargetLaw::Geometric1 { p } => format!("Geo1({p})"),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            TargetLaw::Normal => normal_cdf_unchecked(x),
            TargetLaw::Exponential => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-x).exp_m1()
                }
            }
            TargetLaw::Poisson { lambda } => {
                if x < 0.0 {
                    return 0.0;
                }
                let k = x.floor() as u64;
                let mut acc = KahanAcc::default();
                let mut lnf = 0.0;
                for j in 0..=k {
                    if j > 0 {
                        lnf += (j as f64).ln();
                    }
                    acc.add((j as f64 * lambda.ln() - lambda - lnf).exp());
                }
                acc.value().min(1.0)
            }
            TargetLaw::Geometric0 { p } => {
                if x < 0.0 {
                    0.0
                } else {
                    1.0 - (1.0 - p).powf(x.floor() + 1.0)
                }
            }
            TargetLaw::Geometric1 { p } => {
                if x < 1.0 {
                    0.0
                } else {
                    1.0 - (1.0 - p).powf(x.floor())
                }
            }
        }
    }

    /// Exact pmf for the discrete targets.
    pub fn pmf(&self, tol: f64) -> Result<FinitePmf> {
        match *self {
            TargetLaw::Poisson { lambda } => poisson_pmf(lambda, tol),
            TargetLaw::Geometric0 { p } => geometric_pmf(p, GeometricConvention::Zero, tol),
            TargetLaw::Geometric1 { p } => geometric_pmf(p, GeometricConvention::One, tol),
            _ => Err(invalid(format!("{} has no pmf", self.name()))),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            TargetLaw::Normal => 0.0,
            TargetLaw::Exponential => 1.0,
            TargetLaw::Poisson { lambda } => lambda,
            TargetLaw::Geometric0 { p } => (1.0 - p) / p,
            TargetLaw::Geometric1 { p } => 1.0 / p,
        }
    }

    /// Inverse CDF of the continuous targets.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            TargetLaw::Normal => normal_quantile(u),
            TargetLaw::Exponential => -(-u).ln_1p(),
            _ => f64::NAN,
        }
    }
}

pub fn poisson_pmf(lambda: f64, tol: f64) -> Result<FinitePmf> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid(format!("Poisson mean must be positive, got {lambda}")));
    }
    check_tol(tol)?;
    // ratios from the mode keep the relative error at O(k·ε); normalizing removes the common factor
    let mode = lambda.floor() as usize;
    let mut rel = vec![0.0; mode + 1];
    rel[mode] = 1.0;
    for k in (0..mode).rev() {
        rel[k] = rel[k + 1] * (k as f64 + 1.0) / lambda;
    }
    let mut k = mode;
    loop {
        let next = rel[k] * lambda / (k as f64 + 1.0);
        rel.push(next);
        k += 1;
        // remaining mass after index k is at most next·λ/(k+1−λ)
        if k as f64 > lambda + 1.0 && next * lambda / (k as f64 + 1.0 - lambda) < tol * 1e-3 {
            break;
        }
    }
    // rel[..=cut] is stored, everything after is tail; extend the tail until negligible
    let z_head = kahan_sum(rel.iter().copied());
    let mut tail = KahanAcc::default();
    let mut t = *rel.last().unwrap();
    loop {
        t *= lambda / (k as f64 + 1.0);
        k += 1;
        tail.add(t);
        if t < 1e-300 || t < tail.value() * 1e-17 {
            break;
        }
    }
    let z = z_head + tail.value();
    // trim the stored support to the smallest prefix whose complement is below tol
    let mut cut = rel.len();
    let mut acc = tail.value();
    while cut > mode + 1 && (acc + rel[cut - 1]) / z < tol {
        acc += rel[cut - 1];
        cut -= 1;
    }
    let probs: Vec<f64> = rel[..cut].iter().map(|r| r / z).collect();
    let stored = kahan_sum(probs.iter().copied());
    FinitePmf::from_noisy(0, probs, (1.0 - stored).max(acc / z).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeometricConvention {
    /// Support {0,1,...}
    Zero,
    /// Support {1,2,...}
    One,
}

pub fn geometric_pmf(p: f64, convention: GeometricConvention, tol: f64) -> Result<FinitePmf> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("geometric parameter must lie in (0,1], got {p}")));
    }
    check_tol(tol)?;
    let offset = match convention {
        GeometricConvention::Zero => 0,
        GeometricConvention::One => 1,
    };
    if p == 1.0 {
        return Ok(FinitePmf::point_mass(offset));
    }
    let q = 1.0 - p;
    // tail beyond index K is q^{K+1}
    let last = ((tol.ln() / q.ln()).ceil() as usize).max(1);
    let probs: Vec<f64> = (0..last).map(|i| q.powi(i as i32) * p).collect();
    let tail = q.powi(last as i32);
    FinitePmf::new(offset, probs, tail)
}

pub fn binomial_pmf(n: u64, p: f64) -> Result<FinitePmf> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("probability out of range: {p}")));
    }
    if p == 0.0 {
        return Ok(FinitePmf::point_mass(0));
    }
    if p == 1.0 {
        return Ok(FinitePmf::point_mass(n as i64));
    }
    let probs = (0..=n)
        .map(|k| (ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()).exp())
        .collect();
    FinitePmf::from_noisy(0, probs, 0.0)
}

/// Law of a sum of independent Bernoulli(p_i).
pub fn poisson_binomial_pmf(ps: &[f64]) -> Result<FinitePmf> {
    let mut dp = vec![1.0];
    for &p in ps {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("probability out of range: {p}")));
        }
        let mut next = vec![0.0; dp.len() + 1];
        for (k, &m) in dp.iter().enumerate() {
            next[k] += m * (1.0 - p);
            next[k + 1] += m * p;
        }
        dp = next;
    }
    FinitePmf::from_noisy(0, dp, 0.0)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(invalid(format!("tolerance must lie in (0,1), got {tol}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// special functions

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Φ(x). Power series for |x| < 2, continued fraction for the Mills ratio beyond.
/// Absolute error stays below 2e-16 on |x| ≤ 8 in our checks against quadrature.
pub fn normal_cdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(invalid("normal_cdf needs a finite argument"));
    }
    Ok(normal_cdf_unchecked(x))
}

pub(crate) fn normal_cdf_unchecked(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.abs() < 2.0 {
        0.5 + normal_pdf(x) * phi_series(x)
    } else if x > 0.0 {
        1.0 - normal_sf(x)
    } else {
        normal_sf(-x)
    }
}

/// 1 − Φ(x) without cancellation for large x.
pub fn normal_sf(x: f64) -> f64 {
    if x >= 2.0 {
        if x > 40.0 {
            return 0.0;
        }
        normal_pdf(x) * mills_ratio_cf(x)
    } else if x > -2.0 {
        0.5 - normal_pdf(x) * phi_series(x)
    } else {
        1.0 - normal_sf(-x)
    }
}

/// R(x) = (1 − Φ(x)) / φ(x). Overflows only for x below about −37.
pub fn mills_ratio(x: f64) -> f64 {
    if x >= 2.0 {
        mills_ratio_cf(x)
    } else if x > -2.0 {
        0.5 / normal_pdf(x) - phi_series(x)
    } else {
        1.0 / normal_pdf(x) - mills_ratio_cf(-x)
    }
}

// Σ x^{2n+1} / (2n+1)!!
fn phi_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 1.0;
    loop {
        term *= x2 / (2.0 * n + 1.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        n += 1.0;
    }
    sum
}

// Lentz evaluation of 1/(x+1/(x+2/(x+3/(x+...)))) for x ≥ 2.
fn mills_ratio_cf(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..5000 {
        let a = k as f64;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

/// Φ^{-1}(u): Acklam's rational approximation polished by two Newton steps.
pub fn normal_quantile(u: f64) -> f64 {
    if u <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    let plow = 0.02425;
    let mut x = if u < plow {
        let q = (-2.0 * u.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if u <= 1.0 - plow {
        let q = u - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - u).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    for _ in 0..2 {
        let err = if x > 0.0 { (1.0 - u) - normal_sf(x) } else { normal_cdf_unchecked(x) - u };
        let pdf = normal_pdf(x);
        if pdf > 0.0 {
            x -= err / pdf;
        }
    }
    x
}

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![0.0; 1024];
        for i in 1..t.len() {
            t[i] = t[i - 1] + (i as f64).ln();
        }
        t
    })
}

/// ln(n!), table below 1024 and Stirling series above.
pub fn ln_factorial(n: u64) -> f64 {
    let table = ln_factorial_table();
    if (n as usize) < table.len() {
        return table[n as usize];
    }
    let x = n as f64 + 1.0;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

pub fn choose(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if n < 60 {
        let k = k.min(n - k);
        let mut c: u128 = 1;
        for i in 0..k {
            c = c * (n - i) as u128 / (i + 1) as u128;
        }
        return c as f64;
    }
    ln_choose(n, k).exp().round()
}

#[derive(Clone, Copy, Debug, Default)]
pub struct KahanAcc {
    sum: f64,
    comp: f64,
}

impl KahanAcc {
    pub fn add(&mut self, x: f64) {
        // Neumaier variant
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn kahan_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut acc = KahanAcc::default();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

// ---------------------------------------------------------------------------
// random streams

/// ChaCha8 keyed by a 64-bit seed, with the stream id selecting an independent substream.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        RngStream { seed, stream_id, inner }
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
    /// A sibling stream with the same seed.
    pub fn substream(&self, stream_id: u64) -> RngStream {
        RngStream::new(self.seed, stream_id)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

pub fn sample_bernoulli<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<bool> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("probability out of range: {p}")));
    }
    Ok(rng.random::<f64>() < p)
}

pub fn sample_uniform01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}

pub fn sample_uniform_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(invalid("permutation size must be at least 1"));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    Ok(perm)
}

pub fn sample_categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<usize> {
    Categorical::new(weights).map(|c| c.sample(rng))
}

/// Cumulative table for repeated categorical draws.
#[derive(Clone, Debug)]
pub struct Categorical {
    cum: Vec<f64>,
}

impl Categorical {
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("empty weights"));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(invalid("weights must be finite and nonnegative"));
        }
        let mut cum = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for &w in weights {
            acc += w;
            cum.push(acc);
        }
        if !(acc > 0.0) {
            return Err(invalid("weights sum to zero"));
        }
        Ok(Categorical { cum })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cum.last().unwrap();
        let u = rng.random::<f64>() * total;
        let idx = self.cum.partition_point(|&c| c <= u);
        // skip zero-weight slots that share the cumulative value
        idx.min(self.cum.len() - 1)
    }
}
