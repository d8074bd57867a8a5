//! Characterizing operators, solutions of the four Stein equations, and grid certification
//! of the solution norm bounds.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::dist::{
    kahan_sum, ln_factorial, mills_ratio, normal_cdf_unchecked, normal_pdf, normal_sf, KahanAcc, TargetLaw,
};
use crate::error::{invalid, Result, SteinError};
use crate::quad;

/// Test functions h (or f) used by the metrics and the identity checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum TestFunction {
    /// 1[w ≤ x]
    IndicatorHalfline { x: f64 },
    /// 1[w ∈ ∪ [a_i, b_i]]; on integers this is membership in the integer points covered.
    IndicatorSet { intervals: Vec<(f64, f64)> },
    /// max(0, 1 − slope·|w − center|)
    LipschitzHat { center: f64, slope: f64 },
    /// e^{θw}
    Exponential { theta: f64 },
    /// c0 + c1 w + c2 w² + c3 w³
    Polynomial { coeffs: [f64; 4] },
}

impl TestFunction {
    pub fn hat(center: f64, slope: f64) -> Result<Self> {
        if !(slope > 0.0 && slope <= 1.0) {
            return Err(invalid(format!("hat slope must lie in (0,1], got {slope}")));
        }
        Ok(TestFunction::LipschitzHat { center, slope })
    }

    pub fn label(&self) -> String {
        match self {
            TestFunction::IndicatorHalfline { x } => format!("1[w<={x}]"),
            TestFunction::IndicatorSet { intervals } => {
                let parts: Vec<String> = intervals.iter().map(|(a, b)| format!("[{a},{b}]")).collect();
                format!("1[w in {}]", parts.join("u"))
            }
            TestFunction::LipschitzHat { center, slope } => format!("hat(c={center},s={slope})"),
            TestFunction::Exponential { theta } => format!("exp({theta}w)"),
            TestFunction::Polynomial { coeffs } => {
                format!("poly({},{},{},{})", coeffs[0], coeffs[1], coeffs[2], coeffs[3])
            }
        }
    }

    pub fn value(&self, w: f64) -> f64 {
        match self {
            TestFunction::IndicatorHalfline { x } => (w <= *x) as u8 as f64,
            TestFunction::IndicatorSet { intervals } => {
                intervals.iter().any(|(a, b)| w >= *a && w <= *b) as u8 as f64
            }
            TestFunction::LipschitzHat { center, slope } => (1.0 - slope * (w - center).abs()).max(0.0),
            TestFunction::Exponential { theta } => (theta * w).exp(),
            TestFunction::Polynomial { coeffs } => ((coeffs[3] * w + coeffs[2]) * w + coeffs[1]) * w + coeffs[0],
        }
    }

    /// Derivative where it exists; indicators have none in the sense needed by the operators.
    pub fn derivative(&self, w: f64) -> Option<f64> {
        match self {
            TestFunction::IndicatorHalfline { .. } | TestFunction::IndicatorSet { .. } => None,
            TestFunction::LipschitzHat { center, slope } => {
                let d = w - center;
                if d.abs() >= 1.0 / slope {
                    Some(0.0)
                } else if d > 0.0 {
                    Some(-slope)
                } else {
                    Some(*slope)
                }
            }
            TestFunction::Exponential { theta } => Some(theta * (theta * w).exp()),
            TestFunction::Polynomial { coeffs } => Some((3.0 * coeffs[3] * w + 2.0 * coeffs[2]) * w + coeffs[1]),
        }
    }

    pub fn is_indicator(&self) -> bool {
        matches!(self, TestFunction::IndicatorHalfline { .. } | TestFunction::IndicatorSet { .. })
    }

    /// Points where the function or its derivative jumps.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            TestFunction::IndicatorHalfline { x } => vec![*x],
            TestFunction::IndicatorSet { intervals } => intervals.iter().flat_map(|(a, b)| [*a, *b]).collect(),
            TestFunction::LipschitzHat { center, slope } => vec![center - 1.0 / slope, *center, center + 1.0 / slope],
            _ => vec![],
        }
    }

    /// sup |h| where finite.
    pub fn sup_norm(&self) -> Option<f64> {
        match self {
            TestFunction::IndicatorHalfline { .. } | TestFunction::IndicatorSet { .. } => Some(1.0),
            TestFunction::LipschitzHat { .. } => Some(1.0),
            TestFunction::Exponential { theta } if *theta == 0.0 => Some(1.0),
            TestFunction::Polynomial { coeffs } if coeffs[1..].iter().all(|c| *c == 0.0) => Some(coeffs[0].abs()),
            _ => None,
        }
    }

    pub fn lipschitz(&self) -> Option<f64> {
        match self {
            TestFunction::LipschitzHat { slope, .. } => Some(*slope),
            _ => None,
        }
    }

    /// Integer points of an indicator set (used by the discrete solvers).
    pub fn integer_set(&self, max: u64) -> Option<IntegerSet> {
        match self {
            TestFunction::IndicatorHalfline { x } => {
                if *x < 0.0 {
                    Some(IntegerSet::empty())
                } else {
                    Some(IntegerSet::finite(0..=(x.floor() as u64)))
                }
            }
            TestFunction::IndicatorSet { .. } => {
                Some(IntegerSet::finite((0..=max).filter(|k| self.value(*k as f64) == 1.0)))
            }
            _ => None,
        }
    }
}

/// The registered 12-function suite: 6 Lipschitz hats, 3 indicators, 2 exponentials, 1 cubic.
pub fn standard_suite() -> Vec<TestFunction> {
    vec![
        TestFunction::LipschitzHat { center: -1.0, slope: 1.0 },
        TestFunction::LipschitzHat { center: 0.0, slope: 0.5 },
        TestFunction::LipschitzHat { center: 0.5, slope: 1.0 },
        TestFunction::LipschitzHat { center: 1.0, slope: 0.25 },
        TestFunction::LipschitzHat { center: 2.0, slope: 1.0 },
        TestFunction::LipschitzHat { center: 3.0, slope: 0.5 },
        TestFunction::IndicatorHalfline { x: 0.0 },
        TestFunction::IndicatorHalfline { x: 1.0 },
        TestFunction::IndicatorSet { intervals: vec![(1.0, 3.0)] },
        TestFunction::Exponential { theta: 0.5 },
        TestFunction::Exponential { theta: -0.5 },
        TestFunction::Polynomial { coeffs: [1.0, -2.0, 0.0, 1.0] },
    ]
}

/// The smooth (absolutely continuous) members of the suite.
pub fn smooth_suite() -> Vec<TestFunction> {
    standard_suite().into_iter().filter(|h| !h.is_indicator()).collect()
}

/// A subset of {0,1,2,...}, finite or co-finite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerSet {
    members: BTreeSet<u64>,
    cofinite: bool,
}

impl IntegerSet {
    pub fn empty() -> Self {
        IntegerSet { members: BTreeSet::new(), cofinite: false }
    }
    pub fn full() -> Self {
        IntegerSet { members: BTreeSet::new(), cofinite: true }
    }
    pub fn finite<I: IntoIterator<Item = u64>>(it: I) -> Self {
        IntegerSet { members: it.into_iter().collect(), cofinite: false }
    }
    /// Everything except the listed points.
    pub fn cofinite<I: IntoIterator<Item = u64>>(excluded: I) -> Self {
        IntegerSet { members: excluded.into_iter().collect(), cofinite: true }
    }
    pub fn contains(&self, k: u64) -> bool {
        self.members.contains(&k) != self.cofinite
    }
    pub fn complement(&self) -> Self {
        IntegerSet { members: self.members.clone(), cofinite: !self.cofinite }
    }
    fn finite_part(&self) -> (&BTreeSet<u64>, f64) {
        (&self.members, if self.cofinite { -1.0 } else { 1.0 })
    }
}

// ---------------------------------------------------------------------------
// normal

/// Bounded solution of f′(w) − w f(w) = 1[w ≤ x] − Φ(x).
///
/// The textbook form √(2π) e^{w²/2} Φ(w)(1−Φ(x)) overflows for large |w|; each branch is
/// rewritten through Mills ratios so no intermediate exceeds O(1).
pub fn normal_solution_fx(x: f64, w: f64) -> Result<f64> {
    if !x.is_finite() || !w.is_finite() {
        return Err(invalid("normal_solution_fx needs finite arguments"));
    }
    Ok(fx_unchecked(x, w))
}

fn fx_unchecked(x: f64, w: f64) -> f64 {
    if w <= x {
        if w <= 0.0 {
            // √(2π) e^{w²/2} Φ(w) = R(−w)
            mills_ratio(-w) * normal_sf(x)
        } else {
            // x ≥ w > 0
            normal_cdf_unchecked(w) * mills_ratio(x) * (0.5 * (w * w - x * x)).exp()
        }
    } else if w >= 0.0 {
        mills_ratio(w) * normal_cdf_unchecked(x)
    } else {
        // x < w < 0
        mills_ratio(-x) * normal_sf(w) * (0.5 * (w * w - x * x)).exp()
    }
}

/// f_x′(w) = w f_x(w) + 1[w ≤ x] − Φ(x)
pub fn normal_solution_fx_derivative(x: f64, w: f64) -> f64 {
    w * fx_unchecked(x, w) + (w <= x) as u8 as f64 - normal_cdf_unchecked(x)
}

/// E h(Z) for Z ~ N(0,1).
pub fn normal_expectation(h: &TestFunction) -> Result<f64> {
    let mut breaks = vec![-40.0, 40.0];
    breaks.extend(h.kinks().into_iter().filter(|k| k.abs() < 40.0));
    quad::integrate_with_breaks(|t| h.value(t) * normal_pdf(t), &breaks, 1e-14)
}

/// f_h(w) = −e^{w²/2} ∫_w^∞ (h(t) − Eh) e^{−t²/2} dt, evaluated with the exponent folded in
/// so that the integrand never overflows.
pub fn normal_solution_fh(h: &TestFunction, eh: f64, w: f64) -> Result<f64> {
    if !w.is_finite() {
        return Err(invalid("finite w required"));
    }
    let tol = 1e-13;
    if w >= 0.0 {
        let breaks: Vec<f64> = h.kinks().into_iter().map(|k| k - w).filter(|u| *u > 0.0).collect();
        let v = quad::integrate_to_inf(|u| (h.value(w + u) - eh) * (-u * w - 0.5 * u * u).exp(), 0.0, &breaks, tol)?;
        Ok(-v)
    } else {
        let breaks: Vec<f64> = h.kinks().into_iter().map(|k| w - k).filter(|u| *u > 0.0).collect();
        let v = quad::integrate_to_inf(|u| (h.value(w - u) - eh) * (u * w - 0.5 * u * u).exp(), 0.0, &breaks, tol)?;
        Ok(v)
    }
}

// ---------------------------------------------------------------------------
// Poisson

fn ln_poisson(lambda: f64, j: u64) -> f64 {
    j as f64 * lambda.ln() - lambda - ln_factorial(j)
}

/// P(Z ≥ k) for Z ~ Po(λ), summed directly in the upper tail to avoid cancellation.
fn poisson_upper_tail(lambda: f64, k: u64) -> f64 {
    if (k as f64) <= lambda + 1.0 {
        let head = kahan_sum((0..k).map(|j| ln_poisson(lambda, j).exp()));
        return (1.0 - head).max(0.0);
    }
    let mut acc = KahanAcc::default();
    let mut j = k;
    loop {
        let t = ln_poisson(lambda, j).exp();
        acc.add(t);
        if t == 0.0 || t < acc.value() * 1e-18 {
            break;
        }
        j += 1;
    }
    acc.value()
}

/// Solution of λ f(k+1) − k f(k) = 1[k ∈ A] − P(Z ∈ A) with f(0) = 0:
/// f_A(k) = λ^{−k} e^{λ} (k−1)! [P(A ∩ U_k) − P(A) P(U_k)], U_k = {0..k−1}.
pub fn poisson_solution_fa(lambda: f64, a: &IntegerSet, k: u64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid(format!("Poisson mean must be positive, got {lambda}")));
    }
    if k == 0 {
        return Ok(0.0);
    }
    let (members, sign) = a.finite_part();
    // bracket = P(A∩U_k)·P(U_k^c) − P(A∩U_k^c)·P(U_k)
    let tail = poisson_upper_tail(lambda, k);
    let head = 1.0 - tail;
    let mut inside = KahanAcc::default();
    let mut outside = KahanAcc::default();
    for &j in members {
        let pj = ln_poisson(lambda, j).exp();
        if j < k {
            inside.add(pj);
        } else {
            outside.add(pj);
        }
    }
    let bracket = inside.value() * tail - outside.value() * head;
    if bracket == 0.0 {
        return Ok(0.0);
    }
    let ln_c = ln_factorial(k - 1) + lambda - k as f64 * lambda.ln();
    Ok(sign * bracket.signum() * (ln_c + bracket.abs().ln()).exp())
}

// ---------------------------------------------------------------------------
// geometric (mass at zero)

/// Solution of (1−p)Δf(k) − p f(k) = 1[k∈A] − P(Z∈A) with f(0) = 0:
/// f_A(k) = Σ_{i∈A} q^i − Σ_{i∈A, i≥k} q^{i−k}.
pub fn geometric_solution_fa(p: f64, a: &IntegerSet, k: u64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("geometric solution needs p in (0,1), got {p}")));
    }
    let q = 1.0 - p;
    let (members, sign) = a.finite_part();
    let mut acc = KahanAcc::default();
    for &i in members {
        acc.add(q.powi(i as i32));
        if i >= k {
            acc.add(-q.powi((i - k) as i32));
        }
    }
    Ok(sign * acc.value())
}

// ---------------------------------------------------------------------------
// exponential

pub fn exponential_expectation(h: &TestFunction) -> Result<f64> {
    quad::integrate_to_inf(|t| h.value(t) * (-t).exp(), 0.0, &h.kinks(), 1e-14)
}

/// f_h(x) = −e^x ∫_x^∞ (h(t) − E h(Z)) e^{−t} dt = −∫_0^∞ (h(x+u) − Eh) e^{−u} du.
pub fn exponential_solution_fh(h: &TestFunction, x: f64) -> Result<f64> {
    let eh = exponential_expectation(h)?;
    exponential_solution_fh_with(h, eh, x)
}

pub fn exponential_solution_fh_with(h: &TestFunction, eh: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(invalid(format!("exponential solution needs x ≥ 0, got {x}")));
    }
    let breaks: Vec<f64> = h.kinks().into_iter().map(|k| k - x).filter(|u| *u > 0.0).collect();
    let v = quad::integrate_to_inf(|u| (h.value(x + u) - eh) * (-u).exp(), 0.0, &breaks, 1e-13)?;
    Ok(-v)
}

// ---------------------------------------------------------------------------
// operators

/// Anything the characterizing operators can act on.
pub trait SteinFn {
    fn value(&self, w: f64) -> Result<f64>;
    /// Registered derivative; `None` falls back to a centered difference.
    fn derivative(&self, _w: f64) -> Option<Result<f64>> {
        None
    }
    /// Points where f′ is discontinuous (used to split quadrature).
    fn kinks(&self) -> Vec<f64> {
        vec![]
    }
}

impl SteinFn for TestFunction {
    fn value(&self, w: f64) -> Result<f64> {
        Ok(TestFunction::value(self, w))
    }
    fn derivative(&self, w: f64) -> Option<Result<f64>> {
        TestFunction::derivative(self, w).map(Ok)
    }
    fn kinks(&self) -> Vec<f64> {
        TestFunction::kinks(self)
    }
}

/// f_x for the normal equation with its analytic derivative.
#[derive(Clone, Copy, Debug)]
pub struct NormalFx {
    pub x: f64,
}

impl SteinFn for NormalFx {
    fn value(&self, w: f64) -> Result<f64> {
        normal_solution_fx(self.x, w)
    }
    fn derivative(&self, w: f64) -> Option<Result<f64>> {
        Some(Ok(normal_solution_fx_derivative(self.x, w)))
    }
    fn kinks(&self) -> Vec<f64> {
        vec![self.x]
    }
}

/// Solution for the indicator of (a, b]: f_b − f_a.
#[derive(Clone, Copy, Debug)]
pub struct NormalIntervalSolution {
    pub a: f64,
    pub b: f64,
}

impl SteinFn for NormalIntervalSolution {
    fn value(&self, w: f64) -> Result<f64> {
        Ok(normal_solution_fx(self.b, w)? - normal_solution_fx(self.a, w)?)
    }
    fn derivative(&self, w: f64) -> Option<Result<f64>> {
        Some(Ok(normal_solution_fx_derivative(self.b, w) - normal_solution_fx_derivative(self.a, w)))
    }
    fn kinks(&self) -> Vec<f64> {
        vec![self.a, self.b]
    }
}

/// Normal solution for a general test function, derivative from the equation itself.
#[derive(Clone, Debug)]
pub struct NormalSolution {
    pub h: TestFunction,
    pub eh: f64,
}

impl NormalSolution {
    pub fn new(h: TestFunction) -> Result<Self> {
        let eh = normal_expectation(&h)?;
        Ok(NormalSolution { h, eh })
    }
    /// f″ = f + w f′ + h′ almost everywhere.
    pub fn second_derivative(&self, w: f64) -> Result<f64> {
        let f = self.value(w)?;
        let d = w * f + self.h.value(w) - self.eh;
        let hp = self.h.derivative(w).ok_or_else(|| invalid("h′ needed for f″"))?;
        Ok(f + w * d + hp)
    }
}

impl SteinFn for NormalSolution {
    fn value(&self, w: f64) -> Result<f64> {
        normal_solution_fh(&self.h, self.eh, w)
    }
    fn derivative(&self, w: f64) -> Option<Result<f64>> {
        Some(self.value(w).map(|f| w * f + self.h.value(w) - self.eh))
    }
    fn kinks(&self) -> Vec<f64> {
        self.h.kinks()
    }
}

#[derive(Clone, Debug)]
pub struct ExponentialSolution {
    pub h: TestFunction,
    pub eh: f64,
}

impl ExponentialSolution {
    pub fn new(h: TestFunction) -> Result<Self> {
        let eh = exponential_expectation(&h)?;
        Ok(ExponentialSolution { h, eh })
    }
}

impl SteinFn for ExponentialSolution {
    fn value(&self, x: f64) -> Result<f64> {
        exponential_solution_fh_with(&self.h, self.eh, x.max(0.0))
    }
    fn derivative(&self, x: f64) -> Option<Result<f64>> {
        Some(self.value(x).map(|f| f + self.h.value(x) - self.eh))
    }
    fn kinks(&self) -> Vec<f64> {
        self.h.kinks()
    }
}

#[derive(Clone, Debug)]
pub struct PoissonSolution {
    pub lambda: f64,
    pub set: IntegerSet,
}

impl SteinFn for PoissonSolution {
    fn value(&self, w: f64) -> Result<f64> {
        if w < 0.0 || w.fract() != 0.0 {
            return Err(invalid("Poisson solution lives on nonnegative integers"));
        }
        poisson_solution_fa(self.lambda, &self.set, w as u64)
    }
}

#[derive(Clone, Debug)]
pub struct GeometricSolution {
    pub p: f64,
    pub set: IntegerSet,
}

impl SteinFn for GeometricSolution {
    fn value(&self, w: f64) -> Result<f64> {
        if w < 0.0 || w.fract() != 0.0 {
            return Err(invalid("geometric solution lives on nonnegative integers"));
        }
        geometric_solution_fa(self.p, &self.set, w as u64)
    }
}

/// Any closure with an optional derivative.
pub struct FnStein<F: Fn(f64) -> f64> {
    pub f: F,
}

impl<F: Fn(f64) -> f64> SteinFn for FnStein<F> {
    fn value(&self, w: f64) -> Result<f64> {
        Ok((self.f)(w))
    }
}

pub const FD_STEP: f64 = 1e-6;

fn derivative_of(f: &dyn SteinFn, w: f64) -> Result<f64> {
    match f.derivative(w) {
        Some(d) => d,
        None => {
            let d = (f.value(w + FD_STEP)? - f.value(w - FD_STEP)?) / (2.0 * FD_STEP);
            if d.is_finite() {
                Ok(d)
            } else {
                Err(invalid(format!("derivative not evaluable at {w}")))
            }
        }
    }
}

/// A f(w) for the family's characterizing operator:
/// normal f′(w) − w f(w); Poisson λ f(w+1) − w f(w); exponential f′(w) − f(w) + f(0);
/// geometric (mass at zero) (1−p)Δf(w) − p f(w) + p f(0).
pub fn apply_characterizing_operator(family: &TargetLaw, f: &dyn SteinFn, w: f64) -> Result<f64> {
    family.validate()?;
    match *family {
        TargetLaw::Normal => Ok(derivative_of(f, w)? - w * f.value(w)?),
        TargetLaw::Poisson { lambda } => Ok(lambda * f.value(w + 1.0)? - w * f.value(w)?),
        TargetLaw::Exponential => Ok(derivative_of(f, w)? - f.value(w)? + f.value(0.0)?),
        TargetLaw::Geometric0 { p } => {
            let fw = f.value(w)?;
            Ok((1.0 - p) * (f.value(w + 1.0)? - fw) - p * fw + p * f.value(0.0)?)
        }
        TargetLaw::Geometric1 { .. } => Err(invalid("operator registered for the mass-at-zero geometric law")),
    }
}

/// E[A f(Z)] by exact summation (discrete) or quadrature (continuous).
pub fn expected_operator(family: &TargetLaw, f: &dyn SteinFn) -> Result<f64> {
    family.validate()?;
    match *family {
        TargetLaw::Normal => {
            let mut breaks = vec![-14.0, 14.0];
            breaks.extend(f.kinks().into_iter().filter(|k| k.abs() < 14.0));
            let err = std::cell::Cell::new(None);
            let v = quad::integrate_with_breaks(
                |w| match apply_characterizing_operator(family, f, w) {
                    Ok(a) => a * normal_pdf(w),
                    Err(e) => {
                        err.set(Some(e));
                        0.0
                    }
                },
                &breaks,
                1e-12,
            )?;
            match err.take() {
                Some(e) => Err(e),
                None => Ok(v),
            }
        }
        TargetLaw::Exponential => {
            let err = std::cell::Cell::new(None);
            let v = quad::integrate_to_inf(
                |w| match (-w).exp() {
                    wt if wt == 0.0 => 0.0,
                    wt => match apply_characterizing_operator(family, f, w) {
                        Ok(a) => a * wt,
                        Err(e) => {
                            err.set(Some(e));
                            0.0
                        }
                    },
                },
                0.0,
                &f.kinks(),
                1e-12,
            )?;
            match err.take() {
                Some(e) => Err(e),
                None => Ok(v),
            }
        }
        TargetLaw::Poisson { lambda } => discrete_expectation(
            |k| ln_poisson(lambda, k).exp(),
            lambda.max(1.0) as u64,
            |k| apply_characterizing_operator(family, f, k as f64),
        ),
        TargetLaw::Geometric0 { p } => discrete_expectation(
            |k| (1.0 - p).powi(k as i32) * p,
            0,
            |k| apply_characterizing_operator(family, f, k as f64),
        ),
        TargetLaw::Geometric1 { .. } => Err(invalid("operator registered for the mass-at-zero geometric law")),
    }
}

// Σ_k pmf(k) g(k), continued past the mode until 64 consecutive terms are negligible.
fn discrete_expectation<P: Fn(u64) -> f64, G: Fn(u64) -> Result<f64>>(pmf: P, mode: u64, g: G) -> Result<f64> {
    let mut acc = KahanAcc::default();
    let mut quiet = 0;
    let mut k = 0u64;
    loop {
        let pk = pmf(k);
        let term = if pk == 0.0 { 0.0 } else { pk * g(k)? };
        acc.add(term);
        if k > mode && term.abs() < 1e-20 {
            quiet += 1;
            if quiet > 64 {
                break;
            }
        } else {
            quiet = 0;
        }
        k += 1;
        if k > 100_000 {
            return Err(SteinError::Quadrature("series did not settle".into()));
        }
    }
    Ok(acc.value())
}

/// The function the operator acts on for test function h: continuous families cannot act on
/// indicators directly (their derivative is a point mass), so those enter through the Stein
/// solution of the indicator, which is absolutely continuous.
pub fn operator_argument(family: &TargetLaw, h: &TestFunction) -> Result<Box<dyn SteinFn>> {
    match (family, h) {
        (TargetLaw::Normal, TestFunction::IndicatorHalfline { x }) => Ok(Box::new(NormalFx { x: *x })),
        (TargetLaw::Normal, TestFunction::IndicatorSet { intervals }) if intervals.len() == 1 => {
            Ok(Box::new(NormalIntervalSolution { a: intervals[0].0, b: intervals[0].1 }))
        }
        (TargetLaw::Exponential, h) if h.is_indicator() => Ok(Box::new(ExponentialSolution::new(h.clone())?)),
        (TargetLaw::Normal, h) if h.is_indicator() => Ok(Box::new(NormalSolution::new(h.clone())?)),
        _ => Ok(Box::new(h.clone())),
    }
}

// ---------------------------------------------------------------------------
// certification

#[derive(Clone, Debug, Serialize)]
pub struct NormCheck {
    pub name: String,
    pub grid_max: f64,
    pub constant: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub family: String,
    pub checks: Vec<NormCheck>,
}

impl NormReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub const NORM_SLACK: f64 = 1e-9;

fn check(name: impl Into<String>, grid_max: f64, constant: f64) -> NormCheck {
    NormCheck { name: name.into(), grid_max, constant, pass: grid_max <= constant + NORM_SLACK }
}

/// Evaluation grid for the norm certification.
#[derive(Clone, Debug)]
pub struct CertGrid {
    /// Evaluation points w (continuous) or the largest k (discrete, via `max_k`).
    pub points: Vec<f64>,
    /// Levels x of the normal indicator solutions f_x.
    pub levels: Vec<f64>,
    pub max_k: u64,
    /// Subsets of {0..subset_bits−1}, each taken with and without the infinite upper part.
    pub subset_bits: u32,
    /// Test functions for the Lipschitz / bounded-h lemmas.
    pub test_functions: Vec<TestFunction>,
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

impl CertGrid {
    pub fn default_for(family: &TargetLaw) -> CertGrid {
        match family {
            TargetLaw::Normal => CertGrid {
                points: linspace(-10.0, 10.0, 401),
                levels: linspace(-6.0, 6.0, 121),
                max_k: 0,
                subset_bits: 0,
                test_functions: standard_suite().into_iter().filter(|h| h.lipschitz().is_some()).collect(),
            },
            TargetLaw::Exponential => CertGrid {
                points: linspace(0.0, 20.0, 201),
                levels: vec![],
                max_k: 0,
                subset_bits: 0,
                test_functions: vec![
                    TestFunction::IndicatorHalfline { x: 0.5 },
                    TestFunction::IndicatorHalfline { x: 1.0 },
                    TestFunction::IndicatorHalfline { x: 2.0 },
                    TestFunction::IndicatorSet { intervals: vec![(1.0, 3.0)] },
                    TestFunction::LipschitzHat { center: 1.0, slope: 1.0 },
                    TestFunction::LipschitzHat { center: 2.0, slope: 0.5 },
                ],
            },
            _ => CertGrid { points: vec![], levels: vec![], max_k: 40, subset_bits: 10, test_functions: vec![] },
        }
    }
}

fn subsets(bits: u32) -> impl Iterator<Item = IntegerSet> {
    (0u64..(1 << bits)).flat_map(move |mask| {
        let members: Vec<u64> = (0..bits as u64).filter(|i| mask >> i & 1 == 1).collect();
        // co-finite partner: the same finite pattern plus every integer ≥ bits
        let beyond = IntegerSet::cofinite((0..bits as u64).filter(|i| mask >> i & 1 == 0));
        [IntegerSet::finite(members), beyond]
    })
}

/// Grid maxima of the solution norms against the constants of the norm lemmas.
pub fn certify_solution_norms(family: &TargetLaw, grid: &CertGrid) -> Result<NormReport> {
    family.validate()?;
    let mut checks = Vec::new();
    match *family {
        TargetLaw::Normal => {
            let (mut f_max, mut d_max) = (0.0f64, 0.0f64);
            for &x in &grid.levels {
                for &w in &grid.points {
                    f_max = f_max.max(normal_solution_fx(x, w)?.abs());
                    d_max = d_max.max(normal_solution_fx_derivative(x, w).abs());
                }
            }
            checks.push(check("|f_x|", f_max, (std::f64::consts::PI / 2.0).sqrt()));
            checks.push(check("|f_x'|", d_max, 2.0));
            for h in &grid.test_functions {
                let lip = h.lipschitz().ok_or_else(|| invalid("Lipschitz test function expected"))?;
                let sol = NormalSolution::new(h.clone())?;
                let (mut m0, mut m1, mut m2) = (0.0f64, 0.0f64, 0.0f64);
                for &w in grid.points.iter().filter(|w| w.abs() <= 8.0) {
                    let f = sol.value(w)?;
                    m0 = m0.max(f.abs());
                    m1 = m1.max((w * f + h.value(w) - sol.eh).abs());
                    if !h.kinks().contains(&w) {
                        m2 = m2.max(sol.second_derivative(w)?.abs());
                    }
                }
                let label = h.label();
                checks.push(check(format!("|f_h| {label}"), m0, 2.0 * lip));
                checks.push(check(format!("|f_h'| {label}"), m1, (2.0 / std::f64::consts::PI).sqrt() * lip));
                checks.push(check(format!("|f_h''| {label}"), m2, 2.0 * lip));
            }
        }
        TargetLaw::Poisson { lambda } => {
            let (mut f_max, mut d_max) = (0.0f64, 0.0f64);
            let mut all: Vec<IntegerSet> = subsets(grid.subset_bits).collect();
            all.push(IntegerSet::empty());
            for a in &all {
                let mut prev = 0.0;
                for k in 0..=grid.max_k + 1 {
                    let f = poisson_solution_fa(lambda, a, k)?;
                    f_max = f_max.max(f.abs());
                    if k > 0 {
                        d_max = d_max.max((f - prev).abs());
                    }
                    prev = f;
                }
            }
            // the supremum over all sets is attained through linearity in the singletons
            let span = grid.max_k + 60;
            for k in 1..=grid.max_k {
                let (mut pos, mut neg, mut dpos, mut dneg) = (0.0, 0.0, 0.0, 0.0);
                for j in 0..span {
                    let s = IntegerSet::finite([j]);
                    let f = poisson_solution_fa(lambda, &s, k)?;
                    let d = poisson_solution_fa(lambda, &s, k + 1)? - f;
                    if f > 0.0 { pos += f } else { neg -= f }
                    if d > 0.0 { dpos += d } else { dneg -= d }
                }
                f_max = f_max.max(pos).max(neg);
                d_max = d_max.max(dpos).max(dneg);
            }
            checks.push(check("|f_A|", f_max, 1.0f64.min(lambda.powf(-0.5))));
            checks.push(check("|Δf_A|", d_max, (1.0 - (-lambda).exp()) / lambda));
        }
        TargetLaw::Geometric0 { p } => {
            let mut d_max = 0.0f64;
            let mut all: Vec<IntegerSet> = subsets(grid.subset_bits).collect();
            all.push(IntegerSet::empty());
            for a in &all {
                for k in 0..=grid.max_k {
                    let d = geometric_solution_fa(p, a, k + 1)? - geometric_solution_fa(p, a, k)?;
                    d_max = d_max.max(d.abs());
                }
            }
            checks.push(check("|Δf_A|", d_max, 1.0));
        }
        TargetLaw::Exponential => {
            for h in &grid.test_functions {
                let sol = ExponentialSolution::new(h.clone())?;
                let mut m0 = 0.0f64;
                for &x in &grid.points {
                    m0 = m0.max(sol.value(x)?.abs());
                }
                let bound = h.sup_norm().ok_or_else(|| invalid("bounded test function expected"))?;
                checks.push(check(format!("|f_h| {}", h.label()), m0, bound));
                if let Some(lip) = h.lipschitz() {
                    let mut m1 = 0.0f64;
                    for &x in &grid.points {
                        m1 = m1.max((sol.value(x)? + h.value(x) - sol.eh).abs());
                    }
                    checks.push(check(format!("|f_h'| {}", h.label()), m1, lip));
                }
            }
        }
        TargetLaw::Geometric1 { .. } => {
            return Err(invalid("norm lemmas are stated for the mass-at-zero geometric law"));
        }
    }
    Ok(NormReport { family: family.name(), checks })
}
