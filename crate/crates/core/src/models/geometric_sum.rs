//! Random sums W = p Σ_{i≤N} X_i of unit-mean increments and their equilibrium coupling
//! W^e = p[Σ_{i<M} X_i + X_M^e].

use rand_distr::{Distribution, Exp1};

use crate::couplings::{CouplingDraw, CouplingKind};
use crate::dist::{geometric_pmf, sample_uniform01, FinitePmf, GeometricConvention, RngStream};
use crate::error::{invalid, Result};

/// Unit-mean nonnegative increment laws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Increment {
    /// X ≡ 1; X^e uniform on (0,1).
    One,
    /// X uniform on [0,2]; X^e has density 1 − x/2 on [0,2], coupled through a common
    /// uniform.
    Uniform02,
    /// X ~ Exp(1), its own equilibrium law; X^e = X.
    Exponential,
}

impl Increment {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "one" | "constant" => Ok(Increment::One),
            "uniform" | "uniform02" => Ok(Increment::Uniform02),
            "exponential" | "exp" => Ok(Increment::Exponential),
            _ => Err(invalid(format!("unknown increment law '{s}'"))),
        }
    }

    /// μ₂ = E[X²]
    pub fn second_moment(&self) -> f64 {
        match self {
            Increment::One => 1.0,
            Increment::Uniform02 => 4.0 / 3.0,
            Increment::Exponential => 2.0,
        }
    }

    /// E|X − X^e| under the coupling used here.
    pub fn coupled_abs_diff(&self) -> f64 {
        match self {
            Increment::One => 0.5,
            Increment::Uniform02 => 1.0 / 3.0,
            Increment::Exponential => 0.0,
        }
    }

    fn draw(&self, rng: &mut RngStream) -> f64 {
        match self {
            Increment::One => 1.0,
            Increment::Uniform02 => 2.0 * sample_uniform01(rng),
            Increment::Exponential => Exp1.sample(rng),
        }
    }

    /// (X, X^e) on one space.
    fn draw_pair(&self, rng: &mut RngStream) -> (f64, f64) {
        match self {
            Increment::One => (1.0, sample_uniform01(rng)),
            Increment::Uniform02 => {
                let u = sample_uniform01(rng);
                (2.0 * u, 2.0 * (1.0 - (1.0 - u).sqrt()))
            }
            Increment::Exponential => {
                let x: f64 = Exp1.sample(rng);
                (x, x)
            }
        }
    }
}

/// Law of the number of summands N ≥ 1.
#[derive(Clone, Debug, PartialEq)]
pub enum CountLaw {
    /// Ge1(p); M can be taken equal to N.
    Geometric1 { p: f64 },
    /// Any finite law on {1,2,…}; M is quantile-coupled to N.
    Pmf(FinitePmf),
}

#[derive(Clone, Debug)]
pub struct GeometricSum {
    increment: Increment,
    count: CountLaw,
    p: f64,
    n_law: FinitePmf,
    m_law: FinitePmf,
}

impl GeometricSum {
    pub fn new(increment: Increment, count: CountLaw) -> Result<Self> {
        let (n_law, p) = match &count {
            CountLaw::Geometric1 { p } => {
                if !(*p > 0.0 && *p <= 1.0) {
                    return Err(invalid(format!("p must lie in (0,1], got {p}")));
                }
                (geometric_pmf(*p, GeometricConvention::One, 1e-14)?, *p)
            }
            CountLaw::Pmf(law) => {
                if law.min_support() < 1 {
                    return Err(invalid("N must be at least 1"));
                }
                (law.clone(), 1.0 / law.mean())
            }
        };
        // P(M = m) = p P(N ≥ m)
        let top = n_law.max_support();
        let m_probs: Vec<f64> = (1..=top).map(|m| p * (1.0 - n_law.cdf(m - 1))).collect();
        let m_law = FinitePmf::from_noisy(1, m_probs, 0.0)?;
        Ok(GeometricSum { increment, count, p, n_law, m_law })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn increment(&self) -> Increment {
        self.increment
    }
    pub fn m_law(&self) -> &FinitePmf {
        &self.m_law
    }
    pub fn n_law(&self) -> &FinitePmf {
        &self.n_law
    }

    /// E|N − M| under the coupling (zero for geometric N).
    pub fn e_abs_n_minus_m(&self) -> f64 {
        match self.count {
            CountLaw::Geometric1 { .. } => 0.0,
            CountLaw::Pmf(_) => {
                // quantile coupling: ∫_0^1 |F_N^{-1}(u) − F_M^{-1}(u)| du = Σ_k |F_N(k) − F_M(k)|
                let top = self.n_law.max_support().max(self.m_law.max_support());
                (0..=top).map(|k| (self.n_law.cdf(k) - self.m_law.cdf(k)).abs()).sum()
            }
        }
    }

    fn quantile(law: &FinitePmf, u: f64) -> i64 {
        let mut acc = 0.0;
        for (k, q) in law.iter() {
            acc += q;
            if u < acc {
                return k;
            }
        }
        law.max_support()
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        let n = Self::quantile(&self.n_law, sample_uniform01(rng));
        self.p * (0..n).map(|_| self.increment.draw(rng)).sum::<f64>()
    }

    pub fn coupled_draw(&self, rng: &mut RngStream) -> Result<CouplingDraw> {
        let u = sample_uniform01(rng);
        let n = Self::quantile(&self.n_law, u);
        let m = match self.count {
            CountLaw::Geometric1 { .. } => n,
            CountLaw::Pmf(_) => Self::quantile(&self.m_law, u),
        };
        let top = n.max(m) as usize;
        let mut xs = Vec::with_capacity(top);
        let mut x_me = 0.0;
        for i in 1..=top {
            if i as i64 == m {
                let (x, xe) = self.increment.draw_pair(rng);
                xs.push(x);
                x_me = xe;
            } else {
                xs.push(self.increment.draw(rng));
            }
        }
        let w = self.p * xs[..n as usize].iter().sum::<f64>();
        let we = self.p * (xs[..(m - 1) as usize].iter().sum::<f64>() + x_me);
        Ok(CouplingDraw::new(w, we, CouplingKind::Equilibrium)
            .with("N", n as f64)
            .with("M", m as f64)
            .with("x_m", xs[(m - 1) as usize])
            .with("x_m_e", x_me))
    }
}
