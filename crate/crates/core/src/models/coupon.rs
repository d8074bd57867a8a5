//! Coupon collecting: empty boxes after k balls into n boxes.

use crate::couplings::{CouplingDraw, CouplingKind};
use crate::dist::{choose, Categorical, FinitePmf, KahanAcc, RngStream};
use crate::error::{invalid, Result, SteinError};

pub const COUPON_MAX_N: usize = 12;

fn check_probs(n: usize, probs: Option<&[f64]>) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("at least one box required"));
    }
    match probs {
        None => Ok(vec![1.0 / n as f64; n]),
        Some(ps) => {
            if ps.len() != n {
                return Err(invalid(format!("{} box probabilities for {n} boxes", ps.len())));
            }
            if ps.iter().any(|p| !(*p >= 0.0)) || (ps.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(invalid("box probabilities must be nonnegative and sum to 1"));
            }
            Ok(ps.to_vec())
        }
    }
}

fn throw(n: usize, k: usize, cat: &Categorical, rng: &mut RngStream) -> Vec<usize> {
    let mut boxes = vec![0usize; n];
    for _ in 0..k {
        boxes[cat.sample(rng)] += 1;
    }
    boxes
}

pub fn coupon_empty_boxes(n: usize, k: usize, probs: Option<&[f64]>, rng: &mut RngStream) -> Result<u64> {
    let ps = check_probs(n, probs)?;
    let cat = Categorical::new(&ps)?;
    Ok(throw(n, k, &cat, rng).iter().filter(|c| **c == 0).count() as u64)
}

/// Exact law of the empty-box count.
///
/// Uniform boxes use the occupancy chain (j occupied → j+1 with probability (n−j)/n), which
/// avoids the cancellation of the inclusion–exclusion sum; non-uniform boxes enumerate
/// occupied subsets.
pub fn coupon_exact_pmf(n: usize, k: usize, probs: Option<&[f64]>) -> Result<FinitePmf> {
    let ps = check_probs(n, probs)?;
    if probs.is_none() {
        let nf = n as f64;
        let mut occ = vec![0.0; n + 1];
        occ[0] = 1.0;
        for _ in 0..k {
            let mut next = vec![0.0; n + 1];
            for j in 0..=n {
                if occ[j] == 0.0 {
                    continue;
                }
                next[j] += occ[j] * j as f64 / nf;
                if j < n {
                    next[j + 1] += occ[j] * (n - j) as f64 / nf;
                }
            }
            occ = next;
        }
        let probs: Vec<f64> = (0..=n).map(|e| occ[n - e]).collect();
        return FinitePmf::from_noisy(0, probs, 0.0);
    }
    if n > COUPON_MAX_N {
        return Err(SteinError::OracleInfeasible(format!("subset enumeration capped at n={COUPON_MAX_N}, requested n={n}")));
    }
    let mut state = vec![0.0; 1 << n];
    state[0] = 1.0;
    for _ in 0..k {
        let mut next = vec![0.0; 1 << n];
        for (s, &m) in state.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for (b, &p) in ps.iter().enumerate() {
                next[s | 1 << b] += m * p;
            }
        }
        state = next;
    }
    let mut out = vec![0.0; n + 1];
    for (s, m) in state.iter().enumerate() {
        out[n - (s as u32).count_ones() as usize] += m;
    }
    FinitePmf::from_noisy(0, out, 0.0)
}

/// P(W = j) = C(n,j) Σ_i (−1)^i C(n−j,i) ((n−j−i)/n)^k, kept as an independent cross-check.
pub fn coupon_inclusion_exclusion(n: usize, k: usize) -> Vec<f64> {
    (0..=n)
        .map(|j| {
            let mut acc = KahanAcc::default();
            for i in 0..=(n - j) {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                acc.add(sign * choose((n - j) as u64, i as u64) * ((n - j - i) as f64 / n as f64).powi(k as i32));
            }
            choose(n as u64, j as u64) * acc.value()
        })
        .collect()
}

/// Size-bias coupling: pick box I with P(I=i) ∝ P(box i empty), move its balls to the other
/// boxes according to the renormalized probabilities. Other boxes only gain balls.
pub fn coupon_size_bias_coupler(n: usize, k: usize, probs: Option<&[f64]>, rng: &mut RngStream) -> Result<CouplingDraw> {
    let ps = check_probs(n, probs)?;
    if n < 2 {
        return Err(invalid("need at least two boxes"));
    }
    let cat = Categorical::new(&ps)?;
    let mut boxes = throw(n, k, &cat, rng);
    let w = boxes.iter().filter(|c| **c == 0).count();
    let empty_p: Vec<f64> = ps.iter().map(|p| (1.0 - p).powi(k as i32)).collect();
    let i = Categorical::new(&empty_p)?.sample(rng);
    let before = boxes.clone();
    let moved = boxes[i];
    boxes[i] = 0;
    let others: Vec<f64> = ps.iter().enumerate().map(|(j, p)| if j == i { 0.0 } else { *p }).collect();
    let redistribute = Categorical::new(&others)?;
    for _ in 0..moved {
        boxes[redistribute.sample(rng)] += 1;
    }
    for j in 0..n {
        if j != i && (boxes[j] == 0) && (before[j] != 0) {
            return Err(SteinError::ModelBug(format!("box {j} became empty under the coupling")));
        }
    }
    let ws = boxes.iter().filter(|c| **c == 0).count();
    Ok(CouplingDraw::new(w as f64, ws as f64, CouplingKind::SizeBias).with("I", i as f64).with("moved", moved as f64))
}

pub fn coupon_mean(n: usize, k: usize) -> f64 {
    n as f64 * (1.0 - 1.0 / n as f64).powi(k as i32)
}
