//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::collections::BinaryHeap;
use std::cmp::Ordering;

use crate::error::{Result, SteinError};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_INTERVALS: usize = 20_000;

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// ∫_a^b f to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    integrate_with_breaks(f, &[a, b], tol)
}

/// ∫ over [breaks[0], breaks[last]] with the integrand's kinks listed in `breaks`.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: f64) -> Result<f64> {
    let mut pts: Vec<f64> = breaks.to_vec();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if pts.len() < 2 {
        return Ok(0.0);
    }
    let mut heap = BinaryHeap::new();
    let mut total_err = 0.0;
    for w in pts.windows(2) {
        let (v, e) = gk15(&f, w[0], w[1]);
        if !v.is_finite() {
            return Err(SteinError::Quadrature(format!("non-finite integrand on [{}, {}]", w[0], w[1])));
        }
        total_err += e;
        heap.push(Piece { a: w[0], b: w[1], value: v, err: e });
    }
    while total_err > tol {
        if heap.len() >= MAX_INTERVALS {
            return Err(SteinError::Quadrature(format!(
                "error estimate {total_err:e} above tolerance {tol:e} after {MAX_INTERVALS} subintervals"
            )));
        }
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval can no longer be split in floating point
            return Err(SteinError::Quadrature(format!("interval collapsed near {mid}")));
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        if !(v1 + v2).is_finite() {
            return Err(SteinError::Quadrature(format!("non-finite integrand near {mid}")));
        }
        total_err += e1 + e2 - worst.err;
        heap.push(Piece { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, err: e2 });
        // running sums drift; recompute occasionally
        if heap.len() % 512 == 0 {
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }
    Ok(heap.iter().map(|p| p.value).sum())
}

/// ∫_a^∞ f via the substitution x = a + t/(1−t); breaks are given in x.
pub fn integrate_to_inf<F: Fn(f64) -> f64>(f: F, a: f64, breaks: &[f64], tol: f64) -> Result<f64> {
    let g = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - t;
        let v = f(a + t / s);
        if v == 0.0 {
            0.0
        } else {
            v / (s * s)
        }
    };
    let mut tb = vec![0.0, 1.0];
    for &x in breaks {
        if x > a && x.is_finite() {
            let d = x - a;
            tb.push(d / (1.0 + d));
        }
    }
    integrate_with_breaks(g, &tb, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 1e-14).unwrap();
        assert!((v - (3.75 - 3.0 + 3.0)).abs() < 1e-13);
    }

    #[test]
    fn exponential_tail() {
        let v = integrate_to_inf(|x| (-x).exp(), 0.0, &[], 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kink_with_break() {
        let v = integrate_with_breaks(|x: f64| (x - 0.3).abs(), &[0.0, 0.3, 1.0], 1e-14).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-14);
    }
}
