//! Certified extrema of `|a(z)|` on circles `|z| = r`.
//!
//! The squared modulus of a polynomial on a circle is the trigonometric
//! polynomial `T(θ) = r₀ + 2·Re Σₖ rₖ e^{ikθ}` built from the autocorrelation
//! of the scaled coefficients. A uniform grid plus a second-order Taylor
//! remainder brackets `min T`, and cells near the minimum are bisected until
//! the bracket closes; when every `rₖ` with `k ≥ 1` vanishes exactly
//! (for instance `a(z) = zᵐ`), `T` is constant and the bracket is exact.

use std::f64::consts::PI;

use crate::interval::CertifiedInterval;
use crate::scalar::{C64, ZERO};

pub const DEFAULT_GRID_LOG2: u32 = 14;

/// Maximum number of cell bisections after the uniform grid.
const REFINE_BUDGET: usize = 1 << 16;

struct TrigPoly {
    r0: f64,
    r: Vec<C64>, // r[k-1] multiplies e^{ikθ}
}

impl TrigPoly {
    fn from_coeffs(coeffs: &[C64], radius: f64) -> Self {
        let scaled: Vec<C64> = coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * radius.powi(k as i32))
            .collect();
        let d = scaled.len();
        let r0 = scaled.iter().map(|a| a.norm_sqr()).sum();
        let r = (1..d)
            .map(|k| (0..d - k).map(|j| scaled[j + k] * scaled[j].conj()).sum())
            .collect();
        Self { r0, r }
    }

    fn is_constant(&self) -> bool {
        self.r.iter().all(|c| *c == ZERO)
    }

    // (T, T') at θ
    fn eval(&self, theta: f64) -> (f64, f64) {
        let w = C64::from_polar(1.0, theta);
        let mut s = ZERO;
        let mut ds = ZERO;
        for (k, rk) in self.r.iter().enumerate().rev() {
            s = (s + rk) * w;
            ds = (ds + rk * (k + 1) as f64) * w;
        }
        (self.r0 + 2.0 * s.re, -2.0 * ds.im)
    }

    fn second_derivative_bound(&self) -> f64 {
        2.0 * self.r.iter().enumerate().map(|(k, c)| ((k + 1) as f64).powi(2) * c.norm()).sum::<f64>()
    }

    fn magnitude(&self) -> f64 {
        self.r0 + 2.0 * self.r.iter().map(|c| c.norm()).sum::<f64>()
    }
}

/// Bracket for `min_{|z|=radius} |a(z)|²`.
pub fn min_modulus_sq(coeffs: &[C64], radius: f64, grid_log2: u32) -> CertifiedInterval {
    let t = TrigPoly::from_coeffs(coeffs, radius);
    if t.is_constant() {
        return CertifiedInterval::exact(t.r0);
    }
    let g = 1usize << grid_log2;
    let half = PI / g as f64;
    let m2 = t.second_derivative_bound();
    let pad = 4.0 * (t.r.len() + 2) as f64 * f64::EPSILON * t.magnitude();
    let cell = |theta: f64, w: f64| {
        let (v, dv) = t.eval(theta);
        (v, v - dv.abs() * w - 0.5 * m2 * w * w)
    };
    let mut hi = f64::INFINITY;
    let mut cells = Vec::with_capacity(g);
    for i in 0..g {
        let theta = 2.0 * PI * i as f64 / g as f64;
        let (v, lo) = cell(theta, half);
        hi = hi.min(v);
        cells.push((theta, half, lo));
    }
    // bisect the cells whose bound could still undercut the sampled minimum
    let gap = 1e-13 * t.magnitude();
    let mut lo = f64::INFINITY;
    let mut budget = REFINE_BUDGET;
    while let Some((theta, w, bound)) = cells.pop() {
        if bound >= hi - gap || budget == 0 {
            lo = lo.min(bound);
            continue;
        }
        budget -= 1;
        let w2 = 0.5 * w;
        for c in [theta - w2, theta + w2] {
            let (v, b) = cell(c, w2);
            hi = hi.min(v);
            cells.push((c, w2, b));
        }
    }
    let lo = lo - pad;
    CertifiedInterval::new(lo.min(hi), hi)
}

/// Bracket for `min_{|z|=radius} |a(z)|`.
pub fn min_modulus(coeffs: &[C64], radius: f64, grid_log2: u32) -> CertifiedInterval {
    let sq = min_modulus_sq(coeffs, radius, grid_log2);
    CertifiedInterval::new(sq.lower.max(0.0).sqrt(), sq.upper.max(0.0).sqrt())
}

/// Winding number of `a` around zero along `|z| = radius`, i.e. the number
/// of zeros inside, or `None` when the grid cannot certify it.
///
/// Between consecutive grid points `a` moves by at most `L·h` with `L` the
/// coefficient bound on `|a′|`; when that is below the certified minimum
/// modulus no step can wrap around the origin.
pub fn winding_number(coeffs: &[C64], radius: f64, grid_log2: u32) -> Option<i64> {
    let min = min_modulus(coeffs, radius, grid_log2).lower;
    if min <= 0.0 {
        return None;
    }
    let lip: f64 = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, a)| k as f64 * a.norm() * radius.powi(k as i32 - 1))
        .sum();
    let g = 1usize << grid_log2;
    let step = 2.0 * PI * radius / g as f64;
    if lip * step >= min {
        return None;
    }
    let eval = |theta: f64| {
        let z = C64::from_polar(radius, theta);
        coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    };
    let mut total = 0.0;
    let mut prev = eval(0.0);
    for i in 1..=g {
        let cur = eval(2.0 * PI * i as f64 / g as f64);
        total += (cur / prev).arg();
        prev = cur;
    }
    Some((total / (2.0 * PI)).round() as i64)
}
