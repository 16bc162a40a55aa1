//! Binomial-times-geometric tail terms.
//!
//! A term stores a polynomial `P` in the binomial basis together with a ratio
//! `ρ` and stands for the values `P(j)·ρʲ` at the relative index `j ≥ 1`
//! (the sequence index minus the head length). Degree-zero terms are plain
//! geometric sequences; higher degrees appear as soon as a first-order
//! recurrence is driven at its own characteristic ratio, which is exactly
//! what iterating a right inverse of `I + λB` does.
//!
//! The binomial basis `C(j, i)` keeps the coefficients of those resonant
//! solutions small and makes the unit shift `j ↦ j + 1` a two-term update.

use crate::scalar::{C64, ZERO};
use crate::{Error, Result};

/// Relative size under which an evaluated symbol value is rounding noise.
pub(crate) const SNAP: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone, PartialEq)]
pub struct GeomTerm {
    /// Coefficients of `P` in the basis `C(j, 0), C(j, 1), …`.
    pub poly: Vec<C64>,
    pub ratio: C64,
}

/// `C(n, k)` as a float, for a nonnegative integer `n`.
pub fn binomial(n: u64, k: usize) -> f64 {
    if k as u64 > n {
        return 0.0;
    }
    let k = k.min((n - k as u64) as usize);
    let mut acc = 1.0;
    for t in 0..k {
        acc = acc * (n - t as u64) as f64 / (t + 1) as f64;
    }
    acc
}

/// Evaluates `Σ pᵢ·C(x, i)` for real `x` (generalized binomials), nested form.
pub fn eval_binomial_poly(poly: &[C64], x: f64) -> C64 {
    let Some((&last, rest)) = poly.split_last() else {
        return ZERO;
    };
    let mut acc = last;
    for i in (1..=rest.len()).rev() {
        acc = rest[i - 1] + acc * ((x - i as f64 + 1.0) / i as f64);
    }
    acc
}

fn trim(poly: &mut Vec<C64>) {
    while poly.last().is_some_and(|c| *c == ZERO) {
        poly.pop();
    }
}

impl GeomTerm {
    pub fn geometric(coeff: C64, ratio: C64) -> Self {
        Self { poly: vec![coeff], ratio }
    }

    pub fn new(poly: Vec<C64>, ratio: C64) -> Self {
        let mut t = Self { poly, ratio };
        trim(&mut t.poly);
        t
    }

    /// Leading (degree-zero) coefficient.
    pub fn coeff(&self) -> C64 {
        self.poly.first().copied().unwrap_or(ZERO)
    }

    pub fn degree(&self) -> usize {
        self.poly.len().saturating_sub(1)
    }

    /// True when the term contributes nothing at any index `j ≥ 1`.
    pub fn is_zero(&self) -> bool {
        self.ratio == ZERO || self.poly.iter().all(|c| *c == ZERO)
    }

    pub fn eval(&self, j: u64) -> C64 {
        eval_binomial_poly(&self.poly, j as f64) * self.ratio.powu(j as u32)
    }

    pub fn scale(&self, k: C64) -> Self {
        Self::new(self.poly.iter().map(|c| c * k).collect(), self.ratio)
    }

    /// The same values re-indexed so that relative index `j` here is `j + k`
    /// in `self`: returns `Q` with `Q(j)ρʲ = P(j+k)ρʲ⁺ᵏ`.
    pub fn shift_forward(&self, k: u64) -> Self {
        if k == 0 {
            return self.clone();
        }
        let rk = self.ratio.powu(k as u32);
        let d = self.poly.len();
        let poly = (0..d)
            .map(|i| (i..d).map(|t| self.poly[t] * binomial(k, t - i)).sum::<C64>() * rk)
            .collect();
        Self::new(poly, self.ratio)
    }

    /// Moments `E_m = Σₖ aₖ ρᵏ C(k, m)` of a polynomial symbol at this ratio,
    /// with `E_0 = a(ρ)` snapped to zero when it is below rounding level.
    fn symbol_moments(&self, a: &[C64], count: usize) -> Vec<C64> {
        let mut moments = vec![ZERO; count.max(1)];
        let mut pow = C64::new(1.0, 0.0);
        let mut scale = 0.0;
        for (k, ak) in a.iter().enumerate() {
            let w = ak * pow;
            scale += w.norm();
            for (m, e) in moments.iter_mut().enumerate() {
                *e += w * binomial(k as u64, m);
            }
            pow *= self.ratio;
        }
        if moments[0].norm() <= SNAP * scale {
            moments[0] = ZERO;
        }
        moments
    }

    /// Tail of `a(B)` applied to this term: `Σₖ aₖ P(j+k) ρʲ⁺ᵏ`.
    pub fn apply_symbol(&self, a: &[C64]) -> Self {
        let d = self.poly.len();
        let e = self.symbol_moments(a, d);
        let poly = (0..d)
            .map(|i| (i..d).map(|t| e[t - i] * self.poly[t]).sum())
            .collect();
        Self::new(poly, self.ratio)
    }

    /// Solves `a(B)x = self` inside the tail class.
    ///
    /// Non-resonant ratios (`a(ρ) ≠ 0`) give a term of the same degree by
    /// triangular back-substitution. A resonant ratio is solvable here only
    /// for first-order symbols, where the degree rises by one and the free
    /// constant coefficient is set to zero.
    pub fn solve_symbol(&self, a: &[C64]) -> Result<Self> {
        let d = self.poly.len();
        let e = self.symbol_moments(a, d + 1);
        if e[0] != ZERO {
            let mut p = vec![ZERO; d];
            for i in (0..d).rev() {
                let acc: C64 = (i + 1..d).map(|t| e[t - i] * p[t]).sum();
                p[i] = (self.poly[i] - acc) / e[0];
            }
            return Ok(Self::new(p, self.ratio));
        }
        if a.len() != 2 || e[1] == ZERO {
            return Err(Error::Resonant(format!("{}", self.ratio)));
        }
        // first order: (LP)_i = E_1 p_{i+1}
        let mut p = vec![ZERO; d + 1];
        for i in 0..d {
            p[i + 1] = self.poly[i] / e[1];
        }
        Ok(Self::new(p, self.ratio))
    }

    /// Re-expresses `m ↦ P(s·m + c)` in the binomial basis in `m`.
    ///
    /// Used by the interleaving maps, which sample a tail along an arithmetic
    /// progression of indices. The polynomial degree is preserved; the
    /// coefficients are the forward differences at `m = 0`.
    pub fn compose_affine_poly(&self, s: f64, c: f64) -> Vec<C64> {
        let d = self.poly.len();
        let mut diffs: Vec<C64> = (0..d).map(|m| eval_binomial_poly(&self.poly, s * m as f64 + c)).collect();
        let mut out = Vec::with_capacity(d);
        for k in 0..d {
            out.push(diffs[0]);
            for t in 0..d - k - 1 {
                diffs[t] = diffs[t + 1] - diffs[t];
            }
        }
        out
    }

    /// An upper bound on `sup_{j > h} |P(j)ρʲ|`.
    pub fn sup_after(&self, h: u64) -> f64 {
        let r = self.ratio.norm();
        self.poly
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(i, c)| c.norm() * binomial_geometric_sup(i, r, h))
            .sum()
    }

    /// Whether the term is bounded: `|ρ| ≤ 1`, strictly when the degree is positive.
    pub fn is_bounded(&self) -> bool {
        let r = self.ratio.norm();
        if crate::scalar::is_unimodular(self.ratio) {
            self.degree() == 0
        } else {
            r < 1.0
        }
    }
}

/// `sup_{j > h} C(j, i)·rʲ` for `0 ≤ r ≤ 1`.
///
/// The ratio of consecutive values is `(j+1)r/(j+1−i)`, decreasing in `j`,
/// so the sequence rises to a single peak and then decays.
pub fn binomial_geometric_sup(i: usize, r: f64, h: u64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    if r >= 1.0 {
        return if i == 0 { 1.0 } else { f64::INFINITY };
    }
    let g = |j: u64| -> f64 {
        if (j as usize) < i {
            return 0.0;
        }
        let log_binom: f64 = (0..i).map(|t| ((j - t as u64) as f64).ln() - ((t + 1) as f64).ln()).sum();
        (log_binom + j as f64 * r.ln()).exp()
    };
    // g(j+1) ≤ g(j) as soon as j + 1 ≥ i/(1-r)
    let turn = (i as f64 / (1.0 - r)).ceil();
    let first = h + 1;
    if (first as f64) >= turn {
        return g(first);
    }
    let peak = turn as u64;
    [peak.saturating_sub(1), peak, peak + 1]
        .into_iter()
        .filter(|&j| j >= first)
        .map(g)
        .fold(0.0, f64::max)
}
