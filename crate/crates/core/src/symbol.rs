//! Polynomial and power-series symbols of the backward shift.
//!
//! A symbol `a(z) = Σ aₖ zᵏ` acts by `(a(B)x)ₙ = Σₖ aₖ xₙ₊ₖ`. On `l∞` its
//! operator norm is `Σ|aₖ|`: the bound is the triangle inequality, and a
//! head whose entries carry the conjugate phases of the coefficients attains
//! it. Series symbols store finitely many coefficients plus a geometric
//! majorant `|aₖ| ≤ M·γᵏ` for the unstored ones.

use serde::{Deserialize, Serialize};

use crate::circle;
use crate::interval::CertifiedInterval;
use crate::scalar::{self, C64, ZERO};
use crate::seq::GeomSequence;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Majorant {
    #[serde(rename = "M")]
    pub m: f64,
    pub gamma: f64,
}

impl Majorant {
    /// `Σ_{k>order} M·γᵏ`.
    pub fn tail_sum(&self, order: usize) -> f64 {
        if self.m == 0.0 || self.gamma == 0.0 {
            return 0.0;
        }
        self.m * self.gamma.powi(order as i32 + 1) / (1.0 - self.gamma)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSymbol {
    #[serde(with = "scalar::pair_vec")]
    coeffs: Vec<C64>,
    majorant: Option<Majorant>,
}

impl OperatorSymbol {
    /// A polynomial symbol; trailing zero coefficients are dropped.
    pub fn polynomial(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        Self { coeffs, majorant: None }
    }

    pub fn series(coeffs: Vec<C64>, majorant: Option<Majorant>) -> Result<Self> {
        let Some(maj) = majorant else {
            return Err(Error::InvalidSymbol("series symbol requires a coefficient majorant".into()));
        };
        if !(maj.m >= 0.0 && (0.0..1.0).contains(&maj.gamma)) {
            return Err(Error::InvalidSymbol(format!(
                "majorant needs M ≥ 0 and 0 ≤ γ < 1, got M = {}, γ = {}",
                maj.m, maj.gamma
            )));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidSymbol("series symbol needs at least one stored coefficient".into()));
        }
        Ok(Self { coeffs, majorant: Some(maj) })
    }

    /// The constant symbol `c`.
    pub fn constant(c: C64) -> Self {
        Self::polynomial(vec![c])
    }

    /// `z ↦ zᵏ`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = scalar::ONE;
        Self::polynomial(coeffs)
    }

    /// `c·∏(z − zₖ)`.
    pub fn from_roots(c: C64, roots: &[C64]) -> Self {
        let mut coeffs = vec![c];
        for r in roots {
            coeffs = convolve(&coeffs, &[-r, scalar::ONE]);
        }
        Self::polynomial(coeffs)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn majorant(&self) -> Option<Majorant> {
        self.majorant
    }

    pub fn is_polynomial(&self) -> bool {
        self.majorant.is_none()
    }

    /// Truncation order `K` (index of the last stored coefficient).
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Bound on `Σ_{k>K} |aₖ|`.
    pub fn tail_bound(&self) -> f64 {
        self.majorant.map_or(0.0, |m| m.tail_sum(self.order()))
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            majorant: self.majorant.map(|m| Majorant { m: m.m * k.norm(), gamma: m.gamma }),
        }
    }

    // γ = 0 means every unstored coefficient vanishes
    fn effective_polynomial(&self) -> bool {
        self.majorant.is_none_or(|m| m.gamma == 0.0 || m.m == 0.0)
    }

    /// Smallest `M̂` with `|aₖ| ≤ M̂·γᵏ` for every `k`, stored ones included.
    fn uniform_majorant(&self, gamma: f64) -> f64 {
        let stored = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.norm() / gamma.powi(k as i32))
            .fold(0.0, f64::max);
        stored.max(self.majorant.map_or(0.0, |m| m.m))
    }
}

pub(crate) fn convolve(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `(I + λB)x`.
pub fn apply_shift(lambda: C64, x: &GeomSequence) -> GeomSequence {
    apply_polynomial(&[scalar::ONE, lambda], x)
}

/// `Bx`.
pub fn backward_shift(x: &GeomSequence) -> GeomSequence {
    apply_polynomial(&[ZERO, scalar::ONE], x)
}

/// `a(B)x` for a polynomial with coefficients `a`, exact on the class.
pub fn apply_polynomial(a: &[C64], x: &GeomSequence) -> GeomSequence {
    let n = x.head_len();
    let head = (1..=n)
        .map(|i| a.iter().enumerate().map(|(k, ak)| ak * x.eval(i + k)).sum())
        .collect();
    let tail = x.tail().iter().map(|t| t.apply_symbol(a)).collect();
    GeomSequence::from_parts(head, tail)
}

/// `a(B)x` and a bound on the sup-norm of the truncation error.
///
/// Polynomials act exactly; a series acts through its stored coefficients
/// and the majorant bounds the rest by `‖x‖·Σ_{k>K} M·γᵏ`.
pub fn apply_symbol(a: &OperatorSymbol, x: &GeomSequence) -> Result<(GeomSequence, f64)> {
    if !a.is_polynomial() && a.majorant.is_none() {
        return Err(Error::InvalidSymbol("series symbol without majorant".into()));
    }
    let y = apply_polynomial(&a.coeffs, x);
    let err = if a.is_polynomial() { 0.0 } else { a.tail_bound() * x.sup_norm().upper };
    Ok((y, err))
}

/// Solves `a(B)w = v` for a polynomial `a` without zeros in the closed unit
/// disk, exactly on the class.
///
/// Tail terms are solved termwise (`a(ρ) ≠ 0` for `|ρ| ≤ 1`); the head is
/// filled by backward substitution `wₙ = (vₙ − Σ_{k≥1} aₖwₙ₊ₖ)/a₀`, which
/// is stable because every homogeneous solution `ζⁿ` has `|ζ| > 1` and so
/// shrinks as `n` decreases.
pub fn solve_polynomial(a: &[C64], v: &GeomSequence) -> Result<GeomSequence> {
    let a0 = *a.first().ok_or_else(|| Error::InvalidSymbol("empty symbol".into()))?;
    if a0 == ZERO {
        return Err(Error::InvalidSymbol("symbol vanishes at zero; a(B) is not injective".into()));
    }
    let tail: Vec<_> = v.tail().iter().map(|t| t.solve_symbol(a)).collect::<Result<_>>()?;
    let n = v.head_len();
    let tail_part = GeomSequence::from_parts(vec![ZERO; n], tail.clone());
    let mut w = vec![ZERO; n];
    for i in (1..=n).rev() {
        let mut acc = v.eval(i);
        for (k, ak) in a.iter().enumerate().skip(1) {
            let idx = i + k;
            acc -= ak * if idx <= n { w[idx - 1] } else { tail_part.eval(idx) };
        }
        w[i - 1] = acc / a0;
    }
    Ok(GeomSequence::from_parts(w, tail))
}

/// Coefficient product with a rigorously propagated majorant.
pub fn symbol_multiply(a: &OperatorSymbol, b: &OperatorSymbol) -> OperatorSymbol {
    match (a.effective_polynomial(), b.effective_polynomial()) {
        (true, true) => {
            let coeffs = convolve(&a.coeffs, &b.coeffs);
            if a.is_polynomial() && b.is_polynomial() {
                OperatorSymbol::polynomial(coeffs)
            } else {
                OperatorSymbol { coeffs, majorant: Some(Majorant { m: 0.0, gamma: 0.0 }) }
            }
        }
        (true, false) => poly_times_series(a, b),
        (false, true) => poly_times_series(b, a),
        (false, false) => series_times_series(a, b),
    }
}

fn poly_times_series(p: &OperatorSymbol, s: &OperatorSymbol) -> OperatorSymbol {
    let k = s.order();
    let mut coeffs = convolve(&p.coeffs, &s.coeffs);
    coeffs.truncate(k + 1);
    let gamma = s.majorant.unwrap().gamma;
    let m_hat = s.uniform_majorant(gamma);
    // |c_k| ≤ Σ_i |p_i|·M̂·γ^{k-i}
    let weight: f64 = p.coeffs.iter().enumerate().map(|(i, c)| c.norm() / gamma.powi(i as i32)).sum();
    OperatorSymbol { coeffs, majorant: Some(Majorant { m: m_hat * weight, gamma }) }
}

fn series_times_series(a: &OperatorSymbol, b: &OperatorSymbol) -> OperatorSymbol {
    let k = a.order().min(b.order());
    let mut coeffs = convolve(&a.coeffs[..=k], &b.coeffs[..=k]);
    coeffs.truncate(k + 1);
    let (ga, gb) = (a.majorant.unwrap().gamma, b.majorant.unwrap().gamma);
    let majorant = if ga != gb {
        let (lo, hi) = (ga.min(gb), ga.max(gb));
        let m = a.uniform_majorant(ga) * b.uniform_majorant(gb) / (1.0 - lo / hi);
        Majorant { m, gamma: hi }
    } else {
        // (k+1)γᵏ ≤ C·(√γ)ᵏ with C = sup_{k>K} (k+1)·γ^{k/2}
        let root = ga.sqrt();
        let c = crate::tail::binomial_geometric_sup(1, root, k as u64) / root;
        Majorant { m: a.uniform_majorant(ga) * b.uniform_majorant(gb) * c, gamma: root }
    };
    OperatorSymbol { coeffs, majorant: Some(majorant) }
}

pub fn symbol_power(a: &OperatorSymbol, m: usize) -> OperatorSymbol {
    assert!(m >= 1, "symbol powers start at 1");
    let mut out = a.clone();
    for _ in 1..m {
        out = symbol_multiply(&out, a);
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct ReciprocalOptions {
    pub initial_order: usize,
    pub max_order: usize,
    pub tol: f64,
    pub grid_log2: u32,
}

impl Default for ReciprocalOptions {
    fn default() -> Self {
        Self { initial_order: 64, max_order: 1 << 16, tol: 1e-10, grid_log2: circle::DEFAULT_GRID_LOG2 }
    }
}

/// Taylor expansion of `1/a` with a Cauchy majorant on `|z| = zero_free_radius`.
pub fn symbol_reciprocal(a: &OperatorSymbol, zero_free_radius: f64) -> Result<OperatorSymbol> {
    symbol_reciprocal_with(a, zero_free_radius, ReciprocalOptions::default())
}

pub fn symbol_reciprocal_with(
    a: &OperatorSymbol,
    zero_free_radius: f64,
    opts: ReciprocalOptions,
) -> Result<OperatorSymbol> {
    let r = zero_free_radius;
    if r.partial_cmp(&1.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidSymbol(format!("zero-free radius must exceed 1, got {r}")));
    }
    let a0 = a.coeffs.first().copied().unwrap_or(ZERO);
    if a0 == ZERO {
        return Err(Error::Hypothesis("symbol vanishes at the origin".into()));
    }
    if a.is_polynomial() && a.coeffs.len() == 1 {
        return Ok(OperatorSymbol::constant(a0.inv()));
    }
    // certified min |a| on |z| = r; a series loses its unstored tail there
    let mut min = circle::min_modulus(&a.coeffs, r, opts.grid_log2).lower;
    if let Some(m) = a.majorant {
        if m.gamma * r >= 1.0 && m.m > 0.0 {
            return Err(Error::Hypothesis(format!("majorant radius 1/γ does not reach {r}")));
        }
        if m.m > 0.0 && m.gamma > 0.0 {
            let x = m.gamma * r;
            min -= m.m * x.powi(a.order() as i32 + 1) / (1.0 - x);
        }
    } else if circle::winding_number(&a.coeffs, r, opts.grid_log2) != Some(0) {
        return Err(Error::Hypothesis(format!("cannot certify a zero-free disk of radius {r}")));
    }
    if min <= 0.0 {
        return Err(Error::Hypothesis(format!("cannot certify |a| > 0 on |z| = {r}")));
    }
    let gamma = 1.0 / r;
    let maj = Majorant { m: 1.0 / min, gamma };
    let mut order = opts.initial_order;
    while maj.tail_sum(order) >= opts.tol && order < opts.max_order {
        order *= 2;
    }
    let order = order.min(opts.max_order);
    if !a.is_polynomial() && order > a.order() {
        // coefficients past the stored ones are unknown; the majorant covers them
        return Ok(reciprocal_coeffs(a, a.order(), maj));
    }
    Ok(reciprocal_coeffs(a, order, maj))
}

fn reciprocal_coeffs(a: &OperatorSymbol, order: usize, maj: Majorant) -> OperatorSymbol {
    let inv0 = a.coeffs[0].inv();
    let mut b = Vec::with_capacity(order + 1);
    b.push(inv0);
    for k in 1..=order {
        let acc: C64 = (1..=k.min(a.order())).map(|i| a.coeffs[i] * b[k - i]).sum();
        b.push(-acc * inv0);
    }
    OperatorSymbol { coeffs: b, majorant: Some(maj) }
}

/// `[Σ_{k≤K}|aₖ|, Σ_{k≤K}|aₖ| + Σ_{k>K} M·γᵏ]`.
pub fn symbol_opnorm(a: &OperatorSymbol) -> CertifiedInterval {
    let head: f64 = a.coeffs.iter().map(|c| c.norm()).sum();
    CertifiedInterval::new(head, head + a.tail_bound())
}
