//! Eventually geometric bounded sequences.
//!
//! A [`GeomSequence`] is a finite head `x₁..x_N` followed, for `n > N`, by a
//! finite sum of tail terms evaluated at the relative index `j = n − N`.
//! Every term has `|ρ| ≤ 1` (strictly when its polynomial degree is
//! positive), so the represented sequence lies in `l∞`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::interval::CertifiedInterval;
use crate::scalar::{self, is_unimodular, C64, ZERO};
use crate::tail::GeomTerm;
use crate::{Error, Result};

/// Sampling horizon for sup-norms that have no closed form.
pub const DEFAULT_HORIZON: u64 = 4096;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GeomSequence {
    head: Vec<C64>,
    tail: Vec<GeomTerm>,
}

impl GeomSequence {
    /// Validates and normalizes a head and tail.
    pub fn new(head: Vec<C64>, tail: Vec<GeomTerm>) -> Result<Self> {
        if let Some(z) = head.iter().find(|z| !scalar::is_finite(**z)) {
            return Err(Error::InvalidSequence(format!("non-finite head entry {z}")));
        }
        for t in &tail {
            if !scalar::is_finite(t.ratio) || t.poly.iter().any(|c| !scalar::is_finite(*c)) {
                return Err(Error::InvalidSequence("non-finite tail term".into()));
            }
            if !t.is_zero() && !t.is_bounded() {
                return Err(Error::InvalidSequence(format!(
                    "tail term with ratio {} and degree {} is unbounded",
                    t.ratio,
                    t.degree()
                )));
            }
        }
        Ok(Self::from_parts(head, tail))
    }

    /// Normalizes without validating boundedness. Callers guarantee it.
    pub(crate) fn from_parts(head: Vec<C64>, tail: Vec<GeomTerm>) -> Self {
        let mut s = Self { head, tail: Vec::with_capacity(tail.len()) };
        for t in tail {
            s.push_term(t);
        }
        s.tail.retain(|t| !t.is_zero());
        if s.tail.is_empty() {
            while s.head.last() == Some(&ZERO) {
                s.head.pop();
            }
        }
        s
    }

    // merge on exact ratio equality only; nearby ratios stay distinct
    fn push_term(&mut self, t: GeomTerm) {
        if t.is_zero() {
            return;
        }
        match self.tail.iter_mut().find(|u| u.ratio == t.ratio) {
            Some(u) => {
                let mut poly = std::mem::take(&mut u.poly);
                if poly.len() < t.poly.len() {
                    poly.resize(t.poly.len(), ZERO);
                }
                for (p, q) in poly.iter_mut().zip(&t.poly) {
                    *p += q;
                }
                *u = GeomTerm::new(poly, u.ratio);
            }
            None => self.tail.push(t),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// A finitely supported sequence.
    pub fn finite(head: Vec<C64>) -> Self {
        assert!(head.iter().all(|z| scalar::is_finite(*z)), "non-finite entry");
        Self::from_parts(head, Vec::new())
    }

    /// The unit vector `e_k` (1-based).
    pub fn basis(k: usize) -> Self {
        assert!(k >= 1, "basis vectors are indexed from 1");
        let mut head = vec![ZERO; k];
        head[k - 1] = scalar::ONE;
        Self::finite(head)
    }

    /// `xₙ = c·ρⁿ` for all `n ≥ 1`.
    pub fn geometric(coeff: C64, ratio: C64) -> Result<Self> {
        Self::new(Vec::new(), vec![GeomTerm::geometric(coeff, ratio)])
    }

    pub fn head(&self) -> &[C64] {
        &self.head
    }

    pub fn tail(&self) -> &[GeomTerm] {
        &self.tail
    }

    pub fn head_len(&self) -> usize {
        self.head.len()
    }

    pub fn is_zero(&self) -> bool {
        self.tail.is_empty() && self.head.iter().all(|z| *z == ZERO)
    }

    /// `xₙ` for `n ≥ 1`.
    pub fn eval(&self, n: usize) -> C64 {
        assert!(n >= 1, "sequences are indexed from 1");
        if n <= self.head.len() {
            return self.head[n - 1];
        }
        let j = (n - self.head.len()) as u64;
        self.tail.iter().map(|t| t.eval(j)).sum()
    }

    /// `(x₁, …, x_len)`.
    pub fn prefix(&self, len: usize) -> Vec<C64> {
        (1..=len).map(|n| self.eval(n)).collect()
    }

    /// The same sequence with at least `len` explicit head entries.
    pub fn with_head_len(&self, len: usize) -> Self {
        let n = self.head.len();
        if len <= n {
            return self.clone();
        }
        let mut head = self.head.clone();
        head.extend((n + 1..=len).map(|k| self.eval(k)));
        let delta = (len - n) as u64;
        let tail = self.tail.iter().map(|t| t.shift_forward(delta)).collect();
        Self { head, tail }
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.head.len().max(other.head.len());
        let a = self.with_head_len(len);
        let b = other.with_head_len(len);
        let mut head = a.head;
        head.resize(len, ZERO);
        for (x, y) in head.iter_mut().zip(b.head.iter()) {
            *x += y;
        }
        Self::from_parts(head, a.tail.into_iter().chain(b.tail).collect())
    }

    pub fn scale(&self, k: C64) -> Self {
        if k == ZERO {
            return Self::zero();
        }
        Self::from_parts(
            self.head.iter().map(|z| z * k).collect(),
            self.tail.iter().map(|t| t.scale(k)).collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// The right shift `(0, x₁, x₂, …)`.
    pub fn right_shift(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut head = Vec::with_capacity(self.head.len() + 1);
        head.push(ZERO);
        head.extend_from_slice(&self.head);
        Self::from_parts(head, self.tail.clone())
    }

    pub fn sup_norm(&self) -> CertifiedInterval {
        self.sup_norm_with(DEFAULT_HORIZON)
    }

    /// Certified `sup |xₙ|`.
    ///
    /// Exact for an empty tail or a single degree-zero term (`|ρ|ʲ` peaks at
    /// `j = 1`). Ratios `±ρ` collapse to `ρ²` on odd and even indices, so such
    /// tails are normed through [`Self::parity_split`]. Otherwise the tail is
    /// sampled over `j ≤ horizon` and the remainder `j > horizon` is bounded
    /// term by term.
    pub fn sup_norm_with(&self, horizon: u64) -> CertifiedInterval {
        if self.tail.len() >= 2 {
            let mut squares: Vec<C64> = Vec::new();
            for t in &self.tail {
                let sq = t.ratio * t.ratio;
                if !squares.contains(&sq) {
                    squares.push(sq);
                }
            }
            if squares.len() < self.tail.len() {
                let (odd, even) = self.parity_split();
                let (a, b) = (odd.sup_norm_with(horizon / 2 + 1), even.sup_norm_with(horizon / 2 + 1));
                return CertifiedInterval::new(a.lower.max(b.lower), a.upper.max(b.upper));
            }
        }
        let head_max = self.head.iter().map(|z| z.norm()).fold(0.0, f64::max);
        match self.tail.as_slice() {
            [] => CertifiedInterval::exact(head_max),
            [t] if t.degree() == 0 => CertifiedInterval::exact(head_max.max(t.eval(1).norm())),
            terms => {
                let mut powers: Vec<C64> = vec![scalar::ONE; terms.len()];
                let mut sampled = 0.0_f64;
                for j in 1..=horizon {
                    let mut v = ZERO;
                    for (t, p) in terms.iter().zip(powers.iter_mut()) {
                        *p *= t.ratio;
                        v += crate::tail::eval_binomial_poly(&t.poly, j as f64) * *p;
                    }
                    sampled = sampled.max(v.norm());
                }
                let lower = head_max.max(sampled);
                let remainder: f64 = terms.iter().map(|t| t.sup_after(horizon)).sum();
                CertifiedInterval::new(lower, lower.max(remainder))
            }
        }
    }

    /// `(x₁, x₃, x₅, …)` and `(x₂, x₄, …)`.
    pub fn parity_split(&self) -> (Self, Self) {
        let x = self.with_head_len(self.head.len() + self.head.len() % 2);
        let odd_head = x.head.iter().step_by(2).copied().collect();
        let even_head = x.head.iter().skip(1).step_by(2).copied().collect();
        let mut odd_tail = Vec::new();
        let mut even_tail = Vec::new();
        for t in &x.tail {
            let sq = t.ratio * t.ratio;
            // relative index 2i − 1 and 2i of x become index i of the parts
            let inv = t.ratio.inv();
            odd_tail.push(GeomTerm::new(t.compose_affine_poly(2.0, -1.0).into_iter().map(|c| c * inv).collect(), sq));
            even_tail.push(GeomTerm::new(t.compose_affine_poly(2.0, 0.0), sq));
        }
        (Self::from_parts(odd_head, odd_tail), Self::from_parts(even_head, even_tail))
    }

    /// Certified `limsup |xₙ|`, the norm of the class of `x` in `l∞/c₀`.
    ///
    /// Only unimodular terms survive in the limit. For distinct unimodular
    /// ratios the Cesàro mean of `|Σ cₖρₖⁿ|²` equals `Σ|cₖ|²`, so the limsup
    /// is at least `√Σ|cₖ|²`; the triangle inequality gives `Σ|cₖ|` above.
    pub fn quotient_seminorm(&self) -> CertifiedInterval {
        let moduli: Vec<f64> = self.unimodular_terms().map(|t| t.coeff().norm()).collect();
        match moduli.as_slice() {
            [] => CertifiedInterval::zero(),
            [m] => CertifiedInterval::exact(*m),
            ms => {
                let l2 = ms.iter().map(|m| m * m).sum::<f64>().sqrt();
                let l1 = ms.iter().sum::<f64>();
                CertifiedInterval::new(l2.min(l1), l1)
            }
        }
    }

    /// `c₀` membership: no unimodular tail term.
    ///
    /// Exact on this class, by the mean-square lower bound in
    /// [`quotient_seminorm`](Self::quotient_seminorm): distinct unimodular
    /// ratios cannot cancel to a null sequence.
    pub fn in_c0(&self) -> bool {
        self.unimodular_terms().next().is_none()
    }

    fn unimodular_terms(&self) -> impl Iterator<Item = &GeomTerm> {
        self.tail.iter().filter(|t| is_unimodular(t.ratio))
    }

    /// `max(max |head|, Σ sup_j Σᵢ |pᵢ|·C(j, i)|ρ|ʲ)`: bounds the sup-norm and
    /// absorbs relative perturbations of every stored coefficient.
    pub fn majorant_norm(&self) -> f64 {
        let head_max = self.head.iter().map(|z| z.norm()).fold(0.0, f64::max);
        head_max.max(self.tail.iter().map(|t| t.sup_after(0)).sum())
    }

    /// Sup-distance bracket `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> CertifiedInterval {
        self.sub(other).sup_norm()
    }
}

#[derive(Serialize, Deserialize)]
struct WireTerm {
    #[serde(with = "scalar::pair")]
    coeff: C64,
    #[serde(with = "scalar::pair")]
    ratio: C64,
    /// Binomial degree `i` of a term `coeff·C(n−N, i)·ρⁿ`; omitted when zero.
    #[serde(default, skip_serializing_if = "is_zero_usize")]
    binom: usize,
}

fn is_zero_usize(k: &usize) -> bool {
    *k == 0
}

#[derive(Serialize, Deserialize)]
struct WireSequence {
    #[serde(with = "scalar::pair_vec")]
    head: Vec<C64>,
    tail: Vec<WireTerm>,
}

impl GeomSequence {
    // JSON coefficients use absolute indexing, xₙ = Σ c·ρⁿ; internally j = n − N.
    fn to_wire(&self) -> Result<WireSequence> {
        let n = self.head.len() as i32;
        let mut tail = Vec::new();
        for t in &self.tail {
            let rescale = t.ratio.powi(-n);
            for (i, c) in t.poly.iter().enumerate().filter(|(_, c)| **c != ZERO) {
                let coeff = c * rescale;
                if !scalar::is_finite(coeff) {
                    return Err(Error::InvalidSequence(
                        "tail coefficient overflows absolute indexing".into(),
                    ));
                }
                tail.push(WireTerm { coeff, ratio: t.ratio, binom: i });
            }
        }
        Ok(WireSequence { head: self.head.clone(), tail })
    }

    fn from_wire(w: WireSequence) -> Result<Self> {
        let n = w.head.len() as i32;
        let tail = w
            .tail
            .into_iter()
            .map(|t| {
                let mut poly = vec![ZERO; t.binom + 1];
                poly[t.binom] = t.coeff * t.ratio.powi(n);
                GeomTerm::new(poly, t.ratio)
            })
            .collect();
        Self::new(w.head, tail)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_wire()?)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_wire(serde_json::from_str(s)?)
    }
}

impl Serialize for GeomSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_wire().map_err(serde::ser::Error::custom)?.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GeomSequence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Self::from_wire(WireSequence::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
