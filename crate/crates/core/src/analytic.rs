//! Mixing chains for `R·f(B)` with a holomorphic (polynomial) symbol `f`
//! whose image of the closed disk covers the closed disk.
//!
//! Pipeline: certify the covering hypothesis, locate the zeros `zₖ` of `f`
//! in the disk, deflate `f = g·∏(z − zₖ)`, bound `δ ≤ min|g|`, pick `R₁`,
//! `n₀`, `a`, `b`, and build block preimages of `(R·f(B))^{n₀}` that shrink
//! by `a·b` per block. Write `R·f = h̃_s·p` with `p = R₁∏(z − zₖ)`,
//! `h̃ = R₁g` and `h̃_s = s·h̃`, `s = R/R₁² ≥ 1`. Blocks solve `h̃_s(B)^{n₀}`
//! exactly and then `n₀` factored stages for `p(B)^{n₀}`.

use serde::{Deserialize, Serialize};

use crate::certificate::{link_error, ChainEntry, MixingCertificate, OperatorDescriptor};
use crate::circle;
use crate::interval::CertifiedInterval;
use crate::roots;
use crate::scalar::{self, C64, ONE, ZERO};
use crate::seq::GeomSequence;
use crate::solve::{self, RightInverse};
use crate::symbol::{self, convolve, OperatorSymbol};
use crate::{Error, Result};

/// Roots closer than this to the unit circle are refused.
pub const BOUNDARY_BAND: f64 = 1e-9;
/// Radius on which `g` must be certified zero-free.
pub const ZERO_FREE_RADIUS: f64 = 1.0 + 1.0 / 16.0;
const MAX_N0: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Refuted,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    /// Bracket for `min_{|z|=1} |f(z)|`.
    pub min_modulus: CertifiedInterval,
    /// Zeros of `f` in the open disk, when the winding number is certified.
    pub disk_zero_count: Option<i64>,
    pub verdict: Verdict,
}

impl HypothesisReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

/// Certifies `D̄ ⊆ f(D̄)` through `min_{|z|=1}|f| ≥ 1` plus a zero in `D`.
///
/// With `|f| ≥ 1` on the circle and a zero inside, the argument principle
/// gives every `w ∈ D` a preimage in `D`; compactness of `f(D̄)` adds the
/// boundary. With no zero in `D̄` the point `0` is not covered, which
/// refutes the hypothesis. Anything else is reported as indeterminate.
pub fn hypothesis_check(f: &OperatorSymbol) -> Result<HypothesisReport> {
    hypothesis_check_with(f, circle::DEFAULT_GRID_LOG2)
}

pub fn hypothesis_check_with(f: &OperatorSymbol, grid_log2: u32) -> Result<HypothesisReport> {
    if f.coeffs().iter().all(|c| *c == ZERO) {
        return Err(Error::InvalidSymbol("zero symbol".into()));
    }
    let tail = f.tail_bound();
    let poly_min = circle::min_modulus(f.coeffs(), 1.0, grid_log2);
    let min_modulus = CertifiedInterval::new((poly_min.lower - tail).max(0.0), poly_min.upper + tail);
    // Rouché: the truncation and f share their zero count when tail < min
    let disk_zero_count = if poly_min.lower > tail {
        circle::winding_number(f.coeffs(), 1.0, grid_log2)
    } else {
        None
    };
    let verdict = match disk_zero_count {
        Some(0) => Verdict::Refuted,
        Some(_) if min_modulus.lower >= 1.0 => Verdict::Certified,
        _ => Verdict::Indeterminate,
    };
    Ok(HypothesisReport { min_modulus, disk_zero_count, verdict })
}

fn require_polynomial(f: &OperatorSymbol) -> Result<()> {
    if f.is_polynomial() {
        Ok(())
    } else {
        Err(Error::InvalidSymbol("the analytic pipeline needs a polynomial symbol".into()))
    }
}

/// Zeros of `f` in the open unit disk, with multiplicity.
pub fn disk_zeros(f: &OperatorSymbol) -> Result<Vec<C64>> {
    require_polynomial(f)?;
    let all = roots::roots(f.coeffs())?;
    if let Some(z) = all.iter().find(|z| (z.norm() - 1.0).abs() <= BOUNDARY_BAND) {
        return Err(Error::Hypothesis(format!(
            "boundary zero {z}: hypothesis violated or ill-conditioned"
        )));
    }
    Ok(all.into_iter().filter(|z| z.norm() < 1.0 - BOUNDARY_BAND).collect())
}

/// Synthetic division by `∏(z − zₖ)` and a certified `δ ≤ min_{|z|≤1} |g|`.
pub fn deflate_and_delta(f: &OperatorSymbol, zeros: &[C64]) -> Result<(OperatorSymbol, f64)> {
    require_polynomial(f)?;
    let mut g = f.coeffs().to_vec();
    for z in zeros {
        g = divide_linear(&g, *z);
    }
    let g = OperatorSymbol::polynomial(g);
    // zero-free on the disk, so the minimum sits on the circle
    if g.coeffs().len() > 1 && circle::winding_number(g.coeffs(), 1.0, circle::DEFAULT_GRID_LOG2) != Some(0) {
        return Err(Error::Hypothesis("cofactor g is not certified zero-free on the disk".into()));
    }
    let delta = circle::min_modulus(g.coeffs(), 1.0, circle::DEFAULT_GRID_LOG2).lower;
    if delta <= 0.0 {
        return Err(Error::Hypothesis("cannot certify min |g| > 0 on the disk".into()));
    }
    Ok((g, delta))
}

/// Quotient of `Σ aₖzᵏ` by `z − z₀`, remainder dropped.
fn divide_linear(a: &[C64], z0: C64) -> Vec<C64> {
    if a.len() <= 1 {
        return Vec::new();
    }
    let d = a.len() - 1;
    let mut q = vec![ZERO; d];
    let mut carry = ZERO;
    for k in (1..=d).rev() {
        carry = a[k] + carry * z0;
        q[k - 1] = carry;
    }
    q
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    #[serde(with = "scalar::pair_vec")]
    pub zeros: Vec<C64>,
    /// Deflated cofactor `g`.
    pub cofactor: OperatorSymbol,
    pub delta: f64,
    #[serde(rename = "R1")]
    pub r1: f64,
    pub n0: usize,
    pub a: f64,
    pub b: f64,
    #[serde(rename = "R0")]
    pub r0: f64,
    /// Single-step right-inverse constant at `R = R₀`.
    pub kappa: f64,
    pub margin: f64,
    pub a_target: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub margin: f64,
    pub a_target: f64,
    pub zero_free_radius: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { margin: 0.1, a_target: 0.5, zero_free_radius: ZERO_FREE_RADIUS }
    }
}

fn zero_product(zeros: &[C64]) -> f64 {
    zeros.iter().map(|z| (z.norm() - 1.0).abs()).product()
}

/// Certified `‖h(B)⁻¹‖` from the reciprocal series of a polynomial `h`.
fn inverse_opnorm(h: &[C64], radius: f64) -> Result<f64> {
    let recip = symbol::symbol_reciprocal(&OperatorSymbol::polynomial(h.to_vec()), radius)?;
    Ok(symbol::symbol_opnorm(&recip).upper)
}

pub fn choose_params(
    zeros: &[C64],
    g: &OperatorSymbol,
    delta: f64,
    opts: PipelineOptions,
) -> Result<PipelineParams> {
    let PipelineOptions { margin, a_target, zero_free_radius } = opts;
    if !(margin > 0.0) {
        return Err(Error::InvalidSymbol(format!("margin must be positive, got {margin}")));
    }
    if !(a_target > 0.0 && a_target < 1.0) {
        return Err(Error::InvalidSymbol(format!("a_target must lie in (0, 1), got {a_target}")));
    }
    if !(delta > 0.0) {
        return Err(Error::Hypothesis(format!("delta must be positive, got {delta}")));
    }
    let prod = zero_product(zeros);
    let r1 = (1.0 + margin) * (1.0 / delta).max(1.0 / prod).max(1.0);
    let h: Vec<C64> = g.coeffs().iter().map(|c| c * r1).collect();
    if h.len() > 1 {
        let zs = roots::roots(&h)?;
        if let Some(z) = zs.iter().find(|z| z.norm() <= zero_free_radius) {
            return Err(Error::Hypothesis(format!(
                "cofactor zero {z} lies within the certified radius {zero_free_radius}"
            )));
        }
    }
    let mut power = h.clone();
    let mut found = None;
    for n in 1..=MAX_N0 {
        if n > 1 {
            power = convolve(&power, &h);
        }
        let norm = inverse_opnorm(&power, zero_free_radius)?;
        if norm <= a_target {
            found = Some((n, norm));
            break;
        }
    }
    let (n0, a) = found.ok_or_else(|| Error::Hypothesis("contraction not certified".into()))?;
    let b = (1.0 / (r1 * prod)).powi(n0 as i32);
    let kappa = inverse_opnorm(&h, zero_free_radius)? / (r1 * prod);
    let params = PipelineParams {
        zeros: zeros.to_vec(),
        cofactor: g.clone(),
        delta,
        r1,
        n0,
        a,
        b,
        r0: r1 * r1,
        kappa,
        margin,
        a_target,
    };
    params.validate()?;
    Ok(params)
}

impl PipelineParams {
    /// Checks the parameter inequalities exactly as stored.
    pub fn validate(&self) -> Result<()> {
        let prod = zero_product(&self.zeros);
        let fail = |what: &str| Err(Error::Hypothesis(format!("pipeline parameters violate {what}")));
        if !(self.r1 > 1.0) {
            return fail("R1 > 1");
        }
        if !(self.r1 * self.delta > 1.0) {
            return fail("R1·δ > 1");
        }
        if !(self.r1 * prod > 1.0) {
            return fail("R1·∏||zₖ|−1| > 1");
        }
        if self.b != (1.0 / (self.r1 * prod)).powi(self.n0 as i32) {
            return fail("b = (R1·∏||zₖ|−1|)^(−n0)");
        }
        if !(self.a > 0.0 && self.a < 1.0 && self.b > 0.0 && self.b < 1.0 && self.a * self.b < 1.0) {
            return fail("0 < a, b < 1 and a·b < 1");
        }
        if self.r0 != self.r1 * self.r1 {
            return fail("R0 = R1²");
        }
        Ok(())
    }

    /// `a·b`, the certified per-block contraction.
    pub fn ab(&self) -> f64 {
        self.a * self.b
    }

    /// `h̃_s` for the operator `R·f(B)`.
    fn h_scaled(&self, r: f64) -> Vec<C64> {
        let s = r / self.r0;
        self.cofactor.coeffs().iter().map(|c| c * (s * self.r1)).collect()
    }
}

/// Full parameter derivation for a polynomial `f`.
pub fn pipeline_params(f: &OperatorSymbol, opts: PipelineOptions) -> Result<PipelineParams> {
    let report = hypothesis_check(f)?;
    if !report.holds() {
        return Err(Error::Hypothesis(format!(
            "cannot certify that f(D̄) covers D̄: min |f| on the circle in {}, disk zeros {:?} ({:?})",
            report.min_modulus, report.disk_zero_count, report.verdict
        )));
    }
    let zeros = disk_zeros(f)?;
    let (g, delta) = deflate_and_delta(f, &zeros)?;
    choose_params(&zeros, &g, delta, opts)
}

/// One application of `(R·f(B))⁻¹` on the right.
struct SingleStep {
    h: Vec<C64>,
    zeros: Vec<C64>,
    r1: f64,
    kappa: f64,
}

impl RightInverse for SingleStep {
    fn solve(&self, v: &GeomSequence) -> Result<GeomSequence> {
        let w = symbol::solve_polynomial(&self.h, v)?;
        solve::factored_preimage(&self.zeros, self.r1, &w)
    }

    fn kappa(&self) -> f64 {
        self.kappa
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticChain {
    pub params: PipelineParams,
    /// Block certificate at `n = m·n₀`, base point zero.
    pub block: MixingCertificate,
    /// All powers, transported to a kernel vector of `p(B)`.
    pub certificate: MixingCertificate,
}

/// A nonzero vector annihilated by `B − z`.
pub fn linear_kernel_vector(z: C64) -> GeomSequence {
    if z == ZERO {
        return GeomSequence::basis(1);
    }
    GeomSequence::new(vec![ONE], vec![crate::tail::GeomTerm::geometric(ONE, z)])
        .expect("|z| < 1 gives a bounded kernel vector")
}

pub fn analytic_mixing_chain(
    f: &OperatorSymbol,
    r: f64,
    y: &GeomSequence,
    m_max: usize,
    opts: PipelineOptions,
) -> Result<AnalyticChain> {
    require_polynomial(f)?;
    let params = pipeline_params(f, opts)?;
    if !(r > params.r0) {
        return Err(Error::Regime(format!("R = {r} must exceed R0 = {}", params.r0)));
    }
    let n0 = params.n0;
    let h = params.h_scaled(r);
    let mut h_block = h.clone();
    for _ in 1..n0 {
        h_block = convolve(&h_block, &h);
    }
    let operator = OperatorDescriptor::Analytic { symbol: f.scale(C64::new(r, 0.0)), params: params.clone() };
    let mut chain = Vec::with_capacity(m_max);
    let (mut v, mut error) = (y.clone(), 0.0);
    for m in 1..=m_max {
        let mut w = symbol::solve_polynomial(&h_block, &v)?;
        for _ in 0..n0 {
            w = solve::factored_preimage(&params.zeros, params.r1, &w)?;
        }
        error = link_error(&operator, &w, n0, (m - 1) * n0, &v, error)?;
        v = w;
        chain.push(ChainEntry::at_zero(m * n0, v.clone(), error));
    }
    let block = MixingCertificate::new(operator, y.clone(), chain, params.ab(), y.sup_norm().upper);
    let s = r / params.r0;
    let step = SingleStep { h, zeros: params.zeros.clone(), r1: params.r1, kappa: params.kappa / s };
    let filled = solve::fill_chain(&block, n0, &step)?;
    let base = linear_kernel_vector(params.zeros[0]);
    let certificate = solve::transport_certificate(&filled, &base)?;
    Ok(AnalyticChain { params, block, certificate })
}

/// For `f` with `0` inside `f(D̄)`: returns `c` and `f/c`, where `f/c`
/// satisfies the covering hypothesis and `R·f(B) = (R·c)·(f/c)(B)`.
pub fn corollary_rescale(f: &OperatorSymbol, margin: f64) -> Result<(f64, OperatorSymbol)> {
    let report = hypothesis_check(f)?;
    let has_zero = matches!(report.disk_zero_count, Some(k) if k > 0);
    if !has_zero || !(report.min_modulus.lower > 0.0) {
        return Err(Error::Hypothesis(
            "cannot certify 0 as an interior point of f(D̄): need a disk zero and min |f| > 0 on the circle".into(),
        ));
    }
    let c = report.min_modulus.lower / (1.0 + margin);
    let scaled = f.scale(C64::new(1.0 / c, 0.0));
    Ok((c, scaled))
}
