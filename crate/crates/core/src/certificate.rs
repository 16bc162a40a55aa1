//! Mixing certificates: explicit chains `(n, xₙ)` with `Tⁿxₙ = y` and
//! `xₙ → base`, with certified norms, and an independent verifier.
//!
//! Each entry stores the point `xₙ` and its displacement `wₙ = xₙ − base`.
//! The verifier checks `T(base) = 0`, `Tⁿwₙ = y` and `xₙ = base + wₙ`; by
//! linearity these give `Tⁿxₙ = y` without pushing the full-size point
//! through `n` applications of an expansive operator.

use serde::{Deserialize, Serialize};

use crate::analytic::PipelineParams;
use crate::exec::Execution;
use crate::interval::CertifiedInterval;
use crate::scalar::{self, C64};
use crate::seq::GeomSequence;
use crate::symbol::{self, OperatorSymbol};
use crate::{Error, Result};

pub const SCHEMA: &str = "v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorDescriptor {
    /// `I + λB`.
    ShiftPerturbation {
        #[serde(with = "scalar::pair")]
        lambda: C64,
    },
    /// `a(B)` for an explicit symbol.
    Symbol { symbol: OperatorSymbol },
    /// `R·f(B)` built by the analytic pipeline; `symbol` is `R·f`.
    Analytic { symbol: OperatorSymbol, params: PipelineParams },
    /// `λB∘P∘S` on interleaved sequences.
    Product {
        #[serde(with = "scalar::pair")]
        lambda: C64,
    },
}

impl OperatorDescriptor {
    /// One application of the operator, with a truncation error bound.
    pub fn apply(&self, x: &GeomSequence) -> Result<(GeomSequence, f64)> {
        match self {
            Self::ShiftPerturbation { lambda } => Ok((symbol::apply_shift(*lambda, x), 0.0)),
            Self::Symbol { symbol } | Self::Analytic { symbol, .. } => symbol::apply_symbol(symbol, x),
            Self::Product { lambda } => Ok((crate::product::product_apply(*lambda, x), 0.0)),
        }
    }

    /// `Tⁿx` with an error bound covering symbol truncation and the
    /// floating-point rounding of each application, propagated as
    /// `eₖ = ‖T‖·eₖ₋₁ + truncₖ + γ‖T‖·|xₖ₋₁|` with `|·|` the coefficient majorant.
    pub fn apply_n(&self, x: &GeomSequence, n: usize) -> Result<(GeomSequence, f64)> {
        let norm = self.opnorm();
        let gamma = self.rounding_unit();
        let mut cur = x.clone();
        let mut err = 0.0;
        for _ in 0..n {
            let (next, e) = self.apply(&cur)?;
            err = err * norm + e + gamma * norm * cur.majorant_norm();
            cur = next;
        }
        Ok((cur, err))
    }

    /// Relative rounding per application, scaled by the number of symbol terms.
    pub fn rounding_unit(&self) -> f64 {
        let terms = match self {
            Self::ShiftPerturbation { .. } => 2,
            Self::Symbol { symbol } | Self::Analytic { symbol, .. } => {
                symbol.coeffs().len() + if symbol.is_polynomial() { 0 } else { 64 }
            }
            Self::Product { .. } => 4,
        };
        16.0 * terms as f64 * f64::EPSILON
    }

    /// Upper bound on the operator norm on `l∞`.
    pub fn opnorm(&self) -> f64 {
        match self {
            Self::ShiftPerturbation { lambda } => 1.0 + lambda.norm(),
            Self::Symbol { symbol } | Self::Analytic { symbol, .. } => symbol::symbol_opnorm(symbol).upper,
            Self::Product { lambda } => lambda.norm(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub n: usize,
    /// The chain point `xₙ`.
    pub w: GeomSequence,
    /// `xₙ − base`.
    pub delta: GeomSequence,
    /// `‖xₙ‖`.
    pub norm: CertifiedInterval,
    /// `‖xₙ − base‖`.
    pub distance: CertifiedInterval,
    /// Certified bound on `‖Tⁿwₙ − y‖` from truncation and rounding while
    /// the chain was built.
    pub error: f64,
}

impl ChainEntry {
    /// An entry for the base point zero.
    pub fn at_zero(n: usize, w: GeomSequence, error: f64) -> Self {
        let norm = w.sup_norm();
        Self { n, delta: w.clone(), w, norm, distance: norm, error }
    }
}

/// Error of a chain point `w` built as a `k`-step preimage of `parent`:
/// with `‖Tⁿ·parent − y‖ ≤ parent_error`,
/// `‖Tⁿ⁺ᵏw − y‖ ≤ parent_error + ‖T‖ⁿ·‖Tᵏw − parent‖`.
pub fn link_error(
    op: &OperatorDescriptor,
    w: &GeomSequence,
    steps: usize,
    parent_n: usize,
    parent: &GeomSequence,
    parent_error: f64,
) -> Result<f64> {
    let (img, err) = op.apply_n(w, steps)?;
    let gap = img.distance(parent).upper + err + subtraction_rounding(&img, parent);
    Ok(parent_error + op.opnorm().powi(parent_n as i32) * gap)
}

fn subtraction_rounding(a: &GeomSequence, b: &GeomSequence) -> f64 {
    4.0 * f64::EPSILON * (a.majorant_norm() + b.majorant_norm())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingCertificate {
    pub schema: String,
    pub operator: OperatorDescriptor,
    pub base_point: GeomSequence,
    pub target: GeomSequence,
    pub chain: Vec<ChainEntry>,
    /// Claimed decay factor of `‖xₙ − base‖`.
    pub rate: f64,
    /// Constant `C` in `‖xₙ − base‖ ≤ C·rateⁿ`.
    pub offset: f64,
    pub non_decaying: bool,
}

impl MixingCertificate {
    pub fn new(
        operator: OperatorDescriptor,
        target: GeomSequence,
        chain: Vec<ChainEntry>,
        rate: f64,
        offset: f64,
    ) -> Self {
        Self {
            schema: SCHEMA.into(),
            operator,
            base_point: GeomSequence::zero(),
            target,
            chain,
            rate,
            offset,
            non_decaying: rate >= 1.0,
        }
    }

    pub fn entry(&self, n: usize) -> Option<&ChainEntry> {
        self.chain.iter().find(|e| e.n == n)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cert: Self = serde_json::from_str(s)?;
        if cert.schema != SCHEMA {
            return Err(Error::Parse(format!("unsupported certificate schema {:?}", cert.schema)));
        }
        Ok(cert)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Extra slack per application, relative to `max(1, ‖y‖)`, on top of the
    /// certified truncation and rounding bounds.
    pub tol: f64,
    /// Absolute slack on the decay bound.
    pub bound_tol: f64,
    pub exec: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { tol: 1e-10, bound_tol: 1e-9, exec: Execution::available() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryCheck {
    pub n: usize,
    /// `‖Tⁿwₙ − y‖`.
    pub residual: CertifiedInterval,
    pub allowed: f64,
    /// `offset·rateⁿ`.
    pub bound: f64,
    pub residual_ok: bool,
    pub bound_ok: bool,
    pub split_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub base_residual: CertifiedInterval,
    pub base_ok: bool,
    pub entries: Vec<EntryCheck>,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.base_ok && self.entries.iter().all(|e| e.residual_ok && e.bound_ok && e.split_ok)
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual.upper).fold(0.0, f64::max)
    }
}

/// Re-applies the operator to every entry and checks residuals and bounds.
pub fn verify(cert: &MixingCertificate) -> Result<VerificationReport> {
    verify_with(cert, VerifyOptions::default())
}

pub fn verify_with(cert: &MixingCertificate, opts: VerifyOptions) -> Result<VerificationReport> {
    let op = &cert.operator;
    let (tb, tb_err) = op.apply(&cert.base_point)?;
    let base_residual = tb.sup_norm();
    let base_scale = cert.base_point.sup_norm().upper.max(1.0) * op.opnorm();
    let base_ok = base_residual.upper <= tb_err + 1e-12 * base_scale;
    let y_scale = cert.target.sup_norm().upper.max(1.0);
    let checks = opts.exec.map(&cert.chain, |e| -> Result<EntryCheck> {
        let (img, err) = op.apply_n(&e.delta, e.n)?;
        let residual = img.distance(&cert.target);
        let allowed = e.error + err + subtraction_rounding(&img, &cert.target) + opts.tol * e.n as f64 * y_scale;
        let bound = cert.offset * cert.rate.powi(e.n as i32);
        let bound_ok = e.distance.upper <= bound + opts.bound_tol && e.delta.sup_norm().upper <= bound + opts.bound_tol;
        let rebuilt = cert.base_point.add(&e.delta);
        let split_scale = cert.base_point.sup_norm().upper.max(e.norm.upper).max(1.0);
        let split_ok = rebuilt.distance(&e.w).upper <= 1e-12 * split_scale;
        Ok(EntryCheck {
            n: e.n,
            residual_ok: residual.upper <= allowed,
            residual,
            allowed,
            bound,
            bound_ok,
            split_ok,
        })
    });
    let entries = checks.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport { base_residual, base_ok, entries })
}
