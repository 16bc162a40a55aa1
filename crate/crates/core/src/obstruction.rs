//! The non-mixing side of `I + λB` and the spectral picture on `l∞/c₀`.
//!
//! For `|λ| = 1` the vector `yₙ = (−λ)⁻ⁿ` is far from the range: every
//! solution of `(I + λB)x = w` with `w` near `y` has `sup_{n≤N}|xₙ| ≳ N/4`.
//! Solutions are affine in `x₁`, so the minimum over all of them is a
//! smallest-enclosing-circle problem solved in [`crate::minimax`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::certificate::{link_error, ChainEntry, OperatorDescriptor};
use crate::exec::Execution;
use crate::interval::CertifiedInterval;
use crate::minimax;
use crate::scalar::{self, C64, ONE, ZERO};
use crate::seq::GeomSequence;
use crate::solve;
use crate::symbol;
use crate::tail::GeomTerm;
use crate::{Error, Result};

fn require_unimodular(lambda: C64) -> Result<()> {
    if scalar::is_unimodular(lambda) {
        Ok(())
    } else {
        Err(Error::Regime(format!("the range obstruction needs |λ| = 1, got {}", lambda.norm())))
    }
}

/// `yₙ = (−λ)⁻ⁿ`.
pub fn range_witness(lambda: C64) -> Result<GeomSequence> {
    require_unimodular(lambda)?;
    GeomSequence::geometric(ONE, (-lambda).inv())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionReport {
    #[serde(with = "scalar::pair")]
    pub lambda: C64,
    #[serde(rename = "N")]
    pub n: usize,
    /// `min_{x₁} max_{n≤N} |xₙ|` over solutions of `(I + λB)x = w`.
    pub min_norm: CertifiedInterval,
    /// `(N − 1)/4`.
    pub floor: f64,
    /// A minimizing `x₁`.
    #[serde(with = "scalar::pair")]
    pub x1: C64,
    pub w_description: String,
    /// `‖w − y‖` for the range witness `y`.
    pub perturbation: CertifiedInterval,
}

impl ObstructionReport {
    pub fn meets_floor(&self, tol: f64) -> bool {
        self.min_norm.lower >= self.floor - tol
    }
}

/// Brackets the smallest truncated norm of any preimage of `w`.
pub fn min_norm_lower_bound(lambda: C64, w: &GeomSequence, n: usize) -> Result<ObstructionReport> {
    min_norm_described(lambda, w, n, "custom".into())
}

fn min_norm_described(lambda: C64, w: &GeomSequence, n: usize, description: String) -> Result<ObstructionReport> {
    require_unimodular(lambda)?;
    assert!(n >= 1, "truncation length must be positive");
    let a = solve::preimage(lambda, w, ZERO)?;
    let step = -(lambda.inv());
    // xₙ = Aₙ + Bₙx₁ with |Bₙ| = 1, so |xₙ| = |x₁ − cₙ| for cₙ = −Aₙ/Bₙ
    let mut b = ONE;
    let mut centers = Vec::with_capacity(n);
    for k in 1..=n {
        centers.push(-a.eval(k) / b);
        b *= step;
    }
    let circle = minimax::enclosing_circle(&centers);
    let perturbation = w.distance(&range_witness(lambda)?);
    Ok(ObstructionReport {
        lambda,
        n,
        min_norm: circle.radius,
        floor: (n as f64 - 1.0) / 4.0,
        x1: circle.center,
        w_description: description,
        perturbation,
    })
}

/// The witness with each of its first `n` entries moved by at most `radius`.
pub fn perturbed_witness(lambda: C64, n: usize, radius: f64, rng: &mut impl Rng) -> Result<GeomSequence> {
    let y = range_witness(lambda)?;
    let eps: Vec<C64> = (0..n)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    Ok(y.add(&GeomSequence::finite(eps)))
}

/// `count` perturbed witnesses per `λ`, each with its own seeded stream.
pub fn perturbation_suite(
    lambdas: &[C64],
    n: usize,
    count: usize,
    radius: f64,
    seed: u64,
    exec: Execution,
) -> Result<Vec<ObstructionReport>> {
    let jobs: Vec<(usize, usize)> = (0..lambdas.len()).flat_map(|i| (0..count).map(move |k| (i, k))).collect();
    exec.map(&jobs, |&(i, k)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((i * count + k) as u64);
        let w = perturbed_witness(lambdas[i], n, radius, &mut rng)?;
        min_norm_described(lambdas[i], &w, n, format!("witness + head perturbation ≤ {radius} (case {k})"))
    })
    .into_iter()
    .collect()
}

/// Reports for the unperturbed witness.
pub fn witness_report(lambda: C64, n: usize) -> Result<ObstructionReport> {
    min_norm_described(lambda, &range_witness(lambda)?, n, "range witness".into())
}

/// `xₙ = e^{iθ(n−1)}`, with `Bx = e^{iθ}x` exactly.
pub fn circle_eigenvector(theta: f64) -> GeomSequence {
    GeomSequence::new(vec![ONE], vec![GeomTerm::geometric(ONE, C64::from_polar(1.0, theta))])
        .expect("unimodular degree-zero tails are bounded")
}

/// `Bx − e^{iθ}x`.
pub fn eigen_residual(theta: f64, x: &GeomSequence) -> GeomSequence {
    symbol::backward_shift(x).sub(&x.scale(C64::from_polar(1.0, theta)))
}

/// Solves `(B − μ)x = y` with `x₁ = 0`; `‖x‖ ≤ ‖y‖/(1 − |μ|)`.
pub fn resolvent_solve(mu: C64, y: &GeomSequence) -> Result<GeomSequence> {
    solve::resolvent_solve(mu, y)
}

/// Distance from the unit circle to the curve `{1 + λe^{iθ}}`, the spectrum
/// of `I + λB` on `l∞/c₀`.
///
/// The moduli on the curve fill `[|1 − |λ||, 1 + |λ|]`.
pub fn spectral_circle_distance(lambda: C64) -> f64 {
    let r = lambda.norm();
    let lo = (1.0 - r).abs();
    let hi = 1.0 + r;
    (lo - 1.0).max(1.0 - hi).max(0.0)
}

/// Whether `x` lies in `A^mix` of `I + λB`, which is `c₀` for `|λ| > 2`.
pub fn amix_membership(lambda: C64, x: &GeomSequence) -> Result<bool> {
    if lambda.norm() <= 2.0 {
        return Err(Error::Regime(format!(
            "A^mix is empty in this regime (|λ| = {} ≤ 2)",
            lambda.norm()
        )));
    }
    Ok(x.in_c0())
}

/// The first `k` entries of `x`.
fn truncate(x: &GeomSequence, k: usize) -> GeomSequence {
    GeomSequence::finite(x.prefix(k))
}

/// The `K` minimizing `‖x − x_K‖` plus the a-priori bound on `‖wⁿ‖`.
fn truncation_length(lambda: C64, x: &GeomSequence, y: &GeomSequence, n: usize) -> usize {
    let l = lambda.norm();
    let ln_contract = n as f64 * (l - 1.0).ln();
    let (x_norm, y_norm) = (x.sup_norm().upper, y.sup_norm().upper);
    let k_max = x.head_len() + 4 * (n as f64).sqrt() as usize + 8;
    // ln of C(n, j)·|λ|ʲ, accumulated term by term
    let mut ln_term = 0.0_f64;
    let mut growth = 0.0_f64;
    let mut best = (f64::INFINITY, 0);
    for k in 0..=k_max {
        let estimate = (y_norm + growth * x_norm) / (ln_contract.exp());
        let total = x.sub(&truncate(x, k)).sup_norm().upper + estimate;
        if total < best.0 {
            best = (total, k);
        }
        if k < n {
            growth += ln_term.exp();
            ln_term += ((n - k) as f64 / (k + 1) as f64).ln() + l.ln();
        }
    }
    best.1
}

/// Points `xₙ → x` with `(I + λB)ⁿxₙ = y`, for `x ∈ c₀` and `|λ| > 2`.
///
/// `xₙ = x_{Kₙ} + wⁿ` where `x_K` keeps the first `K` entries and `wⁿ` is
/// the `n`-fold bounded preimage of `y − (I + λB)ⁿx_K`. Since `Bʲx_K = 0`
/// for `j ≥ K`, `‖wⁿ‖ ≤ (‖y‖ + Σ_{j<K} C(n, j)|λ|ʲ‖x_K‖)/(|λ| − 1)ⁿ`, which
/// vanishes for fixed `K` once `|λ| > 2`. `Kₙ` minimizes that estimate plus
/// `‖x − x_K‖`. `distance` holds the certified bound `‖x − x_K‖ + ‖wⁿ‖`, and
/// `error` the propagated rounding bound on `‖Tⁿxₙ − y‖`, which grows
/// quickly with `n`.
pub fn approach_chain(lambda: C64, x: &GeomSequence, y: &GeomSequence, n_max: usize) -> Result<Vec<ChainEntry>> {
    if !amix_membership(lambda, x)? {
        return Err(Error::Regime("base point is not in c₀".into()));
    }
    let op = OperatorDescriptor::ShiftPerturbation { lambda };
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let k = truncation_length(lambda, x, y, n);
        let xk = truncate(x, k);
        let (image, image_err) = op.apply_n(&xk, n)?;
        let target = y.sub(&image);
        let mut w = target.clone();
        for _ in 0..n {
            w = solve::bounded_preimage(lambda, &w)?;
        }
        let error = image_err + link_error(&op, &w, n, 0, &target, 0.0)?;
        let point = xk.add(&w);
        let delta = point.sub(x);
        let bound = x.sub(&xk).sup_norm().upper + w.sup_norm().upper;
        out.push(ChainEntry {
            n,
            norm: point.sup_norm(),
            w: point,
            delta,
            distance: CertifiedInterval::new(0.0, bound),
            error,
        });
    }
    Ok(out)
}
