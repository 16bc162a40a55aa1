//! The operator `T = λB∘P∘S` on `l∞`, where `S` splits a sequence into its
//! odd- and even-indexed parts and `P` keeps the odd part.
//!
//! `S` and its inverse are isometries, so `T` has the right inverse
//! `y ↦ merge(right_shift(y/λ), 0)` of norm `1/|λ|`. Its kernel contains
//! every `merge(0, v)`, a full copy of `l∞`.

use crate::certificate::{link_error, ChainEntry, MixingCertificate, OperatorDescriptor};
use crate::exec::Execution;
use crate::scalar::{C64, ZERO};
use crate::seq::GeomSequence;
use crate::solve;
use crate::symbol;
use crate::tail::GeomTerm;
use crate::{Error, Result};

/// `(x₁, x₃, x₅, …)` and `(x₂, x₄, …)`.
pub fn split(x: &GeomSequence) -> (GeomSequence, GeomSequence) {
    x.parity_split()
}

/// Interleaves `u` into odd and `v` into even positions.
pub fn merge(u: &GeomSequence, v: &GeomSequence) -> GeomSequence {
    let len = u.head_len().max(v.head_len());
    let (u, v) = (u.with_head_len(len), v.with_head_len(len));
    let pad = |s: &GeomSequence, k: usize| s.head().get(k).copied().unwrap_or(ZERO);
    let head = (0..len).flat_map(|k| [pad(&u, k), pad(&v, k)]).collect();
    let mut tail = Vec::new();
    let half = C64::new(0.5, 0.0);
    // odd j = 2i − 1: σⁱ = r·rʲ, selected by (rʲ − (−r)ʲ)/2
    for t in u.tail() {
        let r = t.ratio.sqrt();
        let p: Vec<C64> = t.compose_affine_poly(0.5, 0.5).into_iter().map(|c| c * r * half).collect();
        tail.push(GeomTerm::new(p.iter().map(|c| -c).collect(), -r));
        tail.push(GeomTerm::new(p, r));
    }
    // even j = 2i: σⁱ = rʲ, selected by (rʲ + (−r)ʲ)/2
    for t in v.tail() {
        let r = t.ratio.sqrt();
        let p: Vec<C64> = t.compose_affine_poly(0.5, 0.0).into_iter().map(|c| c * half).collect();
        tail.push(GeomTerm::new(p.clone(), -r));
        tail.push(GeomTerm::new(p, r));
    }
    GeomSequence::from_parts(head, tail)
}

/// `λ·B(odd part of x)`.
pub fn product_apply(lambda: C64, x: &GeomSequence) -> GeomSequence {
    let (odd, _) = split(x);
    symbol::backward_shift(&odd).scale(lambda)
}

fn check(lambda: C64) -> Result<()> {
    if lambda.norm() <= 1.0 {
        return Err(Error::Regime(format!("the product operator needs |λ| > 1, got {}", lambda.norm())));
    }
    Ok(())
}

/// `z = merge(right_shift(y/λ), 0)`, so that `Tz = y` and `‖z‖ = ‖y‖/|λ|`.
pub fn product_step(lambda: C64, y: &GeomSequence) -> GeomSequence {
    merge(&y.scale(lambda.inv()).right_shift(), &GeomSequence::zero())
}

/// The chain `zⁿ = stepⁿ(y)` with base point zero and rate `1/|λ|`.
pub fn product_chain(lambda: C64, y: &GeomSequence, n_max: usize) -> Result<MixingCertificate> {
    check(lambda)?;
    let op = OperatorDescriptor::Product { lambda };
    let (mut z, mut error) = (y.clone(), 0.0);
    let mut chain = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let next = product_step(lambda, &z);
        error = link_error(&op, &next, 1, n - 1, &z, error)?;
        z = next;
        chain.push(ChainEntry::at_zero(n, z.clone(), error));
    }
    Ok(MixingCertificate::new(
        op,
        y.clone(),
        chain,
        1.0 / lambda.norm(),
        y.sup_norm().upper,
    ))
}

/// `merge(0, (1, 1, 1, …))`.
pub fn default_kernel_vector() -> GeomSequence {
    merge(&GeomSequence::zero(), &GeomSequence::geometric(C64::new(1.0, 0.0), C64::new(1.0, 0.0)).unwrap())
}

/// [`product_chain`] transported to `merge(0, v)`.
pub fn kernel_product_chain(
    lambda: C64,
    y: &GeomSequence,
    n_max: usize,
    v: &GeomSequence,
) -> Result<MixingCertificate> {
    let cert = product_chain(lambda, y, n_max)?;
    solve::transport_certificate(&cert, &merge(&GeomSequence::zero(), v))
}

pub const MAX_FAMILY_LOG2: u32 = 16;

/// The `2ᵏ` kernel vectors `merge(0, v_b)` with `v_b` the binary digits of
/// `b` as a head of length `k`; distinct members are at sup-distance 1.
pub fn separated_family(k: u32, exec: Execution) -> Result<Vec<GeomSequence>> {
    if k == 0 || k > MAX_FAMILY_LOG2 {
        return Err(Error::Regime(format!("family size 2^{k} outside 1..=2^{MAX_FAMILY_LOG2}")));
    }
    Ok(exec.map_range(1usize << k, |b| {
        let v = (0..k).map(|i| C64::new(((b >> i) & 1) as f64, 0.0)).collect();
        merge(&GeomSequence::zero(), &GeomSequence::finite(v))
    }))
}
