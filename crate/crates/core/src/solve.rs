//! Kernels, preimages and mixing chains for first-order shift operators.
//!
//! All solvers reduce to the recurrence `a₀xₙ + a₁xₙ₊₁ = yₙ`. The head is
//! filled by forward substitution from the chosen `x₁`; past the support of
//! `y`'s head the solution is a particular tail (termwise symbol solve) plus
//! one homogeneous geometric term of ratio `α = −a₀/a₁`.

use crate::certificate::{link_error, ChainEntry, MixingCertificate, OperatorDescriptor};
use crate::scalar::{C64, ONE, ZERO};
use crate::seq::GeomSequence;
use crate::tail::GeomTerm;
use crate::{Error, Result};

/// The solution of a preimage problem, which may leave `l∞`.
#[derive(Debug, Clone, PartialEq)]
pub enum Preimage {
    Bounded(GeomSequence),
    /// Exact values, but the sequence grows; norms do not apply.
    Unbounded(GeomSequence),
}

impl Preimage {
    pub fn is_bounded(&self) -> bool {
        matches!(self, Self::Bounded(_))
    }

    pub fn sequence(&self) -> &GeomSequence {
        match self {
            Self::Bounded(s) | Self::Unbounded(s) => s,
        }
    }

    pub fn eval(&self, n: usize) -> C64 {
        self.sequence().eval(n)
    }

    pub fn into_bounded(self) -> Result<GeomSequence> {
        match self {
            Self::Bounded(s) => Ok(s),
            Self::Unbounded(_) => Err(Error::Regime("preimage is unbounded".into())),
        }
    }
}

/// Homogeneous ratio of `a₀ + a₁z`.
fn char_ratio(a0: C64, a1: C64) -> C64 {
    -(a0 / a1)
}

/// Solves `a₀xₙ + a₁xₙ₊₁ = yₙ` with the given `x₁`.
pub fn first_order_preimage(a0: C64, a1: C64, y: &GeomSequence, x1: C64) -> Result<Preimage> {
    if a1 == ZERO {
        return Err(Error::InvalidSymbol("leading coefficient a₁ must be nonzero".into()));
    }
    let big_n = y.head_len();
    let len = big_n + 1;
    let mut head = Vec::with_capacity(len);
    head.push(x1);
    for n in 1..len {
        let next = (y.eval(n) - a0 * head[n - 1]) / a1;
        head.push(next);
    }
    // equation at n = len determines x_{len+1}
    let t_val = (y.eval(len) - a0 * head[len - 1]) / a1;
    let symbol = [a0, a1];
    let mut tail: Vec<GeomTerm> = y
        .tail()
        .iter()
        .map(|t| t.shift_forward(1).solve_symbol(&symbol))
        .collect::<Result<_>>()?;
    let alpha = char_ratio(a0, a1);
    if alpha != ZERO {
        let part1: C64 = tail.iter().map(|t| t.eval(1)).sum();
        let e = (t_val - part1) / alpha;
        tail.push(GeomTerm::geometric(e, alpha));
    }
    let seq = GeomSequence::from_parts(head, tail);
    let bounded = seq.tail().iter().all(|t| t.is_bounded());
    Ok(if bounded { Preimage::Bounded(seq) } else { Preimage::Unbounded(seq) })
}

/// `w₁·(−1/λ)^{n−1}`, spanning the kernel of `I + λB`.
pub fn kernel_vector(lambda: C64, w1: C64) -> Result<GeomSequence> {
    if lambda == ZERO {
        return Err(Error::Regime("identity has trivial kernel".into()));
    }
    if lambda.norm() < 1.0 {
        return Err(Error::Regime(format!("kernel not in l∞ for |λ| = {} < 1", lambda.norm())));
    }
    let ratio = char_ratio(ONE, lambda);
    // value w₁ρ^{n−1} = (w₁/ρ)·ρⁿ
    Ok(GeomSequence::from_parts(Vec::new(), vec![GeomTerm::geometric(w1 / ratio, ratio)]))
}

/// Solves `(I + λB)x = y` with the given `x₁`.
pub fn preimage(lambda: C64, y: &GeomSequence, x1: C64) -> Result<Preimage> {
    if lambda == ZERO {
        return Err(Error::Regime("identity: J-sets are singletons".into()));
    }
    first_order_preimage(ONE, lambda, y, x1)
}

/// The `x₁ = 0` preimage, with `‖x‖ ≤ ‖y‖/(|λ| − 1)`.
pub fn bounded_preimage(lambda: C64, y: &GeomSequence) -> Result<GeomSequence> {
    if lambda.norm() <= 1.0 {
        return Err(Error::Regime(format!(
            "no uniform bound available for |λ| = {} ≤ 1",
            lambda.norm()
        )));
    }
    preimage(lambda, y, ZERO)?.into_bounded()
}

fn check_regime(lambda: C64) -> Result<()> {
    if lambda == ZERO {
        return Err(Error::Regime("identity: J-sets are singletons".into()));
    }
    if lambda.norm() <= 1.0 {
        return Err(Error::Regime(format!(
            "|λ| = {} ≤ 1: I + λB has no bounded right inverse, and for |λ| ≤ 2 it is not locally mixing",
            lambda.norm()
        )));
    }
    Ok(())
}

/// The chain `wⁿ = bounded_preimageⁿ(y)` for `I + λB` with base point zero.
pub fn mixing_chain(lambda: C64, y: &GeomSequence, n_max: usize) -> Result<MixingCertificate> {
    check_regime(lambda)?;
    let op = OperatorDescriptor::ShiftPerturbation { lambda };
    let mut chain = Vec::with_capacity(n_max);
    let (mut w, mut error) = (y.clone(), 0.0);
    for n in 1..=n_max {
        let next = bounded_preimage(lambda, &w)?;
        error = link_error(&op, &next, 1, n - 1, &w, error)?;
        w = next;
        chain.push(ChainEntry::at_zero(n, w.clone(), error));
    }
    let rate = 1.0 / (lambda.norm() - 1.0);
    Ok(MixingCertificate::new(
        op,
        y.clone(),
        chain,
        rate,
        y.sup_norm().upper,
    ))
}

/// [`mixing_chain`] transported to the base point `kernel_vector(λ, 1)`.
pub fn kernel_mixing_chain(lambda: C64, y: &GeomSequence, n_max: usize) -> Result<MixingCertificate> {
    let cert = mixing_chain(lambda, y, n_max)?;
    transport_certificate(&cert, &kernel_vector(lambda, ONE)?)
}

/// Solves `R₁∏(B − zₖ)x = y` one linear stage per zero, each with `x₁ = 0`.
pub fn factored_preimage(zeros: &[C64], r1: f64, y: &GeomSequence) -> Result<GeomSequence> {
    if let Some(z) = zeros.iter().find(|z| z.norm() >= 1.0) {
        return Err(Error::Hypothesis(format!("zero {z} is not inside the open unit disk")));
    }
    if r1.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Hypothesis(format!("R₁ must be positive, got {r1}")));
    }
    let mut x = y.scale(C64::new(1.0 / r1, 0.0));
    for z in zeros {
        x = linear_stage(*z, &x)?;
    }
    Ok(x)
}

/// `(B − z)u = v` with `u₁ = 0`, for `|z| < 1`.
fn linear_stage(z: C64, v: &GeomSequence) -> Result<GeomSequence> {
    if z == ZERO {
        return Ok(v.right_shift());
    }
    first_order_preimage(-z, ONE, v, ZERO)?.into_bounded()
}

/// Solves `(B − μ)x = y` with `x₁ = 0`, for `|μ| < 1`.
pub fn resolvent_solve(mu: C64, y: &GeomSequence) -> Result<GeomSequence> {
    if mu.norm() >= 1.0 {
        return Err(Error::Regime(format!("resolvent needs |μ| < 1, got {}", mu.norm())));
    }
    linear_stage(mu, y)
}

/// Moves a base-zero certificate to a kernel vector `x`: entries become
/// `x + wⁿ`, whose images under `Tⁿ` are unchanged.
pub fn transport_certificate(cert0: &MixingCertificate, x: &GeomSequence) -> Result<MixingCertificate> {
    if !cert0.base_point.is_zero() {
        return Err(Error::Verification("transport needs a certificate based at zero".into()));
    }
    let (tx, err) = cert0.operator.apply(x)?;
    let scale = x.sup_norm().upper.max(1.0) * cert0.operator.opnorm();
    let residual = tx.sup_norm().upper;
    if residual > err + 1e-12 * scale {
        return Err(Error::Verification(format!("base point is not in the kernel (residual {residual:e})")));
    }
    let chain = cert0
        .chain
        .iter()
        .map(|e| {
            let w = x.add(&e.delta);
            ChainEntry { n: e.n, norm: w.sup_norm(), w, delta: e.delta.clone(), distance: e.distance, error: e.error }
        })
        .collect();
    Ok(MixingCertificate { base_point: x.clone(), chain, ..cert0.clone() })
}

/// A right inverse `T u = v` with `‖u‖ ≤ κ‖v‖`.
pub trait RightInverse: Sync {
    fn solve(&self, v: &GeomSequence) -> Result<GeomSequence>;
    fn kappa(&self) -> f64;
}

/// Spreads a certificate for `T^{n₀}` to all powers of `T`.
///
/// `block` holds entries at `n = m·n₀` (`m ≥ 1`) with base point zero and
/// per-block rate `rate`; block zero is the target. Entry `m·n₀ + r` is `r`
/// single-step solves applied to block entry `m`.
pub fn fill_chain(block: &MixingCertificate, n0: usize, step: &dyn RightInverse) -> Result<MixingCertificate> {
    assert!(n0 >= 1, "block length must be positive");
    if !block.base_point.is_zero() {
        return Err(Error::Verification("fill_chain needs a certificate based at zero".into()));
    }
    if n0 == 1 {
        return Ok(block.clone());
    }
    let mut blocks = vec![(0usize, block.target.clone(), 0.0)];
    for e in &block.chain {
        if e.n % n0 != 0 {
            return Err(Error::Verification(format!("entry {} is not a multiple of n₀ = {n0}", e.n)));
        }
        blocks.push((e.n, e.w.clone(), e.error));
    }
    let mut chain = Vec::new();
    for (n, w, error) in blocks {
        if n > 0 {
            chain.push(ChainEntry::at_zero(n, w.clone(), error));
        }
        let mut u = w.clone();
        for r in 1..n0 {
            u = step.solve(&u)?;
            let e = link_error(&block.operator, &u, r, n, &w, error)?;
            chain.push(ChainEntry::at_zero(n + r, u.clone(), e));
        }
    }
    chain.sort_by_key(|e| e.n);
    let rho = block.rate.powf(1.0 / n0 as f64);
    let offset = (step.kappa() / rho).max(1.0).powi(n0 as i32 - 1) * block.offset;
    let mut cert = MixingCertificate::new(block.operator.clone(), block.target.clone(), chain, rho, offset);
    cert.non_decaying = block.non_decaying;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_vector(c(2.0), c(1.0)).unwrap();
        assert_eq!(k.prefix(4), vec![c(1.0), c(-0.5), c(0.25), c(-0.125)]);
        let k = kernel_vector(c(-1.0), c(1.0)).unwrap();
        assert_eq!(k.prefix(3), vec![c(1.0); 3]);
        assert!(kernel_vector(c(3.0), ZERO).unwrap().is_zero());
        assert!(kernel_vector(c(0.5), c(1.0)).is_err());
        assert!(kernel_vector(ZERO, c(1.0)).is_err());
        for lambda in [c(3.0), C64::new(0.3, -1.7), c(-1.0), C64::new(0.0, 1.0)] {
            let k = kernel_vector(lambda, C64::new(0.4, 0.9)).unwrap();
            assert_eq!(crate::symbol::apply_shift(lambda, &k).sup_norm().upper, 0.0);
        }
    }

    #[test]
    fn preimage_examples() {
        let x = bounded_preimage(c(3.0), &GeomSequence::basis(1)).unwrap();
        let want = [0.0, 1.0 / 3.0, -1.0 / 9.0, 1.0 / 27.0];
        for (n, w) in want.iter().enumerate() {
            assert!((x.eval(n + 1) - c(*w)).norm() < 1e-16);
        }
        assert!((x.sup_norm().upper - 1.0 / 3.0).abs() < 1e-16);
        let x = bounded_preimage(c(1.5), &GeomSequence::basis(1)).unwrap();
        assert!((x.sup_norm().upper - 2.0 / 3.0).abs() < 1e-15);
        assert!(bounded_preimage(c(1.0), &GeomSequence::basis(1)).is_err());
        // homogeneous data reproduce the kernel vector
        let lambda = C64::new(1.2, 2.0);
        let x = preimage(lambda, &GeomSequence::zero(), c(0.7)).unwrap();
        let k = kernel_vector(lambda, c(0.7)).unwrap();
        for n in 1..30 {
            assert!((x.eval(n) - k.eval(n)).norm() < 1e-15);
        }
    }

    #[test]
    fn unimodular_preimage_is_flagged() {
        let ones = GeomSequence::geometric(c(1.0), c(1.0)).unwrap();
        let x = preimage(c(-1.0), &ones, ZERO).unwrap();
        assert!(!x.is_bounded());
        for n in 1..50 {
            assert!((x.eval(n) - c(-(n as f64 - 1.0))).norm() < 1e-12);
        }
    }

    #[test]
    fn chain_norms() {
        let cert = mixing_chain(c(3.0), &GeomSequence::basis(1), 2).unwrap();
        assert!((cert.chain[0].norm.upper - 1.0 / 3.0).abs() < 1e-16);
        assert!((cert.chain[1].norm.upper - 1.0 / 9.0).abs() < 1e-16);
        assert_eq!(cert.rate, 0.5);
        assert!(!cert.non_decaying);
        assert!(mixing_chain(c(1.5), &GeomSequence::basis(1), 3).unwrap().non_decaying);
        assert!(mixing_chain(ZERO, &GeomSequence::basis(1), 3).is_err());
        let zero = mixing_chain(c(3.0), &GeomSequence::zero(), 4).unwrap();
        assert!(zero.chain.iter().all(|e| e.w.is_zero()));
    }

    #[test]
    fn factored_examples() {
        let x = factored_preimage(&[ZERO], 1.1, &GeomSequence::basis(1)).unwrap();
        assert_eq!(x, GeomSequence::basis(2).scale(c(1.0 / 1.1)));
        let x = factored_preimage(&[c(0.5)], 3.0, &GeomSequence::basis(1)).unwrap();
        assert!(x.sup_norm().upper <= 2.0 / 3.0 + 1e-15);
        let y = GeomSequence::finite(vec![c(2.0), c(-4.0)]);
        assert_eq!(factored_preimage(&[], 2.0, &y).unwrap(), y.scale(c(0.5)));
        assert!(factored_preimage(&[c(1.0)], 2.0, &y).is_err());
    }

    #[test]
    fn resolvent_examples() {
        let x = resolvent_solve(c(0.5), &GeomSequence::basis(1)).unwrap();
        assert_eq!(x.prefix(4), vec![ZERO, c(1.0), c(0.5), c(0.25)]);
        let y = GeomSequence::finite(vec![c(1.0), c(2.0)]);
        assert_eq!(resolvent_solve(ZERO, &y).unwrap(), y.right_shift());
        // resonant data ρ = μ
        let y = GeomSequence::geometric(c(1.0), c(0.5)).unwrap();
        let x = resolvent_solve(c(0.5), &y).unwrap();
        let back = crate::symbol::apply_polynomial(&[c(-0.5), c(1.0)], &x);
        for n in 1..80 {
            assert!((back.eval(n) - y.eval(n)).norm() < 1e-15);
        }
        assert!(resolvent_solve(c(1.0), &y).is_err());
    }

    #[test]
    fn transport_keeps_targets() {
        let cert = mixing_chain(c(3.0), &GeomSequence::basis(1), 6).unwrap();
        let x = kernel_vector(c(3.0), c(1.0)).unwrap();
        let moved = transport_certificate(&cert, &x).unwrap();
        assert_eq!(moved.base_point, x);
        for (a, b) in cert.chain.iter().zip(&moved.chain) {
            let lo = 1.0 - a.norm.upper;
            let hi = 1.0 + a.norm.upper;
            assert!(b.norm.lower >= lo - 1e-15 && b.norm.upper <= hi + 1e-15);
        }
        assert!(transport_certificate(&cert, &GeomSequence::basis(1)).is_err());
        assert_eq!(transport_certificate(&cert, &GeomSequence::zero()).unwrap().chain, cert.chain);
    }

    struct Halve;
    impl RightInverse for Halve {
        fn solve(&self, v: &GeomSequence) -> Result<GeomSequence> {
            Ok(v.right_shift().scale(c(0.5)))
        }
        fn kappa(&self) -> f64 {
            0.5
        }
    }

    #[test]
    fn fill_chain_interleaves_blocks() {
        // T = 2B, T² solved blockwise by 1/4 right shifts
        let op = OperatorDescriptor::Symbol { symbol: crate::symbol::OperatorSymbol::polynomial(vec![ZERO, c(2.0)]) };
        let y = GeomSequence::basis(1);
        let mut w = y.clone();
        let mut chain = Vec::new();
        for m in 1..=3 {
            w = w.right_shift().right_shift().scale(c(0.25));
            chain.push(ChainEntry::at_zero(2 * m, w.clone(), 0.0));
        }
        let block = MixingCertificate::new(op, y, chain, 0.25, 1.0);
        let full = fill_chain(&block, 2, &Halve).unwrap();
        assert_eq!(full.chain.iter().map(|e| e.n).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5, 6, 7]);
        assert!((full.rate - 0.5).abs() < 1e-15);
        assert_eq!(full.offset, 1.0);
        assert!(crate::certificate::verify(&full).unwrap().ok());
        assert_eq!(fill_chain(&block, 1, &Halve).unwrap(), block);
    }
}
