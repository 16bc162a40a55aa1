//! Property tests for the sequence model, symbols, solvers, the analytic
//! pipeline, obstructions and the product operator.

use std::f64::consts::TAU;

use proptest::prelude::*;

use shiftlab::analytic::{self, PipelineOptions};
use shiftlab::certificate::{self, ChainEntry, MixingCertificate, OperatorDescriptor};
use shiftlab::exec::Execution;
use shiftlab::obstruction;
use shiftlab::product;
use shiftlab::scalar::ZERO;
use shiftlab::solve;
use shiftlab::symbol::{self, Majorant};
use shiftlab::tail::GeomTerm;
use shiftlab::{GeomSequence, OperatorSymbol, C64};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn polar(r: f64, arg: f64) -> C64 {
    C64::from_polar(r, arg)
}

fn disk() -> impl Strategy<Value = C64> {
    (0.0..1.0f64, 0.0..TAU).prop_map(|(r, a)| polar(r.sqrt(), a))
}

fn annulus(lo: f64, hi: f64) -> impl Strategy<Value = C64> {
    (lo..=hi, 0.0..TAU).prop_map(|(r, a)| polar(r, a))
}

fn finite(max: usize) -> impl Strategy<Value = GeomSequence> {
    prop::collection::vec(disk(), 1..=max).prop_map(GeomSequence::finite)
}

fn decaying_term() -> impl Strategy<Value = GeomTerm> {
    (prop::collection::vec(disk(), 1..=3), annulus(0.05, 0.9)).prop_map(|(p, r)| GeomTerm::new(p, r))
}

fn unimodular_term() -> impl Strategy<Value = GeomTerm> {
    (annulus(0.1, 1.0), 0.0..TAU).prop_map(|(coeff, a)| GeomTerm::geometric(coeff, polar(1.0, a)))
}

/// Head of up to six entries, up to two decaying terms and an optional
/// unimodular term.
fn sequence() -> impl Strategy<Value = GeomSequence> {
    (
        prop::collection::vec(disk(), 0..=6),
        prop::collection::vec(decaying_term(), 0..=2),
        prop::option::of(unimodular_term()),
    )
        .prop_map(|(head, mut tail, uni)| {
            tail.extend(uni);
            GeomSequence::new(head, tail).unwrap()
        })
}

fn single_tail() -> impl Strategy<Value = GeomSequence> {
    (prop::collection::vec(disk(), 0..=6), disk(), annulus(0.05, 1.0)).prop_map(|(head, coeff, r)| {
        let ratio = if r.norm() > 0.97 { r / r.norm() } else { r };
        GeomSequence::new(head, vec![GeomTerm::geometric(coeff, ratio)]).unwrap()
    })
}

fn poly_symbol(max: usize) -> impl Strategy<Value = OperatorSymbol> {
    prop::collection::vec(disk(), 1..=max).prop_map(OperatorSymbol::polynomial)
}

fn sample_max(x: &GeomSequence, n: usize) -> f64 {
    (1..=n).map(|k| x.eval(k).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn add_is_pointwise(x in sequence(), y in sequence()) {
        let s = x.add(&y);
        for n in 1..=300 {
            prop_assert!((s.eval(n) - x.eval(n) - y.eval(n)).norm() <= 1e-12);
        }
    }

    #[test]
    fn sup_norm_is_sound(x in sequence()) {
        let norm = x.sup_norm();
        prop_assert!(norm.lower <= norm.upper);
        let window = 10 * (x.head_len() + 50);
        for n in 1..=window {
            prop_assert!(x.eval(n).norm() <= norm.upper + 1e-12, "n = {}", n);
        }
        prop_assert!(norm.lower - 1e-12 <= sample_max(&x, 20_000));
    }

    #[test]
    fn sup_norm_triangle(x in sequence(), y in sequence()) {
        prop_assert!(x.add(&y).sup_norm().upper <= x.sup_norm().upper + y.sup_norm().upper + 1e-9);
    }

    #[test]
    fn seminorm_vanishes_exactly_on_c0(x in sequence()) {
        let q = x.quotient_seminorm();
        prop_assert_eq!(q.lower == 0.0 && q.upper == 0.0, x.in_c0());
    }

    #[test]
    fn single_tail_norm_is_exact(x in single_tail()) {
        let norm = x.sup_norm();
        prop_assert_eq!(norm.lower, norm.upper);
        prop_assert!((norm.upper - sample_max(&x, 10_000)).abs() <= 1e-12);
    }

    #[test]
    fn symbol_product_is_composition(a in poly_symbol(4), b in poly_symbol(4), x in sequence()) {
        let (lhs, e1) = symbol::apply_symbol(&symbol::symbol_multiply(&a, &b), &x).unwrap();
        let (bx, e2) = symbol::apply_symbol(&b, &x).unwrap();
        let (rhs, e3) = symbol::apply_symbol(&a, &bx).unwrap();
        let scale = symbol::symbol_opnorm(&a).upper * symbol::symbol_opnorm(&b).upper * x.sup_norm().upper.max(1.0);
        let allowed = e1 + e2 * symbol::symbol_opnorm(&a).upper + e3 + 1e-12 * scale;
        prop_assert!(lhs.distance(&rhs).upper <= allowed);
    }

    #[test]
    fn series_product_is_composition(
        head in prop::collection::vec(disk(), 1..=4),
        gamma in 0.1..0.6f64,
        b in poly_symbol(3),
        x in finite(8),
    ) {
        // a stored head plus the certified remainder of M·γᵏ beyond it
        let a = OperatorSymbol::series(head, Some(Majorant { m: 1.0, gamma })).unwrap();
        let (lhs, e1) = symbol::apply_symbol(&symbol::symbol_multiply(&a, &b), &x).unwrap();
        let (bx, e2) = symbol::apply_symbol(&b, &x).unwrap();
        let (rhs, e3) = symbol::apply_symbol(&a, &bx).unwrap();
        let allowed = e1 + e2 * symbol::symbol_opnorm(&a).upper + e3 + 1e-12;
        prop_assert!(lhs.distance(&rhs).upper <= allowed);
    }

    #[test]
    fn opnorm_is_attained_by_signs(coeffs in prop::collection::vec(-1.0..1.0f64, 1..=6)) {
        let a = OperatorSymbol::polynomial(coeffs.iter().map(|v| c(*v)).collect());
        let total: f64 = coeffs.iter().map(|v| v.abs()).sum();
        prop_assert!((symbol::symbol_opnorm(&a).upper - total).abs() <= 1e-15 * (1.0 + total));
        let k = coeffs.len();
        let mut best = 0.0_f64;
        for mask in 0u32..(1 << (2 * k).min(12)) {
            let head: Vec<C64> = (0..2 * k).map(|i| c(if mask >> (i % 12) & 1 == 1 { -1.0 } else { 1.0 })).collect();
            let (img, _) = symbol::apply_symbol(&a, &GeomSequence::finite(head)).unwrap();
            best = best.max(img.sup_norm().upper);
        }
        prop_assert!(best >= 0.99 * total);
    }

    #[test]
    fn reciprocal_inverts(scale in annulus(0.5, 2.0), roots in prop::collection::vec(annulus(1.5, 4.0), 1..=3)) {
        let a = OperatorSymbol::from_roots(scale, &roots);
        let inv = symbol::symbol_reciprocal(&a, analytic::ZERO_FREE_RADIUS).unwrap();
        let (img, err) = symbol::apply_symbol(&symbol::symbol_multiply(&a, &inv), &GeomSequence::basis(1)).unwrap();
        prop_assert!(img.distance(&GeomSequence::basis(1)).upper <= err + 1e-10);
    }

    #[test]
    fn symbols_act_on_tails_by_evaluation(a in poly_symbol(6), coeff in disk(), ratio in annulus(0.05, 1.0)) {
        let x = GeomSequence::geometric(coeff, ratio).unwrap();
        let (img, err) = symbol::apply_symbol(&a, &x).unwrap();
        prop_assert_eq!(err, 0.0);
        let k = a.eval(ratio) * coeff;
        for n in 1..=100 {
            let expect = k * ratio.powu(n as u32);
            prop_assert!((img.eval(n) - expect).norm() <= 1e-12);
        }
    }

    #[test]
    fn kernel_vector_is_exact(lambda in annulus(1.01, 5.0)) {
        let v = solve::kernel_vector(lambda, c(1.0)).unwrap();
        let r = symbol::apply_shift(lambda, &v).sup_norm();
        prop_assert_eq!((r.lower, r.upper), (0.0, 0.0));
    }

    #[test]
    fn recurrence_matches_summation(lambda in annulus(1.01, 5.0), y in finite(12)) {
        let x = solve::bounded_preimage(lambda, &y).unwrap();
        // x_{n+1} = Σ_{k ≤ n} (−1)^{n−k} λ^{−(n−k+1)} y_k
        for n in 1..=40usize {
            let sum: C64 = (1..=n)
                .map(|k| y.eval(k) * (-lambda).powi(-((n - k + 1) as i32)) * -1.0)
                .sum();
            prop_assert!((x.eval(n + 1) - sum).norm() <= 1e-10 * (1.0 + sum.norm()), "n = {}", n);
        }
    }

    #[test]
    fn chain_norms_decay(lambda in annulus(1.2, 5.0), y in finite(12)) {
        let cert = solve::mixing_chain(lambda, &y, 15).unwrap();
        let ny = y.sup_norm().upper;
        for e in &cert.chain {
            prop_assert!(e.norm.upper <= ny / (lambda.norm() - 1.0).powi(e.n as i32) + 1e-9);
        }
    }

    #[test]
    fn factored_preimage_bound(
        zeros in prop::collection::vec(annulus(0.0, 0.9), 1..=4),
        r1 in 1.0..3.0f64,
        y in finite(12),
    ) {
        let x = solve::factored_preimage(&zeros, r1, &y).unwrap();
        let prod: f64 = zeros.iter().map(|z| 1.0 - z.norm()).product();
        prop_assert!(x.sup_norm().upper <= y.sup_norm().upper / (r1 * prod) + 1e-9);
        let p = OperatorSymbol::from_roots(c(r1), &zeros);
        let back = symbol::apply_polynomial(p.coeffs(), &x);
        prop_assert!(back.distance(&y).upper <= 1e-10 * (1.0 + y.sup_norm().upper));
    }

    #[test]
    fn resolvent_identity(mu in annulus(0.0, 0.95), y in finite(12)) {
        let x = obstruction::resolvent_solve(mu, &y).unwrap();
        let back = symbol::backward_shift(&x).sub(&x.scale(mu));
        prop_assert!(back.distance(&y).upper <= 1e-10);
        prop_assert!(x.sup_norm().upper <= y.sup_norm().upper / (1.0 - mu.norm()) + 1e-9);
    }

    #[test]
    fn shift_resolvent_is_injective_mod_c0(mu in annulus(0.0, 0.9), x in sequence()) {
        let z = symbol::backward_shift(&x).sub(&x.scale(mu));
        prop_assert_eq!(z.in_c0(), x.in_c0());
    }

    #[test]
    fn split_merge_are_inverse(x in sequence(), u in sequence(), v in sequence()) {
        let (a, b) = product::split(&x);
        let back = product::merge(&a, &b);
        let m = product::merge(&u, &v);
        let (u2, v2) = product::split(&m);
        for n in 1..=200 {
            prop_assert!((back.eval(n) - x.eval(n)).norm() <= 1e-12);
            prop_assert!((u2.eval(n) - u.eval(n)).norm() <= 1e-12);
            prop_assert!((v2.eval(n) - v.eval(n)).norm() <= 1e-12);
        }
    }

    #[test]
    fn merge_norm_is_max(u in single_tail(), v in single_tail()) {
        let m = product::merge(&u, &v).sup_norm();
        let expect = u.sup_norm().upper.max(v.sup_norm().upper);
        prop_assert!(m.lower <= expect + 1e-12 && expect <= m.upper + 1e-12);
        prop_assert!(m.width() <= 1e-12 * (1.0 + expect));
    }

    #[test]
    fn product_chain_residual(lambda in annulus(1.1, 4.0), y in finite(10)) {
        let cert = product::product_chain(lambda, &y, 12).unwrap();
        for e in &cert.chain {
            let mut img = e.w.clone();
            for _ in 0..e.n {
                img = product::product_apply(lambda, &img);
            }
            prop_assert!(img.distance(&y).upper <= 1e-10 * e.n as f64);
            prop_assert!(e.norm.upper <= lambda.norm().powi(-(e.n as i32)) * y.sup_norm().upper + 1e-9);
        }
    }

    #[test]
    fn certificate_json_round_trip(lambda in annulus(2.1, 5.0), y in finite(6)) {
        let cert = solve::kernel_mixing_chain(lambda, &y, 6).unwrap();
        let back = MixingCertificate::from_json(&cert.to_json().unwrap()).unwrap();
        // tails are stored with absolute indexing, so values agree to rounding
        prop_assert_eq!(&back.operator, &cert.operator);
        prop_assert_eq!((back.rate, back.offset), (cert.rate, cert.offset));
        prop_assert_eq!(back.chain.len(), cert.chain.len());
        for (a, b) in back.chain.iter().zip(&cert.chain) {
            prop_assert_eq!((a.n, a.norm, a.distance, a.error), (b.n, b.norm, b.distance, b.error));
            for n in 1..=60 {
                prop_assert!((a.w.eval(n) - b.w.eval(n)).norm() <= 1e-14 * (1.0 + b.norm.upper));
            }
        }
        prop_assert!(certificate::verify(&back).unwrap().ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pipeline_end_to_end(
        zeros in prop::collection::vec(annulus(0.0, 0.5), 1..=2),
        extra in 1.0..2.0f64,
    ) {
        // nearly coincident zeros give chain points with large cancelling
        // tail terms, whose coefficient rounding dwarfs the decaying norm
        prop_assume!(zeros.len() < 2 || (zeros[0] - zeros[1]).norm() >= 0.25);
        let prod: f64 = zeros.iter().map(|z| 1.0 - z.norm()).product();
        let f = OperatorSymbol::from_roots(c(extra / prod), &zeros);
        let opts = PipelineOptions::default();
        let p = analytic::pipeline_params(&f, opts).unwrap();
        prop_assert!(p.validate().is_ok());
        let m_max = (40 / p.n0).clamp(1, 5);
        let y = GeomSequence::basis(1);
        let run = analytic::analytic_mixing_chain(&f, 1.01 * p.r0, &y, m_max, opts).unwrap();
        for (m, e) in run.block.chain.iter().enumerate() {
            prop_assert!(e.norm.upper <= p.ab().powi(m as i32 + 1) + e.error);
        }
        // rounding in an entry is amplified by at most (‖T‖·rate)ⁿ on the way
        // back to y; the error stays small wherever f64 can support it
        let growth = run.certificate.operator.opnorm() * run.certificate.rate;
        for e in run.certificate.chain.iter().filter(|e| e.n <= 40 && growth.powi(e.n as i32) <= 1e6) {
            prop_assert!(e.error < 1e-6, "n = {}: error {:e}", e.n, e.error);
        }
        prop_assert!(certificate::verify(&run.certificate).unwrap().ok());
    }

    #[test]
    fn deflation_reproduces_symbol(
        zeros in prop::collection::vec(annulus(0.0, 0.8), 1..=3),
        outside in prop::collection::vec(annulus(1.5, 3.0), 0..=2),
        scale in annulus(0.5, 2.0),
    ) {
        let mut all = zeros.clone();
        all.extend(outside);
        let f = OperatorSymbol::from_roots(scale, &all);
        let found = analytic::disk_zeros(&f).unwrap();
        prop_assert_eq!(found.len(), zeros.len());
        let (g, delta) = analytic::deflate_and_delta(&f, &found).unwrap();
        prop_assert!(delta > 0.0);
        let back = symbol::symbol_multiply(&g, &OperatorSymbol::from_roots(c(1.0), &found));
        prop_assert_eq!(back.coeffs().len(), f.coeffs().len());
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            prop_assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn pipeline_rate_dominates_direct_rate(r in 1.22..3.0f64) {
        let f = OperatorSymbol::polynomial(vec![ZERO, c(1.0)]);
        let opts = PipelineOptions::default();
        let y = GeomSequence::basis(1);
        let run = analytic::analytic_mixing_chain(&f, r, &y, 3, opts).unwrap();
        prop_assert!(certificate::verify(&run.certificate).unwrap().ok());
        // R·B has the right inverse y ↦ right_shift(y)/R
        let op = OperatorDescriptor::Symbol { symbol: OperatorSymbol::polynomial(vec![ZERO, c(r)]) };
        let mut w = y.clone();
        let chain: Vec<ChainEntry> = (1..=10)
            .map(|n| {
                w = w.right_shift().scale(c(1.0 / r));
                ChainEntry::at_zero(n, w.clone(), 0.0)
            })
            .collect();
        let direct = MixingCertificate::new(op, y, chain, 1.0 / r, 1.0);
        prop_assert!(certificate::verify(&direct).unwrap().ok());
        prop_assert!(run.certificate.rate >= direct.rate);
    }

    #[test]
    fn c0_points_are_approached(
        lambda in annulus(3.0, 5.0),
        head in prop::collection::vec(disk(), 1..=6),
        coeff in disk(),
        ratio in annulus(0.05, 0.5),
        y in finite(6),
    ) {
        let x = GeomSequence::new(head, vec![GeomTerm::geometric(coeff, ratio)]).unwrap();
        prop_assert!(obstruction::amix_membership(lambda, &x).unwrap());
        let chain = obstruction::approach_chain(lambda, &x, &y, 60).unwrap();
        let (early, last) = (&chain[14], chain.last().unwrap());
        prop_assert!(last.distance.upper < 0.05, "{}", last.distance.upper);
        prop_assert!(last.distance.upper <= early.distance.upper);
        prop_assert!(last.delta.sup_norm().upper <= last.distance.upper + 1e-12);
    }
}

#[test]
fn witness_floor_on_roots_of_unity() {
    for k in 0..32 {
        let lambda = polar(1.0, TAU * k as f64 / 32.0);
        for n in [21, 51, 101] {
            let r = obstruction::witness_report(lambda, n).unwrap();
            assert!(r.min_norm.lower >= (n as f64 - 1.0) / 4.0 - 1e-6, "λ = {lambda}, N = {n}: {}", r.min_norm);
        }
    }
}

#[test]
fn threshold_is_monotone() {
    for k in 0..1000 {
        let r = 4.0 * k as f64 / 999.0;
        let d = obstruction::spectral_circle_distance(c(r));
        if r <= 2.0 {
            assert_eq!(d, 0.0);
        } else {
            assert!(d > 0.0 && (d - (r - 2.0)).abs() <= 1e-12);
        }
    }
}

#[test]
fn families_are_separated_up_to_k10() {
    for k in 1..=10 {
        let fam = product::separated_family(k, Execution::available()).unwrap();
        assert_eq!(fam.len(), 1 << k);
        // differing digits sit at even positions with value 1 against 0
        for (i, a) in fam.iter().enumerate().step_by(1 + (fam.len() / 64)) {
            for b in &fam[i + 1..] {
                let d = a.distance(b);
                assert_eq!((d.lower, d.upper), (1.0, 1.0));
            }
        }
    }
}

#[test]
fn parallel_and_sequential_agree() {
    let roots: Vec<C64> = (0..8).map(|k| polar(1.0, TAU * k as f64 / 8.0)).collect();
    let a = obstruction::perturbation_suite(&roots, 51, 10, 0.4, 9, Execution::Sequential).unwrap();
    let b = obstruction::perturbation_suite(&roots, 51, 10, 0.4, 9, Execution::available()).unwrap();
    assert_eq!(a, b);
}
