//! Products checked against an index-word oracle that knows nothing about
//! bitmasks: blades are lists of generator indices, products concatenate
//! and bubble-sort them, and the interior products come from their
//! adjointness to `∧`.

use dirac_beltrami::clifford::{
    b_op, cliff_neg, cliff_pos, euler_op, grade_of, hodge_left, hodge_right, lcontract, product, rcontract, wedge,
    Multivector, Signature,
};
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn word(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|j| mask >> j & 1 == 1).collect()
}

fn mask_of(word: &[usize]) -> usize {
    word.iter().fold(0, |m, j| m | 1 << j)
}

/// `e_s e_t` as `(coefficient, blade)`; `square` is `e_j e_j`, zero for `∧`.
fn word_product(s: usize, t: usize, square: f64) -> (f64, usize) {
    let mut w = word(s);
    w.extend(word(t));
    let mut sign = 1.0;
    for i in 0..w.len() {
        for j in 0..w.len() - 1 - i {
            if w[j] > w[j + 1] {
                w.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < w.len() {
        if i + 1 < w.len() && w[i] == w[i + 1] {
            sign *= square;
            i += 2;
        } else {
            out.push(w[i]);
            i += 1;
        }
    }
    (sign, mask_of(&out))
}

fn bilinear(a: &Multivector, b: &Multivector, square: f64) -> Multivector {
    let n = a.dim();
    let mut out = Multivector::zero(n);
    for s in 0..1 << n {
        for t in 0..1 << n {
            let (sign, m) = word_product(s, t, square);
            if sign != 0.0 {
                out.set(m, out.get(m) + sign * a.get(s) * b.get(t));
            }
        }
    }
    out
}

/// `(a ⌟ b)_c = ⟨b, a ∧ e_c⟩`.
fn lcontract_oracle(a: &Multivector, b: &Multivector) -> Multivector {
    let n = a.dim();
    let mut out = Multivector::zero(n);
    for c in 0..1 << n {
        let ac = bilinear(a, &Multivector::blade(n, c).unwrap(), 0.0);
        out.set(c, (0..1 << n).map(|s| b.get(s) * ac.get(s)).sum());
    }
    out
}

/// `(b ⌞ a)_c = ⟨b, e_c ∧ a⟩`.
fn rcontract_oracle(b: &Multivector, a: &Multivector) -> Multivector {
    let n = a.dim();
    let mut out = Multivector::zero(n);
    for c in 0..1 << n {
        let ca = bilinear(&Multivector::blade(n, c).unwrap(), a, 0.0);
        out.set(c, (0..1 << n).map(|s| b.get(s) * ca.get(s)).sum());
    }
    out
}

fn multivector(n: usize) -> impl Strategy<Value = Multivector> {
    prop::collection::vec(-1.0f64..1.0, 1 << n).prop_map(move |c| Multivector::from_coeffs(n, &c).unwrap())
}

fn vector(n: usize) -> impl Strategy<Value = Multivector> {
    prop::collection::vec(-1.0f64..1.0, n).prop_map(|c| Multivector::vector(&c).unwrap())
}

fn pair() -> impl Strategy<Value = (Multivector, Multivector)> {
    (2usize..=6).prop_flat_map(|n| (multivector(n), multivector(n)))
}

fn vector_and_multivector() -> impl Strategy<Value = (Multivector, Multivector)> {
    (2usize..=6).prop_flat_map(|n| (vector(n), multivector(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn products_match_word_oracle((a, b) in pair()) {
        prop_assert!(cliff_pos(&a, &b).unwrap().max_abs_diff(&bilinear(&a, &b, 1.0)) < TOL);
        prop_assert!(cliff_neg(&a, &b).unwrap().max_abs_diff(&bilinear(&a, &b, -1.0)) < TOL);
        prop_assert!(wedge(&a, &b).unwrap().max_abs_diff(&bilinear(&a, &b, 0.0)) < TOL);
    }

    #[test]
    fn contractions_are_adjoints_of_wedge((a, b) in pair()) {
        prop_assert!(lcontract(&a, &b).unwrap().max_abs_diff(&lcontract_oracle(&a, &b)) < TOL);
        prop_assert!(rcontract(&b, &a).unwrap().max_abs_diff(&rcontract_oracle(&b, &a)) < TOL);
    }

    #[test]
    fn riesz_identities((v, w) in vector_and_multivector()) {
        let c = lcontract(&v, &w).unwrap();
        let x = wedge(&v, &w).unwrap();
        prop_assert!(cliff_pos(&v, &w).unwrap().max_abs_diff(&(&c + &x)) < TOL);
        prop_assert!(cliff_neg(&v, &w).unwrap().max_abs_diff(&(&x - &c)) < TOL);
    }

    #[test]
    fn involutions_respect_products((a, b) in pair()) {
        for sig in [Signature::Pos, Signature::Neg] {
            let ab = product(&a, &b, sig).unwrap();
            let hat = product(&a.involution(), &b.involution(), sig).unwrap();
            prop_assert!(ab.involution().max_abs_diff(&hat) < TOL);
            let rev = product(&b.reversion(), &a.reversion(), sig).unwrap();
            prop_assert!(ab.reversion().max_abs_diff(&rev) < TOL);
        }
    }

    #[test]
    fn vector_product_norm_is_multiplicative((v, w) in vector_and_multivector()) {
        let lhs = cliff_pos(&v, &w).unwrap().norm();
        prop_assert!((lhs - v.norm() * w.norm()).abs() < TOL);
        let lhs = cliff_neg(&v, &w).unwrap().norm();
        prop_assert!((lhs - v.norm() * w.norm()).abs() < TOL);
    }

    #[test]
    fn b_operator_spectrum(w in (2usize..=6).prop_flat_map(multivector)) {
        let n = w.dim();
        let mut expected = Multivector::zero(n);
        for m in 0..1 << n {
            expected.set(m, (n as f64 - 2.0 * grade_of(m) as f64) * w.get(m));
        }
        prop_assert!(b_op(&w).max_abs_diff(&expected) < TOL);
        let e = euler_op(&w);
        prop_assert!(b_op(&w).max_abs_diff(&(&w.scale(n as f64) - &e.scale(2.0))) < TOL);
    }

    #[test]
    fn double_star_sign(w in (2usize..=6).prop_flat_map(multivector)) {
        let n = w.dim();
        let mut expected = Multivector::zero(n);
        for m in 0..1 << n {
            let k = grade_of(m);
            expected.set(m, if (k * (n - k)).is_multiple_of(2) { w.get(m) } else { -w.get(m) });
        }
        prop_assert!(hodge_left(&hodge_left(&w)).max_abs_diff(&expected) < TOL);
        prop_assert!(hodge_right(&hodge_right(&w)).max_abs_diff(&expected) < TOL);
    }
}

#[test]
fn oracle_sanity() {
    assert_eq!(word_product(0b01, 0b01, -1.0), (-1.0, 0));
    assert_eq!(word_product(0b10, 0b01, 1.0), (-1.0, 0b11));
    assert_eq!(word_product(0b011, 0b110, 1.0), (1.0, 0b101));
    assert_eq!(word_product(0b110, 0b001, 1.0), (1.0, 0b111));
    assert_eq!(word_product(0b01, 0b01, 0.0).0, 0.0);
}
