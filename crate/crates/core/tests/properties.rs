use proptest::prelude::*;

use bvloop::bv_structure::{image_is_b_free, BVTable};
use bvloop::graded_ring::{build_presentation, Element, Monomial, Parity};
use bvloop::spectral_sequence::{compare_einfty_vs_splitting, default_max_q};
use bvloop::SpaceSpec;

fn spaces() -> Vec<SpaceSpec> {
    let mut v: Vec<SpaceSpec> = (1..=5).map(|n| SpaceSpec::hp(n).unwrap()).collect();
    v.push(SpaceSpec::op2());
    v.push(SpaceSpec::even_sphere(8).unwrap());
    v
}

fn any_space() -> impl Strategy<Value = SpaceSpec> {
    prop::sample::select(spaces())
}

/// Unreduced `a^p b^e x^q`; may be zero in the ring.
fn any_word() -> impl Strategy<Value = Monomial> {
    (0u32..7, 0u32..2, 0u32..5).prop_map(|(p, e, q)| Monomial::from_exponents(&[p, e, q]))
}

fn sign(parity_product: bool) -> i64 {
    if parity_product {
        -1
    } else {
        1
    }
}

proptest! {
    #[test]
    fn graded_commutative(space in any_space(), m1 in any_word(), m2 in any_word()) {
        let ring = build_presentation(&space);
        let (x, y) = (Element::monomial(&ring, m1.clone(), 1), Element::monomial(&ring, m2.clone(), 1));
        let odd = ring.parity(&m1) == Parity::Odd && ring.parity(&m2) == Parity::Odd;
        prop_assert_eq!(&x * &y, (&y * &x).scale(&sign(odd).into()));
    }

    #[test]
    fn associative(space in any_space(), m1 in any_word(), m2 in any_word(), m3 in any_word()) {
        let ring = build_presentation(&space);
        let [x, y, z] = [m1, m2, m3].map(|m| Element::monomial(&ring, m, 1));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn torsion_propagates(space in any_space(), m1 in any_word(), m2 in any_word()) {
        let ring = build_presentation(&space);
        if ring.is_zero_monomial(&m1) {
            return Ok(());
        }
        let k = ring.torsion_modulus(&m1).unwrap();
        if k > 0 {
            let k = k.into();
            let x = Element::monomial(&ring, m1, 1);
            prop_assert!(x.scale(&k).is_zero());
            let y = Element::monomial(&ring, m2, 1);
            prop_assert!((&x * &y).scale(&k).is_zero());
        }
    }

    #[test]
    fn delta_axioms(space in any_space(), words in prop::collection::vec((any_word(), -5i64..=5), 1..4)) {
        let table = BVTable::closed_form(&space);
        let ring = table.ring().clone();
        prop_assert!(table.delta(&Element::one(&ring)).is_zero());
        let mut e = Element::zero(&ring);
        for (m, c) in words {
            e = &e + &Element::monomial(&ring, m, c);
        }
        prop_assert!(table.delta(&table.delta(&e)).is_zero());
        prop_assert!(image_is_b_free(&table, &e));
        if let (Ok(Some(d)), Ok(Some(dd))) = (e.degree(), table.delta(&e).degree()) {
            prop_assert_eq!(dd, d + 1);
        }
    }

    #[test]
    fn seven_term_identity(space in any_space(), x in any_word(), y in any_word(), z in any_word()) {
        let table = BVTable::closed_form(&space);
        let ring = table.ring();
        if [&x, &y, &z].iter().any(|m| ring.is_zero_monomial(m)) {
            return Ok(());
        }
        prop_assert!(table.seven_term_residual(&x, &y, &z).is_zero());
    }

    #[test]
    fn bracket_antisymmetry_and_leibniz(space in any_space(), m1 in any_word(), m2 in any_word(), m3 in any_word()) {
        let table = BVTable::closed_form(&space);
        let ring = table.ring().clone();
        let [x, y, z] = [m1, m2, m3].map(|m| Element::monomial(&ring, m, 1));
        if [&x, &y, &z].iter().any(|e| e.is_zero()) {
            return Ok(());
        }
        let deg = |e: &Element| e.degree().unwrap().unwrap();
        let (dx, dy) = (deg(&x), deg(&y));
        let xy = table.bracket(&x, &y).unwrap();
        let yx = table.bracket(&y, &x).unwrap();
        let s = -sign((dx + 1) * (dy + 1) % 2 != 0);
        prop_assert_eq!(xy.clone(), yx.scale(&s.into()));
        let lhs = table.bracket(&x, &(&y * &z)).unwrap();
        let s = sign((dx + 1) * dy % 2 != 0);
        let rhs = &(&xy * &z) + &(&y * &table.bracket(&x, &z).unwrap()).scale(&s.into());
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn einfty_matches_splitting_for_every_space() {
    for space in spaces().into_iter().chain([SpaceSpec::hp(6).unwrap()]) {
        let top = default_max_q(&space);
        let r = compare_einfty_vs_splitting(&space, 0..=top);
        assert!(r.passed(), "{r}");
    }
}
