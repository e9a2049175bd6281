use cherw_core::homog::*;
use cherw_core::liedata::LieKind;
use cherw_core::pairings::zeta_var;
use cherw_core::pbw::PBWElement;
use cherw_core::QPoly;
use proptest::prelude::*;

fn h2() -> QPoly {
    QPoly::var(hbar()).pow(2)
}

// images written out again from the displayed formulas, independent of the map builder
fn psi0_images_n2() -> (HomogenizedAlgebra, PBWElement, PBWElement, PBWElement) {
    let t = build_homog(HomogSpec::PrimedWeyl { kind: LieKind::Gl, n_small: 1, m: 1, weyl_n: 2, invertible_z: 2 }).unwrap();
    let p = t.p();
    let zi = PBWElement::gen_pow(p.index_of("z(2)").unwrap(), -1);
    let (z1, d1, d2) = (t.gen("z(1)"), t.gen("d(1)"), t.gen("d(2)"));
    let (e11, y1, x1) = (t.gen("E(1,1)"), t.gen("Y(1)"), t.gen("X(1)"));
    let e12 = &(&p.mul(&zi, &y1) - &p.product(&[zi.clone(), z1.clone(), e11.clone()])) + &p.mul(&z1, &d2);
    let x1i = &x1 - &d1;
    let zeta = PBWElement::scalar(QPoly::var(zeta_var(0)));
    let mut x2 = -&d2;
    x2 -= &p.product(&[zi.clone(), z1.clone(), x1.clone()]);
    x2 -= &p.mul(&zi, &(&zeta + &e11));
    (t, e12, x1i, x2)
}

#[test]
fn displayed_verifications_psi0() {
    let (t, e12, x1, x2) = psi0_images_n2();
    let p = t.p();
    // [Ψ_0(e_{1,2}), Ψ_0(x_1)] = -ħ² Ψ_0(x_2)
    assert_eq!(p.commutator(&e12, &x1), x2.scale(&-h2()));
    // [Ψ_0(e_{1,2}), Ψ_0(x_2)] = 0
    assert!(p.commutator(&e12, &x2).is_zero());
    let m = build_map_psi(0, 2).unwrap();
    let s = m.source.p();
    assert_eq!(m.map.images[s.index_of("E(1,2)").unwrap()], e12);
    assert_eq!(m.map.images[s.index_of("x(1)").unwrap()], x1);
    assert_eq!(m.map.images[s.index_of("x(2)").unwrap()], x2);
}

#[test]
fn lemma_maps_preserve_relations() {
    for n in 2..=3 {
        assert!(verify_homomorphism(&build_map_psi(-1, n).unwrap()).all_pass(), "psi-1 n={}", n);
        assert!(verify_homomorphism(&build_map_psi(0, n).unwrap()).all_pass(), "psi0 n={}", n);
    }
    for n in 1..=2 {
        assert!(verify_homomorphism(&build_map_upsilon_weighted(n).unwrap()).all_pass(), "weighted n={}", n);
    }
}

#[test]
fn displayed_upsilon_fails_on_first_column() {
    // [u_11, u_21] is a nonzero multiple of u_21, while ζ_0 is central
    let m = build_map_upsilon(1).unwrap();
    let r = verify_homomorphism(&m);
    let fails: Vec<&str> = r.failures().map(|e| e.id.as_str()).collect();
    assert_eq!(fails, vec!["[U(2,1),U(1,1)]"]);
    let c = completion_suite("upsilon-1", 1);
    assert!(c.notes.iter().any(|n| n.contains("preserves every relation")));
}

#[test]
fn inverse_round_trip() {
    let r = verify_inverse_psi0(2);
    assert!(r.all_pass(), "{}", r.to_text());
    assert!(r.entries.iter().any(|e| e.id == "target zeta(0)"));
}

#[test]
fn negative_controls() {
    let bad = build_map_psi_with(0, 2, true).unwrap();
    let r = verify_homomorphism(&bad);
    assert!(!r.all_pass());
    let cand = correction_candidate(&bad).unwrap().unwrap();
    assert!(cand.contains("x(2)"), "{}", cand);
    assert!(!verify_homomorphism(&build_map_psi_with(-1, 2, true).unwrap()).all_pass());
    assert!(!verify_homomorphism(&build_map_upsilon_with(2, true).unwrap()).all_pass());
}

#[test]
fn algebras_are_rees_homogeneous() {
    let specs = [
        HomogSpec::Enveloping { kind: LieKind::Sp, n: 2 },
        HomogSpec::Cherednik { kind: LieKind::Gl, n: 2, m: 3, invertible_y: None },
        HomogSpec::Cherednik { kind: LieKind::Sp, n: 1, m: 2, invertible_y: None },
        HomogSpec::Cherednik { kind: LieKind::Gl, n: 2, m: 0, invertible_y: Some(2) },
        HomogSpec::PrimedWeyl { kind: LieKind::Sp, n_small: 1, m: 0, weyl_n: 4, invertible_z: 1 },
    ];
    for s in specs {
        let a = build_homog(s.clone()).unwrap();
        assert!(a.check_homogeneity().all_pass(), "{:?}", s);
        assert!(a.check_hbar_divisible().is_ok(), "{:?}", s);
        assert!(a.p().consistency_check(3).all_pass(), "{:?}", s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn localized_weyl_is_associative(
        w in proptest::collection::vec((0usize..4, -2i32..3), 1..4),
        v in proptest::collection::vec((0usize..4, -2i32..3), 1..4),
        u in proptest::collection::vec((0usize..4, -2i32..3), 1..4),
    ) {
        let a = build_homog(HomogSpec::Weyl { n: 2, invertible: Some(1) }).unwrap();
        let p = a.p();
        // generator 0 is z(1), the only one allowed negative powers
        let word = |w: &Vec<(usize, i32)>| {
            let mut e = PBWElement::one();
            for &(g, k) in w {
                let k = if g == 0 { k } else { k.abs() };
                if k == 0 {
                    continue;
                }
                e = p.mul(&e, &PBWElement::gen_pow(g, k));
            }
            e
        };
        let (x, y, z) = (word(&w), word(&v), word(&u));
        prop_assert_eq!(p.mul(&p.mul(&x, &y), &z), p.mul(&x, &p.mul(&y, &z)));
        let zi = PBWElement::gen_pow(0, -1);
        let z1 = PBWElement::gen(0);
        prop_assert_eq!(p.mul(&zi, &z1), PBWElement::one());
        prop_assert_eq!(p.mul(&z1, &zi), PBWElement::one());
    }
}
