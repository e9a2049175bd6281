use cherw_core::centers::{solve_fgw, gl_param};
use cherw_core::cherednik::{build_universal, build_with_param, Corruption};
use cherw_core::exact::{frac, int, scalar_to_string, parse_scalar, series_invert, solve_linear, Monomial, Var};
use cherw_core::liedata::{build_lie, centralizer_basis, centralizer_dim_bruteforce, is_sp_member, LieKind};
use cherw_core::pairings::{compute_pairings, zeta_var, DeformationParam};
use cherw_core::pbw::{enveloping, PBWElement, PBWPresentation};
use cherw_core::poisson::build_context;
use cherw_core::{QPoly, QSeries, Scalar};
use proptest::prelude::*;

fn vars() -> Vec<Var> {
    ["a", "b", "c"].iter().map(|s| Var::new(s)).collect()
}

fn poly_strategy() -> impl Strategy<Value = QPoly> {
    proptest::collection::vec((-4i64..5, 1i64..4, 0u32..3, 0u32..3, 0u32..2), 0..5).prop_map(|ts| {
        let v = vars();
        QPoly::from_terms(ts.into_iter().map(|(p, q, i, j, k)| {
            (Monomial::from_pairs(vec![(v[0], i), (v[1], j), (v[2], k)].into_iter().filter(|x| x.1 > 0).collect()), frac(p, q))
        }))
    })
}

fn word_strategy(ngen: usize) -> impl Strategy<Value = Vec<(usize, i64)>> {
    proptest::collection::vec((0..ngen, -3i64..4), 1..4)
}

fn element(p: &PBWPresentation, w: &[(usize, i64)]) -> PBWElement {
    let mut e = PBWElement::constant(int(1));
    for &(g, c) in w {
        let f = &PBWElement::gen(g) + &PBWElement::constant(int(c));
        e = p.mul(&e, &f);
    }
    e
}

fn presentations() -> Vec<PBWPresentation> {
    vec![
        enveloping(&build_lie(LieKind::Gl, 2).unwrap()),
        enveloping(&build_lie(LieKind::Sp, 2).unwrap()),
        build_universal(LieKind::Gl, 1, 2).unwrap().presentation,
        build_universal(LieKind::Sp, 1, 1).unwrap().presentation,
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn poly_ring_axioms(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a - &a, QPoly::new());
    }

    #[test]
    fn series_inverse(c0 in 1i64..5, tail in proptest::collection::vec(-5i64..6, 0..6), order in 1i32..8) {
        let t = Var::new("t");
        let mut s = QSeries::monomial(t, order, 0, QPoly::constant(int(c0)));
        for (k, c) in tail.iter().enumerate() {
            s.add_coeff(k as i32 + 1, QPoly::constant(int(*c)));
        }
        let inv = series_invert(&s).unwrap();
        prop_assert_eq!(inv.mul(&s), QSeries::one(t, order));
    }

    #[test]
    fn linear_solve_residual(rows in proptest::collection::vec(proptest::collection::vec(-5i64..6, 3), 3), b in proptest::collection::vec(-5i64..6, 3)) {
        let a: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|x| int(*x)).collect()).collect();
        let b: Vec<Scalar> = b.iter().map(|x| int(*x)).collect();
        if let Ok(x) = solve_linear(&a, &b) {
            for (row, bi) in a.iter().zip(&b) {
                let lhs: Scalar = row.iter().zip(&x).map(|(r, xi)| r * xi).sum();
                prop_assert_eq!(&lhs, bi);
            }
        }
    }

    #[test]
    fn scalar_canonical_form(p in -50i64..50, q in 1i64..50, k in 1i64..9) {
        let s = frac(p * k, q * k);
        prop_assert_eq!(&s, &frac(p, q));
        let text = scalar_to_string(&s);
        prop_assert_eq!(parse_scalar(&text), Some(s.clone()));
        let (num, den) = text.split_once('/').unwrap();
        let (num, den): (i64, i64) = (num.parse().unwrap(), den.parse().unwrap());
        prop_assert!(den > 0);
        prop_assert_eq!(num_integer::gcd(num, den), 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pbw_associative_and_filtered(which in 0usize..4, u in word_strategy(64), v in word_strategy(64), w in word_strategy(64)) {
        let p = &presentations()[which];
        let ng = p.num_generators();
        let pick = |w: &[(usize, i64)]| -> Vec<(usize, i64)> { w.iter().map(|&(g, c)| (g % ng, c)).collect() };
        let (a, b, c) = (element(p, &pick(&u)), element(p, &pick(&v)), element(p, &pick(&w)));
        prop_assert_eq!(p.mul(&p.mul(&a, &b), &c), p.mul(&a, &p.mul(&b, &c)));
        let ab = p.mul(&a, &b);
        let (da, db) = (p.filtration_degree(&a), p.filtration_degree(&b));
        if let (Some(da), Some(db)) = (da, db) {
            prop_assert!(p.filtration_degree(&ab).map_or(true, |d| d <= da + db));
            let sv: Vec<Var> = p.labels().iter().map(|l| Var::new(l)).collect();
            let top = p.to_commutative(&p.top_part(&ab), &sv);
            let prod = &p.to_commutative(&p.top_part(&a), &sv) * &p.to_commutative(&p.top_part(&b), &sv);
            if p.filtration_degree(&ab) == Some(da + db) {
                prop_assert_eq!(top, prod);
            } else {
                prop_assert_eq!(prod, QPoly::new());
            }
        }
    }

    #[test]
    fn specialization_commutes_with_building(c0 in -3i64..4, c1 in -3i64..4, d in 1i64..3) {
        let h = build_universal(LieKind::Gl, 1, 3).unwrap();
        let cs = vec![frac(c0, d), frac(c1, d)];
        let direct = build_with_param(LieKind::Gl, 1, 3, &gl_param(1, 3, &[cs[0].clone(), cs[1].clone(), int(0)]).unwrap(), Corruption::None).unwrap();
        let spec = h.specialize(&cs).unwrap();
        prop_assert_eq!(spec.presentation.labels(), direct.presentation.labels());
        let ng = spec.presentation.num_generators();
        for a in 0..ng {
            for b in (a + 1)..ng {
                prop_assert_eq!(spec.presentation.table_commutator(a, b), direct.presentation.table_commutator(a, b));
            }
        }
    }

    #[test]
    fn poisson_bracket_laws(kind in prop_oneof![Just(LieKind::Gl), Just(LieKind::Sp)], i in 0usize..40, j in 0usize..40, k in 0usize..40) {
        let ctx = build_context(kind, 1, 1).unwrap();
        let nv = ctx.vars.len();
        let (f, g, h) = (QPoly::var(ctx.vars[i % nv]), QPoly::var(ctx.vars[j % nv]), QPoly::var(ctx.vars[k % nv]));
        let gh = &g * &h;
        prop_assert_eq!(ctx.bracket(&f, &g), -&ctx.bracket(&g, &f));
        prop_assert_eq!(ctx.bracket(&f, &gh), &(&ctx.bracket(&f, &g) * &h) + &(&g * &ctx.bracket(&f, &h)));
        let fg = &f + &gh;
        prop_assert_eq!(ctx.bracket(&fg, &fg), QPoly::new());
    }

    #[test]
    fn fgw_resubstitution(n in 1usize..=3, m in 1usize..=4, c in proptest::collection::vec(-3i64..4, 4)) {
        let coeffs: Vec<Scalar> = c.iter().take(m).map(|x| int(*x)).collect();
        let zeta = gl_param(n, m, &coeffs).unwrap();
        let t = solve_fgw(n, m, &zeta).unwrap();
        prop_assert!(t.resubstitute().is_ok());
    }
}

#[test]
fn jacobi_holds_on_generators() {
    for kind in [LieKind::Gl, LieKind::Sp] {
        for n in 1..=3 {
            for m in 0..=2 {
                let ctx = build_context(kind, n, m).unwrap();
                assert_eq!(ctx.check_jacobi(), Ok(()), "{} n={} m={}", kind, n, m);
            }
        }
    }
    assert_eq!(build_context(LieKind::Gl, 4, 1).unwrap().check_jacobi(), Ok(()));
}

#[test]
fn sp_basis_is_closed() {
    for n in 1..=3 {
        let lie = build_lie(LieKind::Sp, n).unwrap();
        for a in 0..lie.dim() {
            assert!(is_sp_member(lie.mat(a)));
            for b in 0..lie.dim() {
                assert!(is_sp_member(&lie.mat(a).commutator(lie.mat(b))));
            }
        }
    }
}

#[test]
fn centralizer_dimension_matches_bruteforce() {
    for (kind, n, m) in [(LieKind::Sl, 1, 2), (LieKind::Sl, 2, 2), (LieKind::Sl, 1, 3), (LieKind::Sl, 2, 3), (LieKind::Sp, 1, 1), (LieKind::Sp, 2, 1), (LieKind::Sp, 1, 2)] {
        assert_eq!(centralizer_basis(kind, n, m).unwrap().dim(), centralizer_dim_bruteforce(kind, n, m).unwrap(), "{} {} {}", kind, n, m);
    }
}

#[test]
fn pairing_degrees() {
    for (kind, n, scale) in [(LieKind::Gl, 2, 1), (LieKind::Sp, 1, 2)] {
        let t = compute_pairings(kind, n, 3).unwrap();
        for (&(j, _, _), v) in t.entries() {
            if *v != QPoly::new() {
                assert!(v.is_homogeneous());
                assert_eq!(v.total_degree(), Some((scale * j) as u32), "{} j={}", kind, j);
            }
        }
    }
}

#[test]
fn universal_parameter_shape() {
    let z = DeformationParam::universal(LieKind::Gl, 2, 3);
    assert_eq!(z.coeff(3), QPoly::constant(int(1)));
    assert_eq!(z.coeff(2), QPoly::new());
    assert_eq!(z.coeff(0), QPoly::var(zeta_var(0)));
}
