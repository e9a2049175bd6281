use cherw_core::centers::*;
use cherw_core::exact::{frac, int, Scalar};
use cherw_core::liedata::{build_lie, LieKind};
use cherw_core::pbw::enveloping;
use proptest::prelude::*;

fn p_at(n: usize, m: usize, zeta: &[Scalar], lambda: &[Scalar]) -> Scalar {
    let p = p_polynomial(&solve_fgw(n, m, &gl_param(n, m, zeta).unwrap()).unwrap());
    p.eval(&|v| (1..=n).find(|&i| lambda_var(i) == v).map(|i| lambda[i - 1].clone()).unwrap_or_else(|| int(0)))
}

#[test]
fn classify_oracle_values() {
    // P(λ) = λ² + λ for ζ(z) = z
    assert_eq!(p_at(1, 1, &[int(0)], &[int(1)]), int(2));
    assert_eq!(p_at(1, 1, &[int(0)], &[int(-2)]), int(2));
    let c = classify_findim(1, 1, &[int(0)], &[int(1)]).unwrap().unwrap();
    assert_eq!(c.k, 3);
    assert_eq!(c.roots.rational.len() + c.roots.residual.len().saturating_sub(1), 1);
}

#[test]
fn hc_multiplicative_on_products() {
    let lie = build_lie(LieKind::Gl, 2).unwrap();
    let u = enveloping(&lie);
    let hs: Vec<_> = (1..=3).map(|j| h_element(&lie, &u, j).unwrap()).collect();
    for a in 0..2 {
        for b in a..2 {
            let prod = u.mul(&hs[a], &hs[b]);
            let lhs = hc_project(&lie, &u, &prod).unwrap();
            let rhs = &hc_project(&lie, &u, &hs[a]).unwrap() * &hc_project(&lie, &u, &hs[b]).unwrap();
            assert_eq!(lhs, rhs, "H_{} H_{}", a + 1, b + 1);
        }
    }
}

#[test]
fn v_l_top_coefficient() {
    // l = m leaves only S_0 with coefficient 1
    assert_eq!(v_l_coefficients(2, 3, 3, &frac(5, 2)), vec![(0, int(1))]);
    let c = v_l_coefficients(1, 2, 0, &int(2));
    // s² binom(3,2), s binom(2,1), binom(1,0)
    assert_eq!(c, vec![(0, int(12)), (1, int(4)), (2, int(1))]);
}

fn instance() -> impl Strategy<Value = (usize, usize, Vec<Scalar>, Vec<Scalar>, u64)> {
    (1usize..=2, 1usize..=2, -6i64..6, 1i64..4, proptest::collection::vec(1i64..4, 1), 1u64..5, -3i64..3).prop_map(
        |(n, m, num, den, gaps, k, z1)| {
            let top = frac(num, den);
            let mut lambda = vec![top.clone()];
            for i in 1..n {
                let next = &lambda[i - 1] - int(gaps[0] + i as i64 - 1);
                lambda.push(next);
            }
            let mut zeta = vec![int(0); m];
            if m > 1 {
                zeta[1] = int(z1);
            }
            (n, m, zeta, lambda, k)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]
    // ζ_0 is tuned so that λ_n - k is a root; P is affine in ζ_0
    #[test]
    fn bijection_round_trip((n, m, mut zeta, lambda, k) in instance()) {
        let mut shifted = lambda.clone();
        shifted[n - 1] -= Scalar::from_integer(k.into());
        let diff = |z0: i64| {
            let mut z = zeta.clone();
            z[0] = int(z0);
            p_at(n, m, &z, &lambda) - p_at(n, m, &z, &shifted)
        };
        let (d0, d1, d2) = (diff(0), diff(1), diff(2));
        prop_assert_eq!(&d2 - &d1, &d1 - &d0);
        prop_assume!(d1 != d0);
        zeta[0] = -&d0 / (&d1 - &d0);
        let class = classify_findim(n, m, &zeta, &lambda).unwrap().expect("a root was planted");
        prop_assert!(class.k <= k);
        prop_assert_eq!(class.nu.len() - n + class.roots.residual.len().saturating_sub(1), m);
        prop_assert_eq!(nu_to_lambda(n, m, &zeta, &class).unwrap(), lambda);
    }
}
