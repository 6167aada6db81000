use proptest::prelude::*;
use transasym_core::linear_ode::{series_field_solve_linear, Seed, SeriesMatrix};
use transasym_core::{AnalyticGerm, TaylorSeries, C64};

fn series(order: usize) -> impl Strategy<Value = TaylorSeries> {
    prop::collection::vec((-4i32..=4, -4i32..=4), order + 1)
        .prop_map(|v| TaylorSeries::new(v.into_iter().map(|(a, b)| C64::new(a as f64, b as f64)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // small integer coefficients keep every product exact in binary floating point
    #[test]
    fn multiplication_is_associative(a in series(8), b in series(8), c in series(8)) {
        let l = a.mul_series(&b).mul_series(&c);
        let r = a.mul_series(&b.mul_series(&c));
        prop_assert_eq!(l, r);
    }

    #[test]
    fn multiplication_distributes(a in series(8), b in series(8), c in series(8)) {
        let l = a.mul_series(&b.add_series(&c));
        let r = a.mul_series(&b).add_series(&a.mul_series(&c));
        prop_assert_eq!(l, r);
    }

    #[test]
    fn mixed_orders_truncate_to_minimum(a in series(5), b in series(9)) {
        prop_assert_eq!(a.mul_series(&b).order(), 5);
        prop_assert_eq!(a.add_series(&b).order(), 5);
    }

    #[test]
    fn composition_matches_pointwise_evaluation(
        terms in prop::collection::vec((0u32..3, 0u32..3, 0u32..3, -3.0f64..3.0), 1..8),
        args in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 5), 3),
        pts in prop::collection::vec((0.0f64..0.1, 0.0f64..6.3), 20),
    ) {
        let mut g = AnalyticGerm::new(2, 12);
        for (i, k1, k2, c) in terms {
            g.add_term(i, vec![k1, k2], C64::new(c, 0.0)).unwrap();
        }
        let order = 40;
        let mk = |v: &[f64]| {
            let mut c = vec![C64::new(0.0, 0.0); order + 1];
            for (j, x) in v.iter().enumerate() {
                c[j] = C64::new(*x, 0.0);
            }
            TaylorSeries::new(c)
        };
        let z = mk(&args[0]);
        let y = [mk(&args[1]), mk(&args[2])];
        let composed = g.compose(&z, &y).unwrap();
        for (r, th) in pts {
            let xi = C64::from_polar(r, th);
            let direct = g.eval(z.eval(xi), &[y[0].eval(xi), y[1].eval(xi)]);
            let via = composed.eval(xi);
            prop_assert!((via - direct).norm() <= 1e-12 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn linear_solution_satisfies_recursion(l0 in 2.5f64..6.0, l1 in -1.0f64..1.0, r in prop::collection::vec(-1.0f64..1.0, 16)) {
        let order = 15;
        let mut m = SeriesMatrix::diagonal(&[C64::new(l0, 0.0)], order);
        m.entry_mut(0, 0).coeffs_mut()[1] = C64::new(l1, 0.0);
        let rhs = vec![TaylorSeries::from_real(&r)];
        let sol = series_field_solve_linear(&m, &rhs, &[]).unwrap();
        let f = &sol.f[0];
        let lhs = f.euler_derivative();
        let right = m.apply(&sol.f)[0].add_series(&rhs[0]);
        for k in 0..=order {
            let scale = right.coeff(k).norm().max(lhs.coeff(k).norm()).max(1.0);
            prop_assert!((lhs.coeff(k) - right.coeff(k)).norm() <= 1e-13 * scale);
        }
    }
}

#[test]
fn seeded_resonant_order() {
    // ξF' = 2F + ξ with F(ξ) = −ξ: the order-2 row is resonant and is seeded with the analytic value
    let order = 6;
    let m = SeriesMatrix::diagonal(&[C64::new(2.0, 0.0)], order);
    let mut r = vec![0.0; order + 1];
    r[1] = 1.0;
    let sol = series_field_solve_linear(&m, &[TaylorSeries::from_real(&r)], &[Seed { order: 2, component: 0, value: C64::new(0.0, 0.0) }]).unwrap();
    assert_eq!(sol.f[0].coeff(1), C64::new(-1.0, 0.0));
    for k in [0, 2, 3, 4, 5, 6] {
        assert_eq!(sol.f[0].coeff(k), C64::new(0.0, 0.0));
    }
    assert_eq!(sol.residual(2, 0), C64::new(0.0, 0.0));
}
