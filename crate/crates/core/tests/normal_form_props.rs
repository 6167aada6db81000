use proptest::prelude::*;
use transasym_core::normal_form::{MapPoint, NormalSystem};
use transasym_core::{builtin, stokes_directions, validate_system, AnalyticGerm, C64};

const LABELS: [&str; 4] = ["abel", "p1", "p2a:0.5", "p2b:0.3"];

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn maps_round_trip(which in 0usize..4, r in 0.5f64..6.0, th in -3.1f64..3.1, a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in -2.0f64..2.0) {
        let (s, m) = builtin(LABELS[which]).unwrap();
        let t = C64::from_polar(r, th);
        prop_assume!(m.in_test_domain(t));
        let y: Vec<C64> = [C64::new(a, b), C64::new(c, d)].into_iter().take(s.n()).collect();
        let p = MapPoint::new(t, y);
        let back = m.inverse(&m.forward(&p).unwrap()).unwrap();
        prop_assert!(rel(back.t, p.t) <= 1e-12);
        for (u, v) in back.y.iter().zip(&p.y) {
            prop_assert!((u - v).norm() <= 1e-12 * (1.0 + v.norm()));
        }
    }

    #[test]
    fn stokes_set_ignores_lambda_order(l in prop::collection::vec((-3i32..=3, -3i32..=3), 3), perm in 0usize..6) {
        let lam: Vec<C64> = l.iter().map(|&(a, b)| C64::new(a as f64, b as f64)).collect();
        prop_assume!(lam.iter().all(|v| v.norm() > 0.0));
        let order = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]][perm];
        let mk = |lam: Vec<C64>| {
            NormalSystem::with_first_component("t", lam, vec![C64::new(0.0, 0.0); 3], vec![AnalyticGerm::zero(3); 3]).unwrap()
        };
        let a = stokes_directions(&mk(lam.clone()), 2);
        let b = stokes_directions(&mk(order.iter().map(|&i| lam[i]).collect()), 2);
        let contains = |xs: &[C64], v: C64| xs.iter().any(|w| (w - v).norm() < 1e-12);
        let (va, vb) = (a.values(), b.values());
        prop_assert_eq!(va.len(), vb.len());
        prop_assert!(va.iter().all(|v| contains(&vb, *v)));
        prop_assert_eq!(a.stokes.len(), b.stokes.len());
        prop_assert!(a.stokes.iter().zip(&b.stokes).all(|(x, y)| (x - y).abs() < 1e-12));
        prop_assert!(a.antistokes.iter().zip(&b.antistokes).all(|(x, y)| (x - y).abs() < 1e-12));
    }
}

#[test]
fn builtins_satisfy_order_condition() {
    for label in LABELS {
        let (s, _) = builtin(label).unwrap();
        let report = validate_system(&s, 3);
        assert!(report.order_violations.is_empty(), "{label}: {:?}", report.order_violations);
        assert!(report.zero_lambdas.is_empty());
    }
}

#[test]
fn two_exponential_lattice() {
    let s = NormalSystem::with_first_component(
        "pm",
        vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)],
        vec![C64::new(0.0, 0.0); 2],
        vec![AnalyticGerm::zero(2); 2],
    )
    .unwrap();
    // λ_j − k·λ over |k| ≤ 2: k = (0,1) already gives 1 − (−1) = 2
    let d = stokes_directions(&s, 2);
    let mut re: Vec<f64> = d.values().iter().map(|v| v.re).collect();
    re.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(re, vec![-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]);
    assert!(d.values().iter().all(|v| v.im == 0.0));
    let k0 = stokes_directions(&s, 0).values();
    assert_eq!(k0.len(), 2);
}

#[test]
fn p1_rhs_matches_second_order_form() {
    // on the diagonal state h = v₁ + v₂, h' = v₂ − v₁ and h'' = −h'/x + h + h²/2 + 392/(625 x⁴)
    let (s, _) = builtin("p1").unwrap();
    let x = C64::new(3.0, 4.0);
    let v = [C64::new(0.1, 0.02), C64::new(-0.03, 0.05)];
    let d = s.rhs_vec(x, &v);
    let (h, hp) = (v[0] + v[1], v[1] - v[0]);
    let hpp = d[1] - d[0];
    let expect = -hp / x + h + h * h * 0.5 + x.powi(-4) * (392.0 / 625.0);
    assert!((hpp - expect).norm() < 1e-14);
    assert!((d[0] + d[1] - hp).norm() < 1e-14);
}
