use transasym_core::normal_form::NormalSystem;
use transasym_core::singularities::{P1_H1_NUMERATOR, P1_H2_NUMERATOR};
use transasym_core::transasymptotics::*;
use transasym_core::{builtin, AnalyticGerm, Error, TaylorSeries, C64};

fn r(v: f64) -> C64 {
    C64::new(v, 0.0)
}

/// Taylor series of `N(ξ)/(ξ − 12)^p`, `N` given from its `ξ¹` coefficient.
fn rational(num_from_one: &[f64], p: u32, order: usize) -> TaylorSeries {
    let mut n = vec![r(0.0); order + 1];
    for (j, c) in num_from_one.iter().enumerate() {
        n[j + 1] = r(*c);
    }
    let mut d = vec![r(0.0); order + 1];
    d[0] = r(-12.0);
    d[1] = r(1.0);
    TaylorSeries::new(n).div_series(&TaylorSeries::new(d).powi(p)).unwrap()
}

fn assert_rel(a: &TaylorSeries, b: &TaylorSeries, count: usize, tol: f64) {
    for k in 0..count {
        let (x, y) = (a.coeff(k), b.coeff(k));
        let scale = y.norm();
        if scale == 0.0 {
            assert!(x.norm() < 1e-13, "k={k}: {x} vs 0");
        } else {
            assert!((x - y).norm() <= tol * scale, "k={k}: {x} vs {y}");
        }
    }
}

#[test]
fn p1_levels_match_closed_forms() {
    let (s, _) = builtin("p1").unwrap();
    let e = build_expansion(&s, 2, 32).unwrap();
    let h0 = rational(&[144.0], 2, 32);
    let h1 = rational(&P1_H1_NUMERATOR, 3, 32);
    let h2 = rational(&P1_H2_NUMERATOR, 4, 32);
    assert_rel(&e.observable(0), &h0, 15, 1e-10);
    assert_rel(&e.observable(1), &h1, 15, 1e-10);
    assert_rel(&e.observable(2), &h2, 15, 1e-10);
}

#[test]
fn residual_is_beyond_truncation() {
    for label in ["p1", "abel", "p2a:0.5"] {
        let (s, _) = builtin(label).unwrap();
        let e = build_expansion(&s, 4, 24).unwrap();
        let res = expansion_residual(&e).unwrap();
        assert!(res <= 1e-12, "{label}: {res}");
    }
}

#[test]
fn delayed_constants_are_stable_under_extension() {
    let (s, _) = builtin("p1").unwrap();
    let a = build_expansion(&s, 4, 32).unwrap();
    let b = build_expansion(&s, 7, 32).unwrap();
    for m in 0..3 {
        let (x, y) = (a.free_constants[m], b.free_constants[m]);
        assert!((x - y).norm() <= 1e-12 * y.norm().max(1.0), "c{}: {x} vs {y}", m + 1);
    }
}

#[test]
fn gevrey_envelope_holds() {
    let (s, _) = builtin("p1").unwrap();
    let e = build_expansion(&s, 8, 64).unwrap();
    let g = gevrey_fit(&e, 6.0);
    assert!((g.sup_norms[0] - 24.0).abs() < 1e-9, "{}", g.sup_norms[0]);
    assert!(g.is_valid());
    for (m, s) in g.sup_norms.iter().enumerate() {
        assert!(*s <= g.envelope(m));
    }
}

#[test]
fn single_level_fit_is_trivially_valid() {
    let (s, _) = builtin("p1").unwrap();
    let e = build_expansion(&s, 0, 16).unwrap();
    let g = gevrey_fit(&e, 6.0);
    assert!(g.b_g.is_finite() && g.is_valid());
}

#[test]
fn formal_series_agrees_with_level_origins() {
    for label in ["p1", "abel"] {
        let (s, _) = builtin(label).unwrap();
        let e = build_expansion(&s, 6, 16).unwrap();
        let y = formal_power_series(&s, 6).unwrap();
        for m in 2..=6 {
            for (j, yj) in y.iter().enumerate() {
                assert!((e.at_origin(m)[j] - yj.coeff(m)).norm() < 1e-13, "{label} m={m}");
            }
        }
    }
}

#[test]
fn linear_system_has_trivial_levels() {
    let s = NormalSystem::with_first_component("lin", vec![r(1.0)], vec![r(0.0)], vec![AnalyticGerm::zero(1)]).unwrap();
    let e = build_expansion(&s, 3, 10).unwrap();
    assert_eq!(e.fm[0][0].coeff(1), r(1.0));
    for k in (0..=10).filter(|k| *k != 1) {
        assert_eq!(e.fm[0][0].coeff(k), r(0.0));
    }
    for m in 1..=3 {
        assert!(e.fm[m][0].is_zero());
    }
}

#[test]
fn evaluation_guards() {
    let (s, _) = builtin("p1").unwrap();
    let e = build_expansion(&s, 2, 32).unwrap();
    let c = r(12.0);
    assert!(matches!(eval_two_scale(&e, c, r(0.5), None), Err(Error::InvalidInput(_))));
    // |ξ| > radius: e^{-x} large on the left half-plane
    assert!(matches!(eval_two_scale(&e, c, r(-3.0), None), Err(Error::ScalePastBranch { .. })));
    // |ξ| = 12 e^{-Re x}|x|^{-1/2} = 11 sits between the two radii
    let x = C64::new((12.0f64 / 11.0 / 30.0f64.sqrt()).ln(), 30.0);
    let xa = e.xi(c, x).norm();
    assert!(xa < e.radius && xa > e.reliable_radius());
    assert!(matches!(eval_two_scale(&e, c, x, None), Err(Error::OutsideReliableDisk { .. })));
    let v = eval_two_scale(&e, c, C64::new(10.0, 30.0), Some(1)).unwrap();
    assert_eq!(v.m_star, 1);
    assert!(v.error_bound.is_finite());
}

#[test]
fn least_term_examples() {
    assert_eq!(least_term_index(1.0, 10.0, 100), 10);
    assert_eq!(least_term_index(2.0, 10.0, 100), 5);
    assert_eq!(least_term_index(1.0, 1e9, 3), 3);
}

#[test]
fn h0_value_at_six() {
    let (s, _) = builtin("p1").unwrap();
    let e = build_expansion(&s, 2, 64).unwrap();
    assert!((e.observable(0).eval(r(6.0)) - r(24.0)).norm() < 1e-12);
}
