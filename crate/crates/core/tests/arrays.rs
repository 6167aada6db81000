use std::f64::consts::PI;

use proptest::prelude::*;
use transasym_core::singularities::*;
use transasym_core::transasymptotics::{build_expansion, solve_f0};
use transasym_core::{builtin, Error, C64};

fn r(v: f64) -> C64 {
    C64::new(v, 0.0)
}

#[test]
fn refined_entries_solve_the_level_set() {
    let a = predict_array(r(12.0), r(12.0), r(-0.5), (1, 40)).unwrap();
    assert_eq!(a.entries.len(), 40);
    for e in &a.entries {
        assert!(e.x_refined.is_some(), "n={}", e.n);
        assert!(e.residual <= 1e-10, "n={} residual {}", e.n, e.residual);
    }
}

#[test]
fn array_is_nearly_periodic() {
    let a = predict_array(r(12.0), r(12.0), r(-0.5), (20, 60)).unwrap();
    for w in a.entries.windows(2) {
        let step = w[1].x_refined.unwrap() - w[0].x_refined.unwrap();
        let bound = 2.0 * 0.5 / w[0].n as f64;
        assert!((step - C64::new(0.0, 2.0 * PI)).norm() <= bound, "n={}", w[0].n);
    }
}

#[test]
fn zero_constant_is_rejected() {
    assert!(matches!(predict_array(r(12.0), r(0.0), r(-0.5), (1, 3)), Err(Error::ZeroC)));
}

proptest! {
    #[test]
    fn shifting_n_translates_the_asymptote(n in 1i64..200, re in 0.5f64..20.0, im in -5.0f64..5.0) {
        let c = C64::new(re, im);
        let a = array_asymptote(r(12.0), c, r(-0.5), n);
        let b = array_asymptote(r(12.0), c, r(-0.5), n + 1);
        let expect = C64::new(0.0, 2.0 * PI) - 0.5 * (((n + 1) as f64) / n as f64).ln();
        prop_assert!((b - a - expect).norm() < 1e-9);
    }
}

#[test]
fn abel_lattice_closes() {
    let g = AbelGeometry::default();
    let q = (PI * 3f64.sqrt()).exp();
    for p1 in -2..=2 {
        for p2 in -2..=2 {
            let ratio = g.xi(p1, p2 + 1) / g.xi(p1, p2);
            assert!((ratio - q).abs() <= 1e-12 * q);
        }
    }
}

#[test]
fn abel_branch_point_square_root_monodromy() {
    // two turns around ξ₀ return F₀ to its start value; one turn does not
    let (s, _) = builtin("abel").unwrap();
    let xi0 = AbelGeometry::default().xi0;
    let rho = 0.03;
    let mut path = vec![r(0.05), r(xi0 - rho)];
    for turn in 0..2 {
        for k in 1..=64 {
            let th = PI + 2.0 * PI * (turn * 64 + k) as f64 / 64.0;
            path.push(r(xi0) + C64::from_polar(rho, th));
        }
    }
    let t = continue_f0(&s, &path, &ContinuationOptions::default()).unwrap();
    let at = |x: C64| t.samples.iter().filter(|p| (p.x - x).norm() < 1e-12).map(|p| p.y[0]).collect::<Vec<_>>();
    let visits = at(r(xi0 - rho));
    assert!(visits.len() >= 3);
    let (start, once, twice) = (visits[0], visits[1], visits[visits.len() - 1]);
    assert!((once - start).norm() > 1e-2 * start.norm());
    assert!((twice - start).norm() <= 1e-6 * start.norm(), "{twice} vs {start}");
}

#[test]
fn abel_taylor_radius() {
    let (s, _) = builtin("abel").unwrap();
    let f0 = solve_f0(&s, 200).unwrap();
    let est = radius_estimate(&f0[0]).unwrap();
    assert!((est.radius - AbelGeometry::default().xi0).abs() < 1e-3);
    assert!((est.exponent + 0.5).abs() < 0.05);
}

#[test]
fn every_p1_level_sees_the_pole_at_twelve() {
    let (s, _) = builtin("p1").unwrap();
    let e = build_expansion(&s, 8, 64).unwrap();
    for m in 0..=8 {
        let est = radius_estimate(&e.observable(m)).unwrap();
        assert!((est.radius - 12.0).abs() <= 0.1, "m={m}: {}", est.radius);
    }
}

#[test]
fn pole_shift_matches_closed_form() {
    let (s, _) = builtin("p1").unwrap();
    let e = build_expansion(&s, 2, 32).unwrap();
    let a = pole_shift(&e).unwrap();
    assert!((a - r(P1_POLE_SHIFT)).norm() <= 1e-6);
}

#[test]
fn abel_implicit_relation_inverts() {
    for xi in [C64::new(0.05, 0.02), C64::new(0.12, -0.07), C64::new(-0.3, 0.1)] {
        let f = f0_of_xi(xi, (0, 0)).unwrap();
        assert!((xi_of_f0(f, (0, 0)) - xi).norm() < 1e-12);
    }
    assert!(matches!(f0_of_xi(r(0.1), (1, 0)), Err(Error::SheetUnreachable)));
}

#[test]
fn second_array_offset_oracle() {
    let xs = C64::new(-2.0, 50.0);
    let v = p1_oracle(P1Oracle::SecondArrayOffset { x_s: xs, n: 0 }).unwrap();
    assert!((v - (-xs.ln() + C64::new(-(60f64).ln(), PI))).norm() < 1e-14);
}
