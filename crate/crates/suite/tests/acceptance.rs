//! One line per acceptance criterion; exits nonzero when any fails.

use std::process::ExitCode;
use std::time::Instant;

use transasym_core::experiments::*;
use transasym_core::singularities::{AbelGeometry, P1_POLE_SHIFT};
use transasym_core::validator::PoleKind;
use transasym_core::{Result, C64};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn c1() -> Result<Outcome> {
    let t = Instant::now();
    let d = p1_level_match(32)?;
    let secs = t.elapsed().as_secs_f64();
    let worst = d.iter().cloned().fold(0.0, f64::max);
    outcome(worst <= 1e-10 && secs < 5.0, format!("max rel dev F0..F2 {worst:.2e}, {secs:.2}s"))
}

fn c2() -> Result<Outcome> {
    let a = p1_pole_shift(32)?;
    let err = (a - C64::new(P1_POLE_SHIFT, 0.0)).norm();
    outcome(err <= 1e-6, format!("A = {:.9}{:+.1e}i, |A - 10.9| = {err:.2e}", a.re, a.im))
}

fn c3() -> Result<Outcome> {
    let [a, b] = p2_level_match(32)?;
    outcome(a <= 1e-10 && b <= 1e-10, format!("p2a {a:.2e}, p2b {b:.2e}"))
}

fn c4() -> Result<Outcome> {
    let t = Instant::now();
    let est = abel_radius(200)?;
    let secs = t.elapsed().as_secs_f64();
    let target = abel_xi0_closed_form();
    let dr = (est.radius - target).abs();
    let de = (est.exponent + 0.5).abs();
    outcome(
        dr <= 1e-3 && de <= 0.05 && secs < 10.0,
        format!(
            "radius {:.7} (closed form {target:.7}, printed 0.233136, xi0 {:.7}), exponent {:.4}, {secs:.2}s",
            est.radius,
            AbelGeometry::default().xi0,
            est.exponent
        ),
    )
}

struct Shared {
    poles: PoleValidation,
    secs: f64,
}

fn c5(s: &Shared) -> Result<Outcome> {
    let r = &s.poles.report;
    let all = r.unmatched_predicted.is_empty() && r.unmatched_observed.is_empty() && r.pairs.len() == 13;
    outcome(
        all && r.max_delta <= 0.15 && r.nonincreasing && s.secs < 120.0,
        format!(
            "{} matched, max|d| {:.4}, last |d| {:.4}, nonincreasing {}, {:.2}s",
            r.pairs.len(),
            r.max_delta,
            r.pairs.last().map_or(f64::NAN, |p| p.delta),
            r.nonincreasing,
            s.secs
        ),
    )
}

fn c6(s: &Shared) -> Result<Outcome> {
    let p1_ok = s.poles.observations.iter().all(|o| {
        o.kind == PoleKind::DoublePole
            && (o.local_fit.exponent + 2.0).abs() <= 0.05
            && (o.local_fit.amplitude - C64::new(12.0, 0.0)).norm() <= 0.5
    });
    let worst_p1 = s.poles.observations.iter().map(|o| (o.local_fit.exponent + 2.0).abs()).fold(0.0, f64::max);
    let abel = abel_branch_points((3, 5))?;
    let abel_ok = abel.iter().all(|b| (b.observation.local_fit.exponent + 0.5).abs() <= 0.02 && b.monodromy.two_loops <= 1e-4);
    let worst_e = abel.iter().map(|b| (b.observation.local_fit.exponent + 0.5).abs()).fold(0.0, f64::max);
    let worst_m = abel.iter().map(|b| b.monodromy.two_loops).fold(0.0, f64::max);
    outcome(
        p1_ok && abel_ok,
        format!("p1 max|p+2| {worst_p1:.2e}; abel max|p+1/2| {worst_e:.2e}, two-loop {worst_m:.1e}"),
    )
}

fn c7(e: &transasym_core::transasymptotics::TwoScaleExpansion) -> Result<Outcome> {
    let rt = p1_constant_round_trip(e, C64::new(12.0, 0.0))?;
    let rel = |c: C64| (c - rt.c).norm() / rt.c.norm();
    let (a, b) = (&rt.first, &rt.second);
    let agree = (a.c - b.c).norm();
    outcome(
        rel(a.c) <= 1e-3 && rel(b.c) <= 1e-3 && agree <= a.uncertainty + b.uncertainty,
        format!(
            "pi/4 rel {:.1e}, pi/3 rel {:.1e}, |C1 - C2| {agree:.1e} vs {:.1e}",
            rel(a.c),
            rel(b.c),
            a.uncertainty + b.uncertainty
        ),
    )
}

fn c8() -> Result<Outcome> {
    let g = p1_gevrey(8, 6.0)?;
    outcome(
        g.is_valid() && g.r_squared >= 0.98,
        format!("envelope {}, K_g {:.3}, B_g {:.4}, R^2 {:.4}", g.is_valid(), g.k_g, g.b_g, g.r_squared),
    )
}

fn c9() -> Result<Outcome> {
    let a = array_convergence(C64::new(12.0, 0.0), C64::new(12.0, 0.0), C64::new(-0.5, 0.0), 10, 40)?;
    outcome(
        a.shift_hi <= 0.5 * a.shift_lo && a.max_residual <= 1e-10,
        format!("shift n=10 {:.3e}, n=40 {:.3e}, max residual {:.1e}", a.shift_lo, a.shift_hi, a.max_residual),
    )
}

fn c10(e: &transasym_core::transasymptotics::TwoScaleExpansion, s: &Shared) -> Result<Outcome> {
    let first: Vec<C64> = s.poles.report.pairs.iter().filter(|p| (10..=12).contains(&p.n)).map(|p| p.observed).collect();
    let checks = second_array(e, C64::new(12.0, 0.0), &first, &[0, -1])?;
    let good = checks.iter().filter(|c| c.delta <= 0.3).count();
    let deltas: Vec<String> = checks.iter().map(|c| format!("{:.3}", c.delta)).collect();
    outcome(good >= 2, format!("{good}/{} within 0.3, |d| = [{}]", checks.len(), deltas.join(", ")))
}

fn main() -> ExitCode {
    let e = p1_expansion().expect("p1 expansion");
    let t = Instant::now();
    let shared = p1_pole_validation(&e, (8, 20)).map(|poles| Shared { poles, secs: t.elapsed().as_secs_f64() });
    let run = |k: usize| -> Result<Outcome> {
        let s = shared.as_ref().map_err(|e| e.clone())?;
        match k {
            1 => c1(),
            2 => c2(),
            3 => c3(),
            4 => c4(),
            5 => c5(s),
            6 => c6(s),
            7 => c7(&e),
            8 => c8(),
            9 => c9(),
            _ => c10(&e, s),
        }
    };
    let mut failed = 0;
    for k in 1..=10 {
        let (pass, detail) = match run(k) {
            Ok(o) => (o.pass, o.detail),
            Err(err) => (false, format!("error: {err}")),
        };
        if !pass {
            failed += 1;
        }
        println!("criterion {k:>2}: {} {detail}", if pass { "PASS" } else { "FAIL" });
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
