//! Reference computations on the builtin examples: closed-form matches,
//! pole validation runs, constant extraction and Gevrey statistics.
//!
//! Each function returns raw numbers; judging them is left to the caller.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Result;
use crate::normal_form::builtin;
use crate::series::TaylorSeries;
use crate::singularities::{
    pole_shift, predict_array, radius_estimate, AbelGeometry, RadiusEstimate, SingularityArray, P1_H1_NUMERATOR,
    P1_H2_NUMERATOR,
};
use crate::transasymptotics::{build_expansion, gevrey_fit, observe_series, solve_f0, GevreyFit, TwoScaleExpansion};
use crate::validator::{
    compare_arrays, extract_c, formal_for, loop_check, observe_pole, ray_samples, second_array_targets,
    ApproachOptions, CEstimate, ComparisonReport, Monodromy, PoleObservation, PoleRun,
};
use crate::C64;

fn r(v: f64) -> C64 {
    C64::new(v, 0.0)
}

/// Number of leading Taylor coefficients compared against closed forms.
pub const ORACLE_COEFFS: usize = 15;

/// `|ξ|` at the anchor where integrations are seeded.
pub const ANCHOR_XI: f64 = 1e-3;

/// Largest coefficient deviation, relative where the reference is nonzero.
pub fn max_deviation(a: &TaylorSeries, b: &TaylorSeries, count: usize) -> f64 {
    (0..count)
        .map(|k| {
            let (x, y) = (a.coeff(k), b.coeff(k));
            if y.norm() > 0.0 {
                (x - y).norm() / y.norm()
            } else {
                (x - y).norm()
            }
        })
        .fold(0.0, f64::max)
}

fn poly(coeffs: &[C64], order: usize) -> TaylorSeries {
    let mut c = vec![r(0.0); order + 1];
    c[..coeffs.len()].copy_from_slice(coeffs);
    TaylorSeries::new(c)
}

/// Taylor series of `N(ξ)/(ξ − 12)^p` with `N` listed from its `ξ¹` coefficient.
fn p1_rational(num_from_one: &[f64], p: u32, order: usize) -> Result<TaylorSeries> {
    let mut n = vec![r(0.0)];
    n.extend(num_from_one.iter().map(|&c| r(c)));
    poly(&n, order).div_series(&poly(&[r(-12.0), r(1.0)], order).powi(p))
}

/// Deviations of `F₀, F₁, F₂` of p1 from `H₀, H₁, H₂`.
pub fn p1_level_match(k: usize) -> Result<[f64; 3]> {
    let (s, _) = builtin("p1")?;
    let e = build_expansion(&s, 2, k)?;
    let refs = [
        p1_rational(&[144.0], 2, k)?,
        p1_rational(&P1_H1_NUMERATOR, 3, k)?,
        p1_rational(&P1_H2_NUMERATOR, 4, k)?,
    ];
    let mut out = [0.0; 3];
    for (m, h) in refs.iter().enumerate() {
        out[m] = max_deviation(&e.observable(m), h, ORACLE_COEFFS);
    }
    Ok(out)
}

/// `A` in `ξ_s = 12 + A/x` from the computed `F₀, F₁`.
pub fn p1_pole_shift(k: usize) -> Result<C64> {
    let (s, _) = builtin("p1")?;
    pole_shift(&build_expansion(&s, 2, k)?)
}

/// Deviations of `F₀` of p2a from `ξ/(1 − ξ²/9)` and of p2b from `2ξ(1+Bξ)/(ξ²+2)`.
pub fn p2_level_match(k: usize) -> Result<[f64; 2]> {
    let (a, _) = builtin("p2a")?;
    let fa = observe_series(&a, &solve_f0(&a, k)?);
    let ra = poly(&[r(0.0), r(1.0)], k).div_series(&poly(&[r(1.0), r(0.0), r(-1.0 / 9.0)], k))?;
    let (b, _) = builtin("p2b")?;
    let fb = observe_series(&b, &solve_f0(&b, k)?);
    let bb = C64::new(0.0, 0.5f64.sqrt());
    let rb = poly(&[r(0.0), r(2.0), bb * 2.0], k).div_series(&poly(&[r(2.0), r(0.0), r(1.0)], k))?;
    Ok([max_deviation(&fa, &ra, ORACLE_COEFFS), max_deviation(&fb, &rb, ORACLE_COEFFS)])
}

/// Domb–Sykes estimate on the abel `F₀`.
pub fn abel_radius(k: usize) -> Result<RadiusEstimate> {
    let (s, _) = builtin("abel")?;
    radius_estimate(&solve_f0(&s, k)?[0])
}

/// Predicted array, observed poles and their comparison.
#[derive(Debug, Clone)]
pub struct PoleValidation {
    pub array: SingularityArray,
    pub observations: Vec<PoleObservation>,
    pub runs: Vec<PoleRun>,
    pub report: ComparisonReport,
}

/// Seeds at `|ξ| = ANCHOR_XI` for each predicted pole, integrates to half a unit
/// to its right, then locates and matches the observed singularities.
pub fn validate_poles(
    e: &TwoScaleExpansion,
    xi_s: C64,
    c: C64,
    n_range: (i64, i64),
    opts: &ApproachOptions,
) -> Result<PoleValidation> {
    let array = predict_array(xi_s, c, e.alpha1, n_range)?;
    let mut runs = Vec::new();
    for entry in &array.entries {
        let near = entry.x_refined.unwrap_or(entry.x_asymptotic);
        runs.push(observe_pole(e, c, near, r(0.5), ANCHOR_XI, opts)?);
    }
    let observations: Vec<PoleObservation> = runs.iter().map(|run| run.observation).collect();
    let report = compare_arrays(&array, &observations);
    Ok(PoleValidation { array, observations, runs, report })
}

/// The p1 expansion used by the validation runs.
pub fn p1_expansion() -> Result<TwoScaleExpansion> {
    let (s, _) = builtin("p1")?;
    build_expansion(&s, 8, 64)
}

/// p1 with `C = 12`, `ξ_s = 12`.
pub fn p1_pole_validation(e: &TwoScaleExpansion, n_range: (i64, i64)) -> Result<PoleValidation> {
    validate_poles(e, r(12.0), r(12.0), n_range, &ApproachOptions::default())
}

/// Located abel branch point with its loop test.
#[derive(Debug, Clone, Copy)]
pub struct BranchCheck {
    pub n: i64,
    pub observation: PoleObservation,
    pub monodromy: Monodromy,
}

/// Abel singularities for `C = 1`, loops of radius 0.25.
pub fn abel_branch_points(n_range: (i64, i64)) -> Result<Vec<BranchCheck>> {
    let (s, _) = builtin("abel")?;
    let e = build_expansion(&s, 8, 64)?;
    let c = r(1.0);
    let array = predict_array(r(AbelGeometry::default().xi0), c, e.alpha1, n_range)?;
    let opts = ApproachOptions::default();
    let mut out = Vec::new();
    for entry in &array.entries {
        let run = observe_pole(&e, c, entry.x_refined.unwrap_or(entry.x_asymptotic), r(0.5), ANCHOR_XI, &opts)?;
        let monodromy = loop_check(&e, &run, 0.25, 96)?;
        out.push(BranchCheck { n: entry.n, observation: run.observation, monodromy });
    }
    Ok(out)
}

/// Constant estimates on `arg x = π/4` and `arg x = π/3` for one p1 solution.
#[derive(Debug, Clone)]
pub struct RoundTrip {
    pub c: C64,
    pub first: CEstimate,
    pub second: CEstimate,
}

/// Seeds the `C` transseries at `|x| = 48` on `arg x = π/4`, integrates inward
/// along that ray and, after an arc, along `arg x = π/3`, sampling `|x| = 46, 44, .., 24`.
pub fn p1_constant_round_trip(e: &TwoScaleExpansion, c: C64) -> Result<RoundTrip> {
    let formal = formal_for(e, 50.0)?;
    let radii: Vec<f64> = (0..12).map(|k| 46.0 - 2.0 * k as f64).collect();
    let rs = ray_samples(e, &formal, c, 48.0, (FRAC_PI_4, FRAC_PI_3), &radii)?;
    Ok(RoundTrip { c, first: extract_c(e, &rs.first)?, second: extract_c(e, &rs.second)? })
}

/// Gevrey statistics of the p1 levels on `|ξ| = ρ`.
pub fn p1_gevrey(m_max: usize, rho: f64) -> Result<GevreyFit> {
    let (s, _) = builtin("p1")?;
    Ok(gevrey_fit(&build_expansion(&s, m_max, 64)?, rho))
}

/// Refinement shifts at two indices and the worst Newton residual in between.
#[derive(Debug, Clone, Copy)]
pub struct ArrayConvergence {
    pub shift_lo: f64,
    pub shift_hi: f64,
    pub max_residual: f64,
}

pub fn array_convergence(xi_s: C64, c: C64, alpha1: C64, lo: i64, hi: i64) -> Result<ArrayConvergence> {
    let a = predict_array(xi_s, c, alpha1, (lo, hi))?;
    let shift = |n: i64| a.entries.iter().find(|e| e.n == n).and_then(|e| e.shift()).unwrap_or(f64::NAN);
    let max_residual = a.entries.iter().map(|e| e.residual).fold(0.0, f64::max);
    Ok(ArrayConvergence { shift_lo: shift(lo), shift_hi: shift(hi), max_residual })
}

/// One second-array prediction and the singularity found near it.
#[derive(Debug, Clone, Copy)]
pub struct SecondArrayCheck {
    pub first: C64,
    pub k: i64,
    pub predicted: C64,
    pub observed: C64,
    pub delta: f64,
}

/// For each located first-array pole and offset index `k`, integrates towards
/// the predicted second-array point (approach from 0.6 to its right).
pub fn second_array(e: &TwoScaleExpansion, c: C64, first: &[C64], ks: &[i64]) -> Result<Vec<SecondArrayCheck>> {
    let opts = ApproachOptions::default();
    let mut out = Vec::new();
    for &k in ks {
        for &xs in first {
            let predicted = second_array_targets(xs, &[k])[0];
            let obs = observe_pole(e, c, predicted, r(0.6), ANCHOR_XI, &opts)?.observation;
            out.push(SecondArrayCheck { first: xs, k, predicted, observed: obs.location, delta: (obs.location - predicted).norm() });
        }
    }
    Ok(out)
}

/// `3^{-1/2} e^{−π√3/6}`.
pub fn abel_xi0_closed_form() -> f64 {
    (-PI * 3f64.sqrt() / 6.0).exp() / 3f64.sqrt()
}
