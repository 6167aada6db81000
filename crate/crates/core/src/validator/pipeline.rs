//! Composite runs: two-scale seed, integration, detection.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::detect::{continue_approach, detect_singularity, monodromy, ApproachOptions, Monodromy, PoleObservation};
use super::extract::hybrid_seed;
use super::integrator::{integrate_path, PathSpec, Trajectory};
use crate::error::Result;
use crate::series::InvXSeries;
use crate::transasymptotics::{eval_two_scale, TwoScaleExpansion};
use crate::C64;

/// Point at height `im` where `|ξ(x)| = xi_abs`.
pub fn anchor_at(e: &TwoScaleExpansion, c: C64, im: f64, xi_abs: f64) -> C64 {
    let (lam, al) = (e.lambda1, e.alpha1);
    let mut x = C64::new(1.0, im);
    for _ in 0..50 {
        let re = (c.norm().ln() - xi_abs.ln() + lam.im * im + (al * x.ln()).re) / lam.re;
        x = C64::new(re, im);
    }
    x
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleRun {
    pub anchor: C64,
    pub seed: Vec<C64>,
    /// Where the straight run from the anchor ends and the approach starts.
    pub start: C64,
    pub start_state: Vec<C64>,
    /// Anchor to the last approach sample.
    pub trajectory: Trajectory,
    pub observation: PoleObservation,
}

/// Seeds `y` from the two-scale sum at the anchor of `near` (same height,
/// `|ξ| = xi_abs`), runs straight to `near + offset` and locates the singularity.
pub fn observe_pole(
    e: &TwoScaleExpansion,
    c: C64,
    near: C64,
    offset: C64,
    xi_abs: f64,
    opts: &ApproachOptions,
) -> Result<PoleRun> {
    let anchor = anchor_at(e, c, near.im, xi_abs);
    let seed = eval_two_scale(e, c, anchor, None)?.value;
    let start = near + offset;
    let path = PathSpec::segment(anchor, start).with_tolerances(opts.rel_tol, opts.abs_tol).with_max_step(opts.max_step);
    let run = integrate_path(&e.system, &seed, &path)?;
    let start_state = run.end_state().to_vec();
    let trajectory = continue_approach(&e.system, run, false, opts)?;
    let observation = detect_singularity(&e.system, &trajectory, opts)?;
    Ok(PoleRun { anchor, seed, start, start_state, trajectory, observation })
}

/// One- and two-loop monodromy on a circle of radius `rho` around the located point.
pub fn loop_check(e: &TwoScaleExpansion, run: &PoleRun, rho: f64, vertices: usize) -> Result<Monodromy> {
    let x0 = run.observation.location;
    let dir = (run.start - x0) / (run.start - x0).norm();
    let p0 = x0 + dir * rho;
    let to = integrate_path(&e.system, &run.start_state, &PathSpec::segment(run.start, p0).with_tolerances(1e-13, 1e-15))?;
    monodromy(&e.system, x0, p0, to.end_state(), vertices)
}

/// `(x, y(x))` along two rays of one solution.
#[derive(Debug, Clone, PartialEq)]
pub struct RaySamples {
    pub first: Vec<(C64, Vec<C64>)>,
    pub second: Vec<(C64, Vec<C64>)>,
}

/// Seeds the hybrid two-scale value at `r0·e^{iφ₁}`, then integrates inward
/// along `arg x = φ₁` and, after an arc at `|x| = r0`, along `arg x = φ₂`,
/// recording the state at each radius of `radii` (decreasing, below `r0`).
pub fn ray_samples(
    e: &TwoScaleExpansion,
    formal: &[InvXSeries],
    c: C64,
    r0: f64,
    phis: (f64, f64),
    radii: &[f64],
) -> Result<RaySamples> {
    let (rel, abs) = (1e-13, 1e-22);
    let x0 = C64::from_polar(r0, phis.0);
    let y0 = hybrid_seed(e, formal, c, x0);
    let inward = |phi: f64, y: &[C64]| -> Result<Vec<(C64, Vec<C64>)>> {
        let mut out = Vec::with_capacity(radii.len());
        let mut x = C64::from_polar(r0, phi);
        let mut state = y.to_vec();
        for &r in radii {
            let next = C64::from_polar(r, phi);
            let t = integrate_path(&e.system, &state, &PathSpec::segment(x, next).with_tolerances(rel, abs))?;
            state = t.end_state().to_vec();
            x = next;
            out.push((x, state.clone()));
        }
        Ok(out)
    };
    let first = inward(phis.0, &y0)?;
    let arc: Vec<C64> = (0..=32).map(|k| C64::from_polar(r0, phis.0 + (phis.1 - phis.0) * k as f64 / 32.0)).collect();
    let turned = integrate_path(&e.system, &y0, &PathSpec::new(arc).with_tolerances(rel, abs))?;
    let second = inward(phis.1, turned.end_state())?;
    Ok(RaySamples { first, second })
}

/// `x_s − ln x_s + (2k+1)πi − ln 60` for each `k`.
pub fn second_array_targets(x_s: C64, ks: &[i64]) -> Vec<C64> {
    let mut out = vec![];
    for &k in ks {
        out.push(x_s - x_s.ln() + C64::new(-(60f64.ln()), (2 * k + 1) as f64 * core::f64::consts::PI));
    }
    out
}
