//! Approaching a movable singularity and fitting its local form.
//!
//! Systems of dimension ≥ 2 are tracked through the observable `h = o·y`: the
//! log-derivative `q = h/h'` is affine near an algebraic singularity,
//! `q ≈ −(x − x₀)/p`, so two samples give both `x₀` and `p`. Scalar systems are
//! finished in the inverse chart `v = 1/y`, where `dx/dv = −v^{d−2}/P(x, v)` with
//! `P = v^d f(x, 1/v)` is regular and `x(0)` is the singular point.

use alloc::vec;
use alloc::vec::Vec;

// inherent on f64 whenever std is part of the build
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use super::integrator::{integrate_path, integrate_polyline, PathSpec, Sample, Trajectory};
use crate::error::{Error, Result};
use crate::normal_form::NormalSystem;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleKind {
    DoublePole,
    BranchNegHalf,
    UnknownBlowup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionChart {
    Direct,
    InverseSquare,
    Inverse,
}

/// `h ≈ amplitude · (x − location)^{exponent}` near the singular point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFit {
    pub amplitude: C64,
    pub exponent: f64,
    /// RMS residual of the log-log regression.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleObservation {
    pub location: C64,
    pub kind: PoleKind,
    pub local_fit: LocalFit,
    pub chart: DetectionChart,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproachOptions {
    /// `|h|` above which the tail counts as blowing up.
    pub threshold: f64,
    /// Fraction of the distance to the current estimate covered per leg.
    pub fraction: f64,
    pub max_legs: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// `|h|` at which the direct approach stops refining.
    pub stop_at: f64,
    /// Step cap on every leg.
    pub max_step: f64,
}

impl Default for ApproachOptions {
    fn default() -> Self {
        Self { threshold: 1e4, fraction: 0.7, max_legs: 80, rel_tol: 1e-12, abs_tol: 1e-14, stop_at: 1e10, max_step: f64::INFINITY }
    }
}

impl ApproachOptions {
    fn path(&self, a: C64, b: C64) -> PathSpec {
        PathSpec::segment(a, b).with_tolerances(self.rel_tol, self.abs_tol).with_max_step(self.max_step)
    }
}

fn observe(s: &NormalSystem, smp: &Sample) -> (C64, C64) {
    (s.observe(&smp.y), s.observe(&smp.dy))
}

/// Runs `a → b`; an underflow returns the partial trajectory instead of failing.
fn leg(s: &NormalSystem, a: C64, y: &[C64], b: C64, opts: &ApproachOptions) -> Result<(Trajectory, bool)> {
    match integrate_path(s, y, &opts.path(a, b)) {
        Ok(t) => Ok((t, false)),
        Err(Error::StepUnderflow { partial, .. }) => Ok((*partial, true)),
        Err(e) => Err(e),
    }
}

/// `x₀` and exponent `p` (in `q = −(x−x₀)/p`) from the last two samples.
fn log_derivative_estimate(s: &NormalSystem, samples: &[Sample]) -> Option<(C64, f64)> {
    let k = samples.len();
    if k < 2 {
        return None;
    }
    let (a, b) = (&samples[k - 2], &samples[k - 1]);
    let (ha, dha) = observe(s, a);
    let (hb, dhb) = observe(s, b);
    if dha.is_zero() || dhb.is_zero() {
        return None;
    }
    let (qa, qb) = (ha / dha, hb / dhb);
    let dq = qb - qa;
    if dq.is_zero() {
        return None;
    }
    let p = -(b.x - a.x) / dq;
    Some((b.x + p * qb, p.re))
}

/// Integrates from `(x, y)` to `target`, then walks towards the log-derivative
/// estimate of the singular point until `|h|` passes the threshold.
///
/// Returns every accepted sample of the approach; [`Error::NoBlowup`] if the
/// observable stays bounded.
pub fn approach(s: &NormalSystem, x: C64, y: &[C64], target: C64, opts: &ApproachOptions) -> Result<Trajectory> {
    let (traj, stopped) = leg(s, x, y, target, opts)?;
    continue_approach(s, traj, stopped, opts)
}

/// The walking phase of [`approach`], starting from an existing trajectory;
/// `stopped` marks a trajectory that already ended in a step underflow.
pub fn continue_approach(s: &NormalSystem, mut traj: Trajectory, mut stopped: bool, opts: &ApproachOptions) -> Result<Trajectory> {
    for _ in 0..opts.max_legs {
        let last = traj.last().clone();
        if s.observe(&last.y).norm() >= opts.threshold || stopped {
            return Ok(traj);
        }
        let (x0, _) = log_derivative_estimate(s, &traj.samples).ok_or(Error::NoBlowup)?;
        let next = last.x + (x0 - last.x) * opts.fraction;
        if (next - last.x).norm() <= 1e-14 * (1.0 + last.x.norm()) {
            break;
        }
        let (t, st) = leg(s, last.x, &last.y, next, opts)?;
        stopped = st;
        append(&mut traj, t);
    }
    if s.observe(&traj.last().y).norm() >= opts.threshold {
        Ok(traj)
    } else {
        Err(Error::NoBlowup)
    }
}

fn append(traj: &mut Trajectory, t: Trajectory) {
    traj.stats.accepted += t.stats.accepted;
    traj.stats.rejected += t.stats.rejected;
    traj.stats.rhs_evals += t.stats.rhs_evals;
    traj.samples.extend(t.samples.into_iter().skip(1));
}

/// Locates and classifies the singularity a blowing-up trajectory is heading
/// into, re-integrating from the tail's last state.
pub fn detect_singularity(s: &NormalSystem, tail: &Trajectory, opts: &ApproachOptions) -> Result<PoleObservation> {
    let peak = tail.samples.iter().map(|p| s.observe(&p.y).norm()).fold(0.0, f64::max);
    if !(peak >= opts.threshold) {
        return Err(Error::NoBlowup);
    }
    if s.n() == 1 {
        detect_scalar(s, tail)
    } else {
        detect_observable(s, tail, opts)
    }
}

fn detect_observable(s: &NormalSystem, tail: &Trajectory, opts: &ApproachOptions) -> Result<PoleObservation> {
    let mut traj = tail.clone();
    let mut estimate = log_derivative_estimate(s, &traj.samples).ok_or(Error::NoBlowup)?;
    for _ in 0..opts.max_legs {
        let last = traj.last().clone();
        if s.observe(&last.y).norm() >= opts.stop_at {
            break;
        }
        let next = last.x + (estimate.0 - last.x) * opts.fraction;
        let (t, stopped) = leg(s, last.x, &last.y, next, opts)?;
        append(&mut traj, t);
        let refreshed = log_derivative_estimate(s, &traj.samples).ok_or(Error::NoBlowup)?;
        let moved = (refreshed.0 - estimate.0).norm();
        estimate = refreshed;
        if stopped || moved <= 1e-12 * (1.0 + estimate.0.norm()) {
            break;
        }
    }
    let x0 = estimate.0;
    let pts: Vec<(C64, C64)> = traj.samples.iter().map(|p| (p.x, s.observe(&p.y))).collect();
    let local_fit = fit_local(&pts, x0)?;
    Ok(PoleObservation { location: x0, kind: classify(local_fit.exponent), local_fit, chart: DetectionChart::Direct })
}

/// `P(x, v) = v^d f(x, 1/v)` for a scalar system, `d` the top degree in `y`.
fn inverse_chart_degree(s: &NormalSystem) -> usize {
    s.g()[0].terms().map(|(m, _)| m.k[0] as usize).max().unwrap_or(1).max(1)
}

fn inverse_chart_poly(s: &NormalSystem, x: C64, v: C64, d: usize) -> C64 {
    let z = x.inv();
    let mut acc = (-s.lambda()[0] + s.alpha()[0] * z) * v.powu((d - 1) as u32);
    for (m, &c) in s.g()[0].terms() {
        acc += c * z.powu(m.i) * v.powu((d - m.k[0] as usize) as u32);
    }
    acc
}

/// Integrates `dx/dv = −v^{d−2}/P(x, v)` from `v = 1/y` to `v = 0`.
pub fn inverse_chart_landing(s: &NormalSystem, x: C64, y: C64) -> Result<Trajectory> {
    let d = inverse_chart_degree(s);
    if d < 2 {
        return Err(Error::NoBlowup);
    }
    let v0 = y.inv();
    let path = PathSpec::segment(v0, C64::zero()).with_tolerances(1e-13, 1e-16).with_max_step(v0.norm() / 64.0);
    integrate_polyline(
        |v, st, out| {
            let p = inverse_chart_poly(s, st[0], v, d);
            out[0] = -v.powu((d - 2) as u32) / p;
        },
        &[x],
        &path,
    )
}

fn detect_scalar(s: &NormalSystem, tail: &Trajectory) -> Result<PoleObservation> {
    let last = tail.last();
    let chart = inverse_chart_landing(s, last.x, last.y[0])?;
    let x0 = chart.end_state()[0];
    let mut pts: Vec<(C64, C64)> = tail.samples.iter().map(|p| (p.x, p.y[0])).collect();
    let usable = |pts: &[(C64, C64)]| {
        let dmin = pts.iter().map(|p| (p.0 - x0).norm()).fold(f64::INFINITY, f64::min);
        pts.iter().filter(|p| (p.0 - x0).norm() <= 10.0 * dmin).count()
    };
    if usable(&pts) < 4 {
        pts = chart.samples.iter().filter(|p| !p.x.is_zero()).map(|p| (p.y[0], p.x.inv())).collect();
    }
    let local_fit = fit_local(&pts, x0)?;
    Ok(PoleObservation { location: x0, kind: classify(local_fit.exponent), local_fit, chart: DetectionChart::Inverse })
}

fn classify(p: f64) -> PoleKind {
    if (p + 2.0).abs() < 0.1 {
        PoleKind::DoublePole
    } else if (p + 0.5).abs() < 0.1 {
        PoleKind::BranchNegHalf
    } else {
        PoleKind::UnknownBlowup
    }
}

/// Log-log regression of `|h|` on `|x − x₀|` over the last decade of approach.
pub fn fit_local(pts: &[(C64, C64)], x0: C64) -> Result<LocalFit> {
    let dist: Vec<f64> = pts.iter().map(|p| (p.0 - x0).norm()).collect();
    let dmin = dist.iter().copied().filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min);
    let sel: Vec<(f64, f64, usize)> = dist
        .iter()
        .enumerate()
        .filter(|(i, &d)| d > 0.0 && d <= 10.0 * dmin && !pts[*i].1.is_zero())
        .map(|(i, &d)| (d.ln(), pts[i].1.norm().ln(), i))
        .collect();
    if sel.len() < 3 {
        return Err(Error::NoBlowup);
    }
    let n = sel.len() as f64;
    let mx = sel.iter().map(|p| p.0).sum::<f64>() / n;
    let my = sel.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = sel.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = sel.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::NoBlowup);
    }
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let residual = (sel.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    // amplitude at the closest sample, with the nominal exponent when one is recognized
    let closest = sel.iter().min_by(|a, b| a.0.partial_cmp(&b.0).unwrap()).unwrap().2;
    let nominal = match classify(slope) {
        PoleKind::DoublePole => -2.0,
        PoleKind::BranchNegHalf => -0.5,
        PoleKind::UnknownBlowup => slope,
    };
    let amplitude = pts[closest].1 * (pts[closest].0 - x0).powf(-nominal);
    Ok(LocalFit { amplitude, exponent: slope, residual })
}

/// Approach plus detection in one call.
pub fn locate_singularity(
    s: &NormalSystem,
    x: C64,
    y: &[C64],
    target: C64,
    opts: &ApproachOptions,
) -> Result<PoleObservation> {
    let tail = approach(s, x, y, target, opts)?;
    detect_singularity(s, &tail, opts)
}

/// Deviation from the start value after one and after two loops of a regular
/// polygon of radius `rho` around `center`, starting on the polygon at `start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy {
    pub one_loop: f64,
    pub two_loops: f64,
}

pub fn monodromy(s: &NormalSystem, center: C64, start: C64, y_start: &[C64], vertices: usize) -> Result<Monodromy> {
    let rel = |a: &[C64], b: &[C64]| {
        let num: f64 = a.iter().zip(b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        let den: f64 = b.iter().map(|q| q.norm()).fold(0.0, f64::max);
        num / den.max(f64::MIN_POSITIVE)
    };
    let r0 = start - center;
    let mut pts = vec![start];
    for k in 1..=vertices {
        let th = 2.0 * core::f64::consts::PI * k as f64 / vertices as f64;
        pts.push(center + r0 * C64::from_polar(1.0, th));
    }
    *pts.last_mut().unwrap() = start;
    let path = PathSpec::new(pts).with_tolerances(1e-13, 1e-15);
    let once = integrate_path(s, y_start, &path)?;
    let twice = integrate_path(s, once.end_state(), &path)?;
    Ok(Monodromy { one_loop: rel(once.end_state(), y_start), two_loops: rel(twice.end_state(), y_start) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::AnalyticGerm;

    #[test]
    fn synthetic_double_pole() {
        let x0 = C64::new(1.3, -0.4);
        let dir = C64::from_polar(1.0, 0.7);
        let pts: Vec<(C64, C64)> = (0..40)
            .map(|k| {
                let x = x0 + dir * 10f64.powf(-1.0 - k as f64 / 10.0);
                (x, (x - x0).powi(-2) * 12.0)
            })
            .collect();
        let f = fit_local(&pts, x0).unwrap();
        assert!((f.exponent + 2.0).abs() < 1e-3);
        assert!((f.amplitude - C64::new(12.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn bounded_tail_is_no_blowup() {
        let g = AnalyticGerm::new(1, 12);
        let s = NormalSystem::new("decay", vec![C64::new(1.0, 0.0)], vec![C64::zero()], vec![g], vec![C64::new(1.0, 0.0)]).unwrap();
        let t = integrate_path(&s, &[C64::new(1.0, 0.0)], &PathSpec::segment(C64::new(2.0, 0.0), C64::new(4.0, 0.0))).unwrap();
        assert!(matches!(detect_singularity(&s, &t, &ApproachOptions::default()), Err(Error::NoBlowup)));
    }
}
