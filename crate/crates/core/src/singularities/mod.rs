//! Locating the singularity `ξ_s` of `F₀`, predicting the x-plane arrays
//! `C e^{-x} x^{α₁} = ξ_s`, and closed forms for the builtin examples.

mod oracles;

use alloc::vec::Vec;
use core::f64::consts::PI;

// inherent on f64 whenever std is part of the build
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::real_least_squares;
use crate::normal_form::NormalSystem;
use crate::series::TaylorSeries;
use crate::transasymptotics::{solve_f0, TwoScaleExpansion};
use crate::validator::{integrate_polyline, PathSpec, Trajectory};
use crate::C64;

pub use oracles::{
    abel_oracle, f0_of_xi, p1_oracle, p2_oracle, xi_of_f0, AbelGeometry, AbelOracle, P1Oracle, P2Oracle, ABEL_OMEGA0,
    ABEL_THETA, P1_H1_NUMERATOR, P1_H2_NUMERATOR, P1_POLE_SHIFT,
};

/// Minimum number of nonzero coefficients for a ratio analysis.
pub const MIN_NONZERO: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusMethod {
    DombSykes,
    ClosedForm,
    Continuation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusEstimate {
    pub radius: f64,
    pub xi_s: C64,
    /// `γ` in `f ~ (1 − ξ/ξ_s)^γ`.
    pub exponent: f64,
    /// Change of the extrapolated `ξ_s` when one node is dropped.
    pub uncertainty: f64,
    pub method: RadiusMethod,
}

/// Value and derivative at 0 of the Newton interpolant through `(u_i, r_i)`.
fn extrapolate(u: &[f64], r: &[C64]) -> (C64, C64) {
    let n = u.len();
    let mut d = r.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            d[i] = (d[i] - d[i - 1]) / (u[i] - u[i - j]);
        }
    }
    // Horner for the Newton form and its derivative at 0
    let mut p = d[n - 1];
    let mut dp = C64::zero();
    for i in (0..n - 1).rev() {
        dp = dp * (-u[i]) + p;
        p = p * (-u[i]) + d[i];
    }
    (p, dp)
}

/// Domb–Sykes analysis of the coefficient ratios `c_k / c_{k−1}`.
///
/// The ratios are extrapolated to `1/k → 0` by polynomial interpolation on
/// six nodes from the top of the series. Ratios that do not settle (conjugate
/// singularities, vanishing coefficients) give [`Error::Oscillatory`] with the
/// modulus fitted from `ln|c_k| = a + bk + e ln k`.
pub fn radius_estimate(f: &TaylorSeries) -> Result<RadiusEstimate> {
    let c = f.coeffs();
    let k_top = f.order();
    let nonzero = c.iter().skip(1).filter(|v| !v.is_zero()).count();
    if nonzero < MIN_NONZERO {
        return Err(Error::InsufficientCoefficients { nonzero, needed: MIN_NONZERO });
    }
    let lo = (k_top / 2).max(2);
    let vanishing = (lo..=k_top).any(|k| {
        let next = if k < k_top { c[k + 1].norm() } else { 0.0 };
        c[k].norm() <= 1e-10 * c[k - 1].norm().max(next)
    });
    let ratio = |k: usize| c[k] / c[k - 1];
    let erratic = vanishing
        || (lo + 1..=k_top).any(|k| {
            let (a, b) = (ratio(k), ratio(k - 1));
            (a - b).norm() > 0.1 * a.norm()
        });
    if erratic {
        return Err(Error::Oscillatory { radius: modulus_fit(c, lo) });
    }
    let step = (k_top / 16).max(1);
    let nodes: Vec<usize> = (0..6).map(|j| k_top - j * step).filter(|&k| k > lo.max(1)).collect();
    if nodes.len() < 3 {
        return Err(Error::InsufficientCoefficients { nonzero, needed: MIN_NONZERO });
    }
    let u: Vec<f64> = nodes.iter().map(|&k| 1.0 / k as f64).collect();
    let r: Vec<C64> = nodes.iter().map(|&k| ratio(k)).collect();
    let (p0, dp0) = extrapolate(&u, &r);
    let (q0, _) = extrapolate(&u[..u.len() - 1], &r[..r.len() - 1]);
    let xi_s = p0.inv();
    Ok(RadiusEstimate {
        radius: xi_s.norm(),
        xi_s,
        exponent: -(1.0 + (dp0 / p0).re),
        uncertainty: (q0.inv() - xi_s).norm(),
        method: RadiusMethod::DombSykes,
    })
}

fn modulus_fit(c: &[C64], lo: usize) -> f64 {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (k, v) in c.iter().enumerate().skip(lo) {
        let nb = c[k - 1].norm().max(c.get(k + 1).map_or(0.0, |w| w.norm()));
        if v.norm() > 1e-10 * nb {
            x.extend_from_slice(&[1.0, k as f64, (k as f64).ln()]);
            y.push(v.norm().ln());
        }
    }
    match real_least_squares(&x, &y, 3) {
        Some(p) if y.len() >= 3 => (-p[1]).exp(),
        _ => f64::NAN,
    }
}

/// Options for [`continue_f0`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    pub taylor_order: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub blowup: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self { taylor_order: 64, rel_tol: 1e-12, abs_tol: 1e-14, blowup: 1e8 }
    }
}

/// Integrates `dF₀/dξ = ξ^{-1}(ΛF₀ − g(0, F₀))` along a polyline in the ξ-plane,
/// seeded from the Taylor series at the first waypoint.
pub fn continue_f0(s: &NormalSystem, path: &[C64], opts: &ContinuationOptions) -> Result<Trajectory> {
    let start = *path.first().ok_or(Error::InvalidInput("empty path"))?;
    if start.is_zero() {
        return Err(Error::InvalidInput("continuation starts at the fixed point ξ = 0"));
    }
    let f0 = solve_f0(s, opts.taylor_order)?;
    let radius = match radius_estimate(&crate::transasymptotics::observe_series(s, &f0)) {
        Ok(r) => r.radius,
        Err(Error::Oscillatory { radius }) => radius,
        Err(_) => f64::INFINITY,
    };
    if start.norm() > 0.5 * radius {
        return Err(Error::InvalidInput("continuation must start well inside the Taylor disk"));
    }
    let y0: Vec<C64> = f0.iter().map(|f| f.eval(start)).collect();
    let spec = PathSpec::new(path.to_vec())
        .with_tolerances(opts.rel_tol, opts.abs_tol)
        .with_blowup(opts.blowup);
    let rhs = |xi: C64, f: &[C64], out: &mut [C64]| {
        for j in 0..f.len() {
            out[j] = (s.lambda()[j] * f[j] - s.g()[j].eval(C64::zero(), f)) / xi;
        }
    };
    integrate_polyline(rhs, &y0, &spec).map_err(|e| match e {
        Error::StepUnderflow { x, .. } => Error::SingularApproach { xi: x },
        other => other,
    })
}

/// One predicted singularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayEntry {
    pub n: i64,
    pub x_asymptotic: C64,
    /// `None` when Newton failed for this entry.
    pub x_refined: Option<C64>,
    pub residual: f64,
}

impl ArrayEntry {
    pub fn shift(&self) -> Option<f64> {
        self.x_refined.map(|x| (x - self.x_asymptotic).norm())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityArray {
    pub xi_s: C64,
    pub c: C64,
    pub alpha1: C64,
    pub entries: Vec<ArrayEntry>,
}

impl SingularityArray {
    /// Smallest `n` from which `|x_refined − x_asymptotic|` never increases.
    pub fn monotone_from(&self) -> Option<i64> {
        let shifts: Vec<(i64, f64)> = self.entries.iter().filter_map(|e| e.shift().map(|s| (e.n, s))).collect();
        let mut start = shifts.first()?.0;
        for w in shifts.windows(2) {
            if w[1].1 > w[0].1 {
                start = w[1].0;
            }
        }
        Some(start)
    }
}

/// Newton iteration limit and step tolerance for the array refinement.
pub const NEWTON_MAX_ITER: usize = 50;
pub const NEWTON_TOL: f64 = 1e-12;

/// Leading asymptote `2nπi + α₁ ln(2nπi) + ln C − ln ξ_s`.
pub fn array_asymptote(xi_s: C64, c: C64, alpha1: C64, n: i64) -> C64 {
    let w = C64::new(0.0, 2.0 * PI * n as f64);
    w + alpha1 * w.ln() + c.ln() - xi_s.ln()
}

/// Solves `C e^{-x} x^{α₁} = ξ_s` on the branch labelled by `n`.
pub fn refine_array_point(xi_s: C64, c: C64, alpha1: C64, n: i64, seed: C64) -> Result<C64> {
    let target = c.ln() - xi_s.ln() + C64::new(0.0, 2.0 * PI * n as f64);
    let mut x = seed;
    for _ in 0..NEWTON_MAX_ITER {
        let g = x - alpha1 * x.ln() - target;
        let dg = C64::new(1.0, 0.0) - alpha1 / x;
        let dx = g / dg;
        x -= dx;
        if !(x.re.is_finite() && x.im.is_finite()) {
            break;
        }
        if dx.norm() <= NEWTON_TOL * (1.0 + x.norm()) {
            return Ok(x);
        }
    }
    Err(Error::NewtonDiverged { n })
}

/// Predicted array for `n` in `n_range` (inclusive).
pub fn predict_array(xi_s: C64, c: C64, alpha1: C64, n_range: (i64, i64)) -> Result<SingularityArray> {
    if c.is_zero() {
        return Err(Error::ZeroC);
    }
    if xi_s.is_zero() {
        return Err(Error::InvalidInput("ξ_s must be nonzero"));
    }
    let entries = (n_range.0..=n_range.1)
        .map(|n| {
            let x_asymptotic = array_asymptote(xi_s, c, alpha1, n);
            match refine_array_point(xi_s, c, alpha1, n, x_asymptotic) {
                Ok(x) => {
                    let residual = (c * (-x + alpha1 * x.ln()).exp() - xi_s).norm();
                    ArrayEntry { n, x_asymptotic, x_refined: Some(x), residual }
                }
                Err(_) => ArrayEntry { n, x_asymptotic, x_refined: None, residual: f64::INFINITY },
            }
        })
        .collect();
    Ok(SingularityArray { xi_s, c, alpha1, entries })
}

/// `A` in `ξ_s(x) = ξ_s + A/x + O(x^{-2})` for a double pole of the observable.
///
/// With `P = ξ/h₀` and `Q = h₁P²`, `1/h = P/ξ − Q/(xξ²) + O(x^{-2})`. `P` has a
/// double zero at `ξ_s` and `Q(ξ_s) = 0`; keeping the square structure of
/// `1/h` at the moved zero gives `A = Q'(ξ_s) / (ξ_s P''(ξ_s))`.
pub fn pole_shift(e: &TwoScaleExpansion) -> Result<C64> {
    if e.m_max < 1 {
        return Err(Error::InvalidInput("pole shift needs F₁"));
    }
    let h0 = e.observable(0);
    let h1 = e.observable(1);
    let p = h0.div_by_variable()?.recip()?;
    let q = h1.mul_series(&p.mul_series(&p));
    let dp = p.derivative();
    let ddp = dp.derivative();
    let mut xi = match radius_estimate(&h0) {
        Ok(r) => r.xi_s,
        Err(_) => C64::new(e.radius, 0.0),
    };
    let mut converged = false;
    for _ in 0..NEWTON_MAX_ITER {
        let step = dp.eval(xi) / ddp.eval(xi);
        xi -= step;
        if step.norm() <= 1e-14 * xi.norm() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NewtonDiverged { n: 0 });
    }
    Ok(q.derivative().eval(xi) / (xi * ddp.eval(xi)))
}
