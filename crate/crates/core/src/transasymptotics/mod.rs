//! Formal power-series solution and the two-scale expansion
//! `y ~ Σ x^{-m} F_m(ξ)`, `ξ = C e^{-x} x^{α₁}`.
//!
//! Substituting the ansatz and collecting powers of `z = 1/x` gives, with
//! `F_{-1} = 0`,
//!
//! ```text
//! ξ F_m' − (Λ − J(ξ)) F_m = α₁ ξ F'_{m−1} − ((m−1) I + A) F_{m−1} − [z^m] g(z, Σ_{j<m} z^j F_j)
//! ```
//!
//! where `J = ∂_y g(0, F₀)`. The ξ¹ coefficient of the first component of `F_m`
//! is free at level `m` and is fixed by solvability of level `m + 1`.

use alloc::vec;
use alloc::vec::Vec;

// inherent on f64 whenever std is part of the build
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::solve_with_fixed;
use crate::linear_ode::{series_field_solve_linear, Seed, SeriesMatrix};
use crate::normal_form::NormalSystem;
use crate::series::{graded_compose_level, InvXSeries, TaylorSeries};
use crate::singularities::radius_estimate;
use crate::C64;

/// Number of circle points used for the Gevrey sup norms.
pub const GEVREY_POINTS: usize = 256;

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// `ỹ₀ = Σ_{r=2}^{R} y_r x^{-r}`, one [`InvXSeries`] per component.
pub fn formal_power_series(s: &NormalSystem, order: usize) -> Result<Vec<InvXSeries>> {
    if order < 2 {
        return Err(Error::InvalidInput("formal series order must be at least 2"));
    }
    let n = s.n();
    let mut ys: Vec<Vec<TaylorSeries>> = Vec::with_capacity(order + 1);
    ys.push(vec![TaylorSeries::zeros(0); n]);
    for r in 1..=order {
        let forcing = graded_compose_level(s.g(), &ys, r, 0)?;
        let prev = &ys[r - 1];
        let mut next = Vec::with_capacity(n);
        for j in 0..n {
            let lam = s.lambda()[j];
            if lam.is_zero() {
                return Err(Error::ResonantOrder { order: r });
            }
            let v = (prev[j].coeff(0) * ((r - 1) as f64) + s.alpha()[j] * prev[j].coeff(0) + forcing[j].coeff(0)) / lam;
            next.push(TaylorSeries::constant(v, 0));
        }
        ys.push(next);
    }
    Ok((0..n)
        .map(|j| InvXSeries::new(2, ys[2..].iter().map(|y| y[j].coeff(0)).collect()))
        .collect())
}

/// Upper envelope `s_m ≤ K_g m! B_g^m` of the sup norms of the observable.
#[derive(Debug, Clone, PartialEq)]
pub struct GevreyFit {
    pub rho: f64,
    pub sup_norms: Vec<f64>,
    pub k_g: f64,
    pub b_g: f64,
    /// Coefficient of determination of the log-linear fit, `NaN` with fewer than 3 points.
    pub r_squared: f64,
}

impl GevreyFit {
    pub fn envelope(&self, m: usize) -> f64 {
        self.k_g * factorial(m) * self.b_g.powi(m as i32)
    }

    pub fn is_valid(&self) -> bool {
        self.sup_norms
            .iter()
            .enumerate()
            .all(|(m, &s)| s <= self.envelope(m))
    }
}

fn factorial(m: usize) -> f64 {
    (1..=m).fold(1.0, |acc, j| acc * j as f64)
}

/// Two-scale expansion `F₀..F_M`, each an n-vector of Taylor series to order `K`.
#[derive(Debug, Clone)]
pub struct TwoScaleExpansion {
    pub system: NormalSystem,
    pub m_max: usize,
    pub k: usize,
    pub fm: Vec<Vec<TaylorSeries>>,
    /// `c_1..c_M`, the ξ¹ coefficient of the first component of `F_m`.
    pub free_constants: Vec<C64>,
    pub lambda1: C64,
    pub alpha1: C64,
    /// Radius of convergence of the observable of `F₀`, infinite for entire `F₀`.
    pub radius: f64,
    pub gevrey: GevreyFit,
}

/// Value of the truncated two-scale sum at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoScaleValue {
    pub value: Vec<C64>,
    pub error_bound: f64,
    pub m_star: usize,
    pub xi: C64,
}

fn jacobian(s: &NormalSystem, f0: &[TaylorSeries]) -> Result<SeriesMatrix> {
    let n = s.n();
    let order = f0[0].order();
    let zero = TaylorSeries::zeros(order);
    let mut entries = Vec::with_capacity(n * n);
    for gi in s.g() {
        for j in 0..n {
            entries.push(gi.partial_y(j).compose(&zero, f0)?);
        }
    }
    Ok(SeriesMatrix::new(n, entries))
}

/// `Λ − J(ξ)`.
fn level_operator(s: &NormalSystem, f0: &[TaylorSeries]) -> Result<SeriesMatrix> {
    let n = s.n();
    let mut l = jacobian(s, f0)?;
    for i in 0..n {
        for j in 0..n {
            let e = l.entry_mut(i, j);
            *e = -&*e;
        }
        let d = l.entry_mut(i, i);
        d.coeffs_mut()[0] += s.lambda()[i];
    }
    Ok(l)
}

/// `F₀` from `ξF₀' = ΛF₀ − g(0, F₀)`, `F₀'(0) = e₁`.
pub fn solve_f0(s: &NormalSystem, k: usize) -> Result<Vec<TaylorSeries>> {
    let n = s.n();
    let mut c: Vec<Vec<C64>> = vec![vec![C64::zero(); n]; k + 1];
    let zero_z = TaylorSeries::zeros(k);
    for order in 1..=k {
        let b: Vec<C64> = if order == 1 {
            vec![C64::zero(); n]
        } else {
            let trunc: Vec<TaylorSeries> = (0..n)
                .map(|j| TaylorSeries::new((0..=order).map(|i| if i < order { c[i][j] } else { C64::zero() }).collect()))
                .collect();
            let z = zero_z.truncated(order);
            s.g().iter().map(|gi| gi.compose(&z, &trunc).map(|v| -v.coeff(order))).collect::<Result<_>>()?
        };
        let mut a = vec![C64::zero(); n * n];
        for j in 0..n {
            a[j * n + j] = C64::new(order as f64, 0.0) - s.lambda()[j];
        }
        let fixed: Vec<(usize, C64)> = if order == 1 { vec![(0, one())] } else { Vec::new() };
        let sol = solve_with_fixed(&a, &b, n, &fixed).ok_or(Error::ResonantOrder { order })?;
        c[order] = sol.x;
    }
    Ok((0..n).map(|j| TaylorSeries::new(c.iter().map(|ck| ck[j]).collect())).collect())
}

/// Right side of the level-`m` equation from `F_0..F_{m−1}`, truncated at `order`.
fn level_rhs(s: &NormalSystem, fs: &[Vec<TaylorSeries>], m: usize, order: usize) -> Result<Vec<TaylorSeries>> {
    let forcing = graded_compose_level(s.g(), fs, m, order)?;
    let prev = &fs[m - 1];
    let a1 = s.alpha1();
    Ok((0..s.n())
        .map(|j| {
            let p = prev[j].truncated(order);
            let drift = p.euler_derivative().scale(a1);
            let lin = p.scale(C64::new((m - 1) as f64, 0.0) + s.alpha()[j]);
            &(&drift - &lin) - &forcing[j]
        })
        .collect())
}

fn combine(p: &[TaylorSeries], q: &[TaylorSeries], c: C64) -> Vec<TaylorSeries> {
    // p + c (q − p)
    p.iter().zip(q).map(|(a, b)| a + &(b - a).scale(c)).collect()
}

/// Solvability defect of level `m` (ξ¹ row of the first component) given `F_0..F_{m−1}`.
fn solvability_defect(s: &NormalSystem, l: &SeriesMatrix, fs: &[Vec<TaylorSeries>], m: usize) -> Result<C64> {
    let rhs = level_rhs(s, fs, m, 1)?;
    let sol = series_field_solve_linear(l, &rhs, &[Seed { order: 1, component: 0, value: C64::zero() }])?;
    Ok(sol.residual(1, 0))
}

/// Pins the free constant of the last level in `fs` from `(P, Q)`, the solutions
/// with seeds 0 and 1, by requiring level `m` to be solvable.
fn pin_constant(
    s: &NormalSystem,
    l: &SeriesMatrix,
    fs: &mut Vec<Vec<TaylorSeries>>,
    p: &[TaylorSeries],
    q: &[TaylorSeries],
    m: usize,
) -> Result<C64> {
    fs.push(p.to_vec());
    let r0 = solvability_defect(s, l, fs, m)?;
    *fs.last_mut().unwrap() = q.to_vec();
    let r1 = solvability_defect(s, l, fs, m)?;
    let slope = r1 - r0;
    let c = if slope.norm() <= 1e-14 * (1.0 + r0.norm()) { C64::zero() } else { -r0 / slope };
    *fs.last_mut().unwrap() = combine(p, q, c);
    Ok(c)
}

/// `F₀..F_M` to Taylor order `K`, with the delayed constants fixed and the
/// radius and Gevrey envelope of the observable attached.
pub fn build_expansion(s: &NormalSystem, m_max: usize, k: usize) -> Result<TwoScaleExpansion> {
    if k < 2 {
        return Err(Error::InvalidInput("Taylor order must be at least 2"));
    }
    let f0 = solve_f0(s, k)?;
    let l = level_operator(s, &f0)?;
    let mut fs: Vec<Vec<TaylorSeries>> = vec![f0];
    let mut constants = Vec::with_capacity(m_max);
    let seed = |v: f64| [Seed { order: 1, component: 0, value: C64::new(v, 0.0) }];
    // c_m is pinned by the level m + 1 solvability; for m = M that level is thrown away
    for m in 1..=m_max {
        let rhs = level_rhs(s, &fs, m, k)?;
        let p = series_field_solve_linear(&l, &rhs, &seed(0.0))?.f;
        let q = series_field_solve_linear(&l, &rhs, &seed(1.0))?.f;
        let c = pin_constant(s, &l, &mut fs, &p, &q, m + 1)?;
        constants.push(c);
    }
    let observable_f0 = observe_series(s, &fs[0]);
    let radius = radius_of(&observable_f0);
    let rho = if radius.is_finite() { radius / 2.0 } else { 1.0 };
    let mut e = TwoScaleExpansion {
        system: s.clone(),
        m_max,
        k,
        fm: fs,
        free_constants: constants,
        lambda1: s.lambda()[0],
        alpha1: s.alpha1(),
        radius,
        gevrey: GevreyFit { rho, sup_norms: Vec::new(), k_g: 1.0, b_g: 1.0, r_squared: f64::NAN },
    };
    e.gevrey = gevrey_fit(&e, rho);
    Ok(e)
}

fn radius_of(f: &TaylorSeries) -> f64 {
    match radius_estimate(f) {
        Ok(r) => r.radius,
        Err(Error::Oscillatory { radius }) => radius,
        Err(_) => f64::INFINITY,
    }
}

/// `o · F` as a single series.
pub fn observe_series(s: &NormalSystem, f: &[TaylorSeries]) -> TaylorSeries {
    let mut acc = TaylorSeries::zeros(f[0].order());
    for (o, fj) in s.observable().iter().zip(f) {
        if !o.is_zero() {
            acc = &acc + &fj.scale(*o);
        }
    }
    acc
}

impl TwoScaleExpansion {
    /// Observable of `F_m`.
    pub fn observable(&self, m: usize) -> TaylorSeries {
        observe_series(&self.system, &self.fm[m])
    }

    /// `ξ(x) = C e^{-x} x^{α₁}` with the principal logarithm.
    pub fn xi(&self, c: C64, x: C64) -> C64 {
        c * (-x * self.lambda1 + x.ln() * self.alpha1).exp()
    }

    /// Disk inside which the truncated Taylor sums of `F_m` are trusted.
    pub fn reliable_radius(&self) -> f64 {
        self.radius * 0.9f64.min(10f64.powf(-10.0 / self.k as f64))
    }

    /// `Σ_m x^{-m} F_m(0)`, the formal-series part carried by the expansion.
    pub fn at_origin(&self, m: usize) -> Vec<C64> {
        self.fm[m].iter().map(|f| f.coeff(0)).collect()
    }
}

/// `floor(|x| / B_g)` clipped to `[0, m_max]`.
pub fn least_term_index(b_g: f64, x_abs: f64, m_max: usize) -> usize {
    let v = (x_abs / b_g).floor();
    if v.is_nan() || v <= 0.0 {
        0
    } else if v >= m_max as f64 {
        m_max
    } else {
        v as usize
    }
}

/// Evaluates `Σ_{m≤m*} x^{-m} F_m(ξ)` at `ξ` directly, bypassing the scale.
pub fn eval_at_xi(e: &TwoScaleExpansion, xi: C64, x: C64, m_star: usize) -> Vec<C64> {
    let n = e.system.n();
    let z = x.inv();
    let mut out = vec![C64::zero(); n];
    let mut zm = one();
    for m in 0..=m_star.min(e.m_max) {
        for j in 0..n {
            out[j] += zm * e.fm[m][j].eval(xi);
        }
        zm *= z;
    }
    out
}

/// Two-scale value at `x` for the constant `C` with the Gevrey truncation bound.
pub fn eval_two_scale(e: &TwoScaleExpansion, c: C64, x: C64, m_used: Option<usize>) -> Result<TwoScaleValue> {
    if x.norm() <= 1.0 {
        return Err(Error::InvalidInput("two-scale evaluation needs |x| > 1"));
    }
    let xi = e.xi(c, x);
    let xa = xi.norm();
    if xa >= e.radius {
        return Err(Error::ScalePastBranch { xi_abs: xa, radius: e.radius });
    }
    if xa > e.reliable_radius() {
        return Err(Error::OutsideReliableDisk { xi_abs: xa, radius: e.reliable_radius() });
    }
    let m_star = m_used
        .map(|m| m.min(e.m_max))
        .unwrap_or_else(|| least_term_index(e.gevrey.b_g, x.norm(), e.m_max));
    let value = eval_at_xi(e, xi, x, m_star);
    let next = m_star + 1;
    let error_bound = e.gevrey.envelope(next) * x.norm().powi(-(next as i32));
    Ok(TwoScaleValue { value, error_bound, m_star, xi })
}

/// Sup norms of the observable of `F_m` on `|ξ| = ρ` and their Gevrey envelope.
pub fn gevrey_fit(e: &TwoScaleExpansion, rho: f64) -> GevreyFit {
    let sup_norms: Vec<f64> = (0..=e.m_max)
        .map(|m| {
            let f = e.observable(m);
            (0..GEVREY_POINTS)
                .map(|i| {
                    let th = 2.0 * core::f64::consts::PI * i as f64 / GEVREY_POINTS as f64;
                    f.eval(C64::from_polar(rho, th)).norm()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let pts: Vec<(f64, f64)> = sup_norms
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0.0 && s.is_finite())
        .map(|(m, &s)| (m as f64, (s / factorial(m)).ln()))
        .collect();
    let (a, b, r_squared) = match pts.len() {
        0 => (0.0, 0.0, f64::NAN),
        1 => (pts[0].1, 0.0, f64::NAN),
        _ => {
            let np = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / np;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / np;
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
            let b = sxy / sxx;
            let a = my - b * mx;
            let r2 = if pts.len() < 3 {
                f64::NAN
            } else if syy == 0.0 {
                1.0
            } else {
                sxy * sxy / (sxx * syy)
            };
            (a, b, r2)
        }
    };
    let b_g = b.exp();
    let mut k_g = a.exp();
    for (m, &s) in sup_norms.iter().enumerate() {
        let env = k_g * factorial(m) * b_g.powi(m as i32);
        if s > env {
            // a few ulps of headroom so the envelope holds after rounding
            k_g *= s / env * (1.0 + 8.0 * f64::EPSILON);
        }
    }
    GevreyFit { rho, sup_norms, k_g, b_g, r_squared }
}

/// Largest relative coefficient residual of the level equations `m ≤ M`,
/// recomputed with the full composition `[z^m] g(z, Σ_{j≤m} z^j F_j)`.
pub fn expansion_residual(e: &TwoScaleExpansion) -> Result<f64> {
    let s = &e.system;
    let n = s.n();
    let k = e.k;
    let mut worst: f64 = 0.0;
    for m in 0..=e.m_max {
        let forcing = graded_compose_level(s.g(), &e.fm[..=m], m, k)?;
        for j in 0..n {
            let f = &e.fm[m][j];
            let lhs = f.euler_derivative();
            let lin = f.scale(s.lambda()[j]);
            let (drift, prev) = if m == 0 {
                (TaylorSeries::zeros(k), TaylorSeries::zeros(k))
            } else {
                let p = &e.fm[m - 1][j];
                (p.euler_derivative().scale(e.alpha1), p.scale(C64::new((m - 1) as f64, 0.0) + s.alpha()[j]))
            };
            for i in 0..=k {
                let parts = [lhs.coeff(i), -lin.coeff(i), -drift.coeff(i), prev.coeff(i), forcing[j].coeff(i)];
                let res: C64 = parts.iter().sum();
                let scale: f64 = parts.iter().map(|v| v.norm()).sum();
                if scale > 0.0 {
                    worst = worst.max(res.norm() / scale);
                }
            }
        }
    }
    Ok(worst)
}
