//! Closed forms attached to the builtin examples.

use core::f64::consts::PI;

// inherent on f64 whenever std is part of the build
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use super::{continue_f0, ContinuationOptions};
use crate::error::{Error, Result};
use crate::normal_form::builtin;
use crate::transasymptotics::solve_f0;
use crate::C64;

fn r(v: f64) -> C64 {
    C64::new(v, 0.0)
}

/// Relative distance to a pole below which the closed forms refuse to evaluate.
const POLE_GUARD: f64 = 1e-12;

/// Coefficients of `ξ, ξ², ξ³, ξ⁴` in the numerator of `H₁ = N₁(ξ)/(ξ − 12)³`.
pub const P1_H1_NUMERATOR: [f64; 4] = [216.0, 210.0, 3.0, -1.0 / 60.0];

/// Coefficients of `ξ..ξ⁶` in the numerator of `H₂ = N₂(ξ)/(ξ − 12)⁴`.
pub const P1_H2_NUMERATOR: [f64; 6] = [1458.0, 5238.0, -99.0 / 8.0, -211.0 / 30.0, 13.0 / 288.0, 1.0 / 21600.0];

/// `A` in `ξ_s = 12 + A/x`.
pub const P1_POLE_SHIFT: f64 = 109.0 / 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum P1Oracle {
    H0(C64),
    H1(C64),
    H2(C64),
    XiSRefined(C64),
    /// Pole `n` of the array in the original variable `z`.
    PoleZ { c: C64, n: f64 },
    XiCondition(C64),
    /// Second-array point at logarithmic distance from a first-array pole `x_s`.
    SecondArrayOffset { x_s: C64, n: i64 },
}

fn poly(coeffs_from_one: &[f64], xi: C64) -> C64 {
    coeffs_from_one.iter().rev().fold(C64::zero(), |acc, &c| (acc + c) * xi)
}

fn guarded_pow(xi: C64, p: i32) -> Result<C64> {
    let d = xi - 12.0;
    if d.norm() <= POLE_GUARD * 12.0 {
        return Err(Error::PoleOfOracle);
    }
    Ok(d.powi(p))
}

pub fn p1_oracle(kind: P1Oracle) -> Result<C64> {
    match kind {
        P1Oracle::H0(xi) => Ok(xi * 144.0 / guarded_pow(xi, 2)?),
        P1Oracle::H1(xi) => Ok(poly(&P1_H1_NUMERATOR, xi) / guarded_pow(xi, 3)?),
        P1Oracle::H2(xi) => Ok(poly(&P1_H2_NUMERATOR, xi) / guarded_pow(xi, 4)?),
        P1Oracle::XiSRefined(x) => Ok(r(12.0) + x.inv() * P1_POLE_SHIFT),
        P1Oracle::PoleZ { c, n } => {
            let i = C64::new(0.0, 1.0);
            let ln = (i * PI * c * c * n / 72.0).ln() / (5.0 * PI);
            let lead = -(i * 60.0 * PI).powf(0.8) / 24.0;
            let corr = r(n.powf(0.8)) + i * ln * n.powf(-0.2)
                + (ln * ln / 8.0 - ln / (4.0 * PI) + 109.0 / (600.0 * PI * PI)) * n.powf(-1.2);
            Ok(lead * corr)
        }
        P1Oracle::XiCondition(z) => {
            let w = -z * 24.0;
            if w.is_zero() {
                return Err(Error::PoleOfOracle);
            }
            Ok(r(12.0) + w.powf(-1.25) * 327.0)
        }
        P1Oracle::SecondArrayOffset { x_s, n } => {
            if x_s.is_zero() {
                return Err(Error::PoleOfOracle);
            }
            Ok(-x_s.ln() + C64::new(0.0, (2 * n + 1) as f64 * PI) - r(60.0f64.ln()))
        }
    }
}

/// `ω₀ = 1/2 + i√3/6`; `3F² + 3F + 1 = 3(F + ω₀)(F + ω̄₀)`.
pub const ABEL_OMEGA0: C64 = C64::new(0.5, 0.288_675_134_594_812_9);
/// `θ = 1/2 + i√3/2`, the residue exponent of the implicit solution.
pub const ABEL_THETA: C64 = C64::new(0.5, 0.866_025_403_784_438_6);

/// Singular set `ξ_p = (−1)^{p₁} ξ₀ e^{p₂π√3}` of the Abel `F₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbelGeometry {
    pub xi0: f64,
    /// `e^{π√3}`, the ratio of neighbouring lattice points.
    pub generator: f64,
}

impl Default for AbelGeometry {
    fn default() -> Self {
        let s3 = 3f64.sqrt();
        Self { xi0: (-PI * s3 / 6.0).exp() / s3, generator: (PI * s3).exp() }
    }
}

impl AbelGeometry {
    pub fn xi(&self, p1: i32, p2: i32) -> f64 {
        let sign = if p1.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        sign * self.xi0 * self.generator.powi(p2)
    }

    /// End of the negative first-sheet cut, the limit of `ξ(F₀)` as `F₀ → −∞`,
    /// computed from the implicit solution at growing `|F₀|`.
    pub fn xi1(&self) -> C64 {
        let mut prev = xi_of_f0(r(-1e6), (0, 0));
        for e in 7..=12 {
            let next = xi_of_f0(r(-(10f64.powi(e))), (0, 0));
            if (next - prev).norm() <= 1e-10 * next.norm() {
                return next;
            }
            prev = next;
        }
        prev
    }

    /// Description of the first-sheet cuts in the ξ-plane.
    pub fn first_sheet_cuts(&self) -> ((f64, f64), (f64, f64)) {
        ((f64::NEG_INFINITY, self.xi1().re), (self.xi0, f64::INFINITY))
    }
}

/// `ξ(F) = ξ₀ F (F + ω₀)^{−θ} (F + ω̄₀)^{−θ̄}` with the logarithms shifted by
/// `2πi·winding` around `−ω₀` and `−ω̄₀`. Normalized so that `ξ/F → 1` at 0.
pub fn xi_of_f0(f: C64, winding: (i32, i32)) -> C64 {
    let k = AbelGeometry::default().xi0;
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let l1 = (f + ABEL_OMEGA0).ln() + two_pi_i * winding.0 as f64;
    let l2 = (f + ABEL_OMEGA0.conj()).ln() + two_pi_i * winding.1 as f64;
    f * k * (-ABEL_THETA * l1 - ABEL_THETA.conj() * l2).exp()
}

/// `F₀(ξ)` on the principal sheet: Taylor or continuation seed, Newton polish.
pub fn f0_of_xi(xi: C64, sheet: (i32, i32)) -> Result<C64> {
    if sheet != (0, 0) {
        return Err(Error::SheetUnreachable);
    }
    if xi.is_zero() {
        return Ok(C64::zero());
    }
    let (s, _) = builtin("abel")?;
    let near = 0.05;
    let seed = if xi.norm() <= near {
        solve_f0(&s, 64)?[0].eval(xi)
    } else {
        let start = xi * (near / xi.norm());
        let t = continue_f0(&s, &[start, xi], &ContinuationOptions::default())?;
        t.end_state()[0]
    };
    let mut f = seed;
    for _ in 0..50 {
        let v = xi_of_f0(f, sheet);
        let dv = v / (f * (r(1.0) + f * 3.0 + f * f * 3.0));
        let step = (v - xi) / dv;
        f -= step;
        if step.norm() <= 1e-14 * (1.0 + f.norm()) {
            return Ok(f);
        }
    }
    Err(Error::NewtonDiverged { n: 0 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AbelOracle {
    XiOfF0 { f0: C64, winding: (i32, i32) },
    F0OfXi { xi: C64, sheet: (i32, i32) },
    XiSet { p1: i32, p2: i32 },
    /// `±√(−1/2) (z − z₀)^{−1/2}`, the sign selecting the branch.
    LocalBranch { z: C64, z0: C64, sign: f64 },
    /// `(dX, dY)` packed as `dX + i dY` for the flow `dF/dt = F + 3F² + 3F³`.
    PhaseField { x: f64, y: f64 },
}

pub fn abel_oracle(kind: AbelOracle) -> Result<C64> {
    match kind {
        AbelOracle::XiOfF0 { f0, winding } => Ok(xi_of_f0(f0, winding)),
        AbelOracle::F0OfXi { xi, sheet } => f0_of_xi(xi, sheet),
        AbelOracle::XiSet { p1, p2 } => Ok(r(AbelGeometry::default().xi(p1, p2))),
        AbelOracle::LocalBranch { z, z0, sign } => {
            let d = z - z0;
            if d.is_zero() {
                return Err(Error::PoleOfOracle);
            }
            Ok(C64::new(0.0, sign * 0.5f64.sqrt()) / d.sqrt())
        }
        AbelOracle::PhaseField { x, y } => {
            let f = C64::new(x, y);
            Ok(f + f * f * 3.0 + f * f * f * 3.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum P2Oracle {
    /// `ξ / (1 − ξ²/9)`.
    F0A(C64),
    /// `2ξ(1 + Bξ)/(ξ² + 2)` with `B² = −1/2`.
    F0B { xi: C64, b: C64 },
}

pub fn p2_oracle(kind: P2Oracle) -> Result<C64> {
    match kind {
        P2Oracle::F0A(xi) => {
            let d = r(1.0) - xi * xi / 9.0;
            if d.norm() <= POLE_GUARD {
                return Err(Error::PoleOfOracle);
            }
            Ok(xi / d)
        }
        P2Oracle::F0B { xi, b } => {
            let d = xi * xi + 2.0;
            if d.norm() <= POLE_GUARD {
                return Err(Error::PoleOfOracle);
            }
            Ok(xi * 2.0 * (r(1.0) + b * xi) / d)
        }
    }
}
