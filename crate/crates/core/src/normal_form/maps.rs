//! Closed-form changes of variables between the original equations and the
//! normal forms. `forward` goes original → normal, `inverse` normal → original.
//!
//! Fractional powers are principal; `branch_choice` rotates the root taken in
//! the inverse direction by the corresponding root of unity.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapKind {
    Identity,
    /// `u' = u³ − z`, `x = −(9/5) z^{5/3}`, `u = 3 z^{1/3} (y + 1/3 − 1/(15x))`.
    Abel,
    /// `y'' = 6y² + z`, `x = (−24z)^{5/4}/30`, `y = sqrt(−z/6)(1 − 4/(25x²) + h)`.
    P1,
    /// `y'' = 2y³ + xy + ν`, `x = (3t/2)^{2/3}`, `y = (t h − ν)/x`.
    P2a { nu: f64 },
    /// `y'' = 2y³ + xy + ν`, `x = (At)^{2/3}`, `y = (At)^{1/3}(w − B + ν/(2At))`.
    P2b { nu: f64, a: C64, b: C64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapDirection {
    Forward,
    Inverse,
}

/// Independent variable and state vector. For second-order originals the state
/// is `(y, dy/dvar)`; on the normal side it is the diagonal pair `(v₁, v₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MapPoint {
    pub t: C64,
    pub y: Vec<C64>,
}

impl MapPoint {
    pub fn new(t: C64, y: Vec<C64>) -> Self {
        Self { t, y }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateMap {
    pub label: String,
    pub kind: MapKind,
    pub branch_choice: i32,
}

fn r(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn root(v: C64, q: f64, winding: i32) -> Result<C64> {
    if v.is_zero() || !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::OnBranchCut);
    }
    let rot = C64::from_polar(1.0, 2.0 * PI * winding as f64 / q);
    Ok(v.powf(1.0 / q) * rot)
}

fn diag(h: C64, hp: C64) -> Vec<C64> {
    vec![(h - hp) * 0.5, (h + hp) * 0.5]
}

fn undiag(v: &[C64]) -> (C64, C64) {
    (v[0] + v[1], v[1] - v[0])
}

impl CoordinateMap {
    pub fn new(label: &str, kind: MapKind, branch_choice: i32) -> Self {
        Self { label: String::from(label), kind, branch_choice }
    }

    pub fn identity() -> Self {
        Self::new("identity", MapKind::Identity, 0)
    }

    pub fn apply(&self, direction: MapDirection, p: &MapPoint) -> Result<MapPoint> {
        match direction {
            MapDirection::Forward => self.forward(p),
            MapDirection::Inverse => self.inverse(p),
        }
    }

    pub fn forward(&self, p: &MapPoint) -> Result<MapPoint> {
        let t = p.t;
        match self.kind {
            MapKind::Identity => Ok(p.clone()),
            MapKind::Abel => {
                let w = root(t, 3.0, 0)?;
                let x = -w.powu(5) * 1.8;
                let h = p.y[0] / (w * 3.0);
                Ok(MapPoint::new(x, vec![h - 1.0 / 3.0 + (x * 15.0).inv()]))
            }
            MapKind::P1 => {
                let zeta = root(-t * 24.0, 4.0, 0)?;
                let x = zeta.powu(5) / 30.0;
                let (y, yz) = (p.y[0], p.y[1]);
                let big_y = y * 12.0 / (zeta * zeta);
                let big_yx = -(yz * 12.0 / zeta.powu(3) + y * 144.0 / zeta.powu(7));
                let h = big_y - 1.0 + (x * x * 25.0).inv() * 4.0;
                let hx = big_yx - (x.powu(3) * 25.0).inv() * 8.0;
                Ok(MapPoint::new(x, diag(h, hx)))
            }
            MapKind::P2a { nu } => {
                let sigma = root(t, 2.0, 0)?;
                let tt = sigma.powu(3) * (2.0 / 3.0);
                let (y, yx) = (p.y[0], p.y[1]);
                let h = (t * y + nu) / tt;
                let ht = (y + t * yx) / (sigma * tt) - h / tt;
                Ok(MapPoint::new(tt, diag(h, ht)))
            }
            MapKind::P2b { nu, a, b } => {
                let sigma = root(t, 2.0, 0)?;
                let tt = sigma.powu(3) / a;
                let (y, yx) = (p.y[0], p.y[1]);
                let w_big = y / sigma;
                let w = w_big + b - r(nu) / (sigma.powu(3) * 2.0);
                let yt = yx * a * (2.0 / 3.0) / sigma;
                let w_big_t = yt / sigma - a / 3.0 * y / sigma.powu(4);
                let wt = w_big_t + a * (nu / 2.0) / sigma.powu(6);
                Ok(MapPoint::new(tt, diag(w, wt)))
            }
        }
    }

    pub fn inverse(&self, p: &MapPoint) -> Result<MapPoint> {
        let x = p.t;
        let b_ix = self.branch_choice;
        match self.kind {
            MapKind::Identity => Ok(p.clone()),
            MapKind::Abel => {
                let w = root(x * (5.0 / 9.0), 5.0, b_ix)? * C64::from_polar(1.0, PI / 5.0);
                let z = w.powu(3);
                let h = p.y[0] + 1.0 / 3.0 - (x * 15.0).inv();
                Ok(MapPoint::new(z, vec![w * h * 3.0]))
            }
            MapKind::P1 => {
                let zeta = root(x * 30.0, 5.0, b_ix)?;
                let z = -zeta.powu(4) / 24.0;
                let (h, hx) = undiag(&p.y);
                let big_y = r(1.0) - (x * x * 25.0).inv() * 4.0 + h;
                let big_yx = hx + (x.powu(3) * 25.0).inv() * 8.0;
                let y = zeta * zeta * big_y / 12.0;
                let yz = -big_y / (zeta * zeta) - zeta.powu(3) * big_yx / 12.0;
                Ok(MapPoint::new(z, vec![y, yz]))
            }
            MapKind::P2a { nu } => {
                let sigma = root(x * 1.5, 3.0, b_ix)?;
                let xo = sigma * sigma;
                let (h, ht) = undiag(&p.y);
                let y = (x * h - nu) / xo;
                let yx = (h + x * ht) / sigma - (x * h - nu) / (xo * xo);
                Ok(MapPoint::new(xo, vec![y, yx]))
            }
            MapKind::P2b { nu, a, b } => {
                let sigma = root(a * x, 3.0, b_ix)?;
                let xo = sigma * sigma;
                let (w, wt) = undiag(&p.y);
                let w_big = w - b + r(nu) / (sigma.powu(3) * 2.0);
                let y = sigma * w_big;
                let w_big_t = wt - a * (nu / 2.0) / sigma.powu(6);
                let yt = a / 3.0 / (sigma * sigma) * w_big + sigma * w_big_t;
                let yx = yt * sigma * 1.5 / a;
                Ok(MapPoint::new(xo, vec![y, yx]))
            }
        }
    }

    /// Whether an original-side independent variable lies in the sector where
    /// `inverse ∘ forward` is the identity for `branch_choice = 0`.
    pub fn in_test_domain(&self, t: C64) -> bool {
        if t.is_zero() {
            return false;
        }
        let a = t.arg();
        match self.kind {
            MapKind::Identity => true,
            MapKind::Abel => a > 0.0,
            MapKind::P1 => (-t).arg().abs() < 0.8 * PI,
            MapKind::P2a { .. } | MapKind::P2b { .. } => a.abs() < 2.0 * PI / 3.0,
        }
    }

    /// Right-hand side of the original equation as a first-order system.
    pub fn original_rhs(&self, t: C64, y: &[C64]) -> Vec<C64> {
        match self.kind {
            MapKind::Identity => y.to_vec(),
            MapKind::Abel => vec![y[0].powu(3) - t],
            MapKind::P1 => vec![y[1], y[0] * y[0] * 6.0 + t],
            MapKind::P2a { nu } | MapKind::P2b { nu, .. } => {
                vec![y[1], y[0].powu(3) * 2.0 + t * y[0] + nu]
            }
        }
    }
}

/// Convenience wrapper over [`CoordinateMap::apply`].
pub fn map_point(m: &CoordinateMap, direction: MapDirection, value: &MapPoint) -> Result<MapPoint> {
    m.apply(direction, value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::builtin;

    #[test]
    fn abel_negative_axis() {
        let (_, m) = builtin("abel").unwrap();
        let p = MapPoint::new(r(-1.0), vec![r(0.3)]);
        let f = m.forward(&p).unwrap();
        assert!((f.t.norm() - 1.8).abs() < 1e-13);
        let back = m.inverse(&f).unwrap();
        assert!((back.t - r(-1.0)).norm() < 1e-12);
        assert!((back.y[0] - r(0.3)).norm() < 1e-12);
    }

    #[test]
    fn p1_negative_axis_maps_to_positive_real() {
        let (_, m) = builtin("p1").unwrap();
        let f = m.forward(&MapPoint::new(r(-3.7), vec![r(0.8), r(0.1)])).unwrap();
        assert!(f.t.re > 0.0 && f.t.im.abs() < 1e-13 * f.t.re);
    }

    #[test]
    fn identity_is_identity() {
        let m = CoordinateMap::identity();
        let p = MapPoint::new(C64::new(1.0, 2.0), vec![C64::new(3.0, 4.0)]);
        assert_eq!(map_point(&m, MapDirection::Forward, &p).unwrap(), p);
    }

    #[test]
    fn branch_point_rejected() {
        let (_, m) = builtin("p1").unwrap();
        assert!(matches!(m.forward(&MapPoint::new(r(0.0), vec![r(1.0), r(0.0)])), Err(Error::OnBranchCut)));
    }
}
