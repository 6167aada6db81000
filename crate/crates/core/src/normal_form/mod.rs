//! Normalized systems `y' = −Λ̂y + x^{-1}Ây + g(1/x, y)`, assumption
//! diagnostics and the Stokes/antistokes geometry of the exponentials.

mod builtins;
mod maps;

pub use builtins::{builtin, parse_label, BuiltinLabel};
pub use maps::{map_point, CoordinateMap, MapDirection, MapKind, MapPoint};

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::series::{AnalyticGerm, Monomial};
use crate::C64;

/// Diagonal normal form with a vector germ and a linear observable.
///
/// The observable `o` selects the scalar quantity used by scalar diagnostics
/// (Gevrey norms, radius estimates, pole fits): `o · y`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalSystem {
    label: String,
    lambda: Vec<C64>,
    alpha: Vec<C64>,
    g: Vec<AnalyticGerm>,
    observable: Vec<C64>,
}

impl NormalSystem {
    pub fn new(
        label: impl Into<String>,
        lambda: Vec<C64>,
        alpha: Vec<C64>,
        g: Vec<AnalyticGerm>,
        observable: Vec<C64>,
    ) -> Result<Self> {
        let n = lambda.len();
        if n == 0 {
            return Err(Error::InvalidInput("system dimension must be positive"));
        }
        if alpha.len() != n || g.len() != n || observable.len() != n {
            return Err(Error::InvalidInput("lambda, alpha, g and observable lengths differ"));
        }
        if let Some(bad) = g.iter().find(|gi| gi.dims() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: bad.dims() });
        }
        Ok(Self { label: label.into(), lambda, alpha, g, observable })
    }

    /// System whose observable is the first component.
    pub fn with_first_component(
        label: impl Into<String>,
        lambda: Vec<C64>,
        alpha: Vec<C64>,
        g: Vec<AnalyticGerm>,
    ) -> Result<Self> {
        let mut o = vec![C64::zero(); lambda.len()];
        if let Some(first) = o.first_mut() {
            *first = C64::new(1.0, 0.0);
        }
        Self::new(label, lambda, alpha, g, o)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[C64] {
        &self.lambda
    }

    pub fn alpha(&self) -> &[C64] {
        &self.alpha
    }

    pub fn alpha1(&self) -> C64 {
        self.alpha[0]
    }

    pub fn g(&self) -> &[AnalyticGerm] {
        &self.g
    }

    pub fn observable(&self) -> &[C64] {
        &self.observable
    }

    pub fn observe(&self, y: &[C64]) -> C64 {
        self.observable.iter().zip(y).map(|(o, v)| o * v).sum()
    }

    /// Right-hand side `f(x, y)`.
    pub fn rhs(&self, x: C64, y: &[C64], out: &mut [C64]) {
        let z = x.inv();
        for j in 0..self.n() {
            out[j] = -self.lambda[j] * y[j] + self.alpha[j] * y[j] * z + self.g[j].eval(z, y);
        }
    }

    pub fn rhs_vec(&self, x: C64, y: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::zero(); self.n()];
        self.rhs(x, y, &mut out);
        out
    }
}

/// A near-resonance `k·λ ≈ λ_j` with `|k| ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Resonance {
    pub k: Vec<u32>,
    pub j: usize,
    pub gap: f64,
}

/// Findings of [`validate_system`]. Diagnostics only; nothing is rejected.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiagnosticsReport {
    pub order_violations: Vec<(usize, Monomial)>,
    pub resonances: Vec<Resonance>,
    /// Nonzero `m ∈ Z^n` with `m·λ ≈ 0`, sign-normalized.
    pub z_dependencies: Vec<Vec<i32>>,
    pub duplicate_args: Vec<(usize, usize)>,
    pub zero_lambdas: Vec<usize>,
    pub lambda1_normalized: bool,
}

impl DiagnosticsReport {
    pub fn is_clean(&self) -> bool {
        self.order_violations.is_empty()
            && self.resonances.is_empty()
            && self.z_dependencies.is_empty()
            && self.duplicate_args.is_empty()
            && self.zero_lambdas.is_empty()
            && self.lambda1_normalized
    }
}

const LATTICE_TOL: f64 = 1e-10;

/// All `k ∈ N^n` with `|k| ≤ k_max`, in lexicographic order.
pub fn multi_indices(n: usize, k_max: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            rec(pos + 1, left - v, cur, out);
        }
        cur[pos] = 0;
    }
    rec(0, k_max, &mut cur, &mut out);
    out
}

fn dot(k: &[u32], lambda: &[C64]) -> C64 {
    k.iter().zip(lambda).map(|(&a, &l)| l * a as f64).sum()
}

/// Order condition, near-resonances and argument separation, searched up to `|k| ≤ k_max`.
pub fn validate_system(s: &NormalSystem, k_max: u32) -> DiagnosticsReport {
    let n = s.n();
    let mut report = DiagnosticsReport {
        lambda1_normalized: (s.lambda[0] - C64::new(1.0, 0.0)).norm() < LATTICE_TOL,
        ..Default::default()
    };
    for (j, gj) in s.g.iter().enumerate() {
        for m in gj.order_violations() {
            report.order_violations.push((j, m));
        }
    }
    for (j, l) in s.lambda.iter().enumerate() {
        if l.norm() < LATTICE_TOL {
            report.zero_lambdas.push(j);
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            let la = s.lambda[a];
            let lb = s.lambda[b];
            if la.norm() < LATTICE_TOL || lb.norm() < LATTICE_TOL {
                continue;
            }
            let d = (la.arg() - lb.arg()).abs();
            if d < LATTICE_TOL || (2.0 * PI - d).abs() < LATTICE_TOL {
                report.duplicate_args.push((a, b));
            }
        }
    }
    for k in multi_indices(n, k_max) {
        if k.iter().sum::<u32>() < 2 {
            continue;
        }
        let kl = dot(&k, &s.lambda);
        for j in 0..n {
            let gap = (kl - s.lambda[j]).norm();
            if gap < LATTICE_TOL {
                report.resonances.push(Resonance { k: k.clone(), j, gap });
            }
        }
    }
    for m in signed_indices(n, k_max) {
        let v: C64 = m.iter().zip(&s.lambda).map(|(&a, &l)| l * a as f64).sum();
        if v.norm() < LATTICE_TOL {
            report.z_dependencies.push(m);
        }
    }
    report
}

/// Nonzero `m ∈ Z^n`, `|m|₁ ≤ k_max`, first nonzero entry positive.
fn signed_indices(n: usize, k_max: u32) -> Vec<Vec<i32>> {
    let mut out = Vec::new();
    for k in multi_indices(n, k_max) {
        let support: Vec<usize> = (0..n).filter(|&i| k[i] > 0).collect();
        if support.is_empty() {
            continue;
        }
        let free = support.len() - 1;
        for mask in 0..(1u32 << free) {
            let mut m: Vec<i32> = k.iter().map(|&v| v as i32).collect();
            for (bit, &idx) in support.iter().skip(1).enumerate() {
                if mask & (1 << bit) != 0 {
                    m[idx] = -m[idx];
                }
            }
            out.push(m);
        }
    }
    out
}

/// A point `p_{j,k} = λ_j − k·λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesPoint {
    pub j: usize,
    pub k: Vec<u32>,
    pub p: C64,
}

/// Distinct nonzero points `p_{j,k}` and the induced directions in the x-plane,
/// as angles in `(−π, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesData {
    pub points: Vec<StokesPoint>,
    /// Rays where `e^{−p x}` is real and decaying: `arg x = −arg p`.
    pub stokes: Vec<f64>,
    /// Rays `± i·conj(λ_j)·R₊` where `e^{−λ_j x}` oscillates.
    pub antistokes: Vec<f64>,
}

impl StokesData {
    pub fn values(&self) -> Vec<C64> {
        self.points.iter().map(|p| p.p).collect()
    }
}

fn normalize_angle(a: f64) -> f64 {
    let mut t = a % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

fn push_direction(list: &mut Vec<f64>, a: f64) {
    let a = normalize_angle(a);
    let close = |b: &f64| {
        let d = (a - b).abs();
        d < 1e-12 || (2.0 * PI - d).abs() < 1e-12
    };
    if !list.iter().any(close) {
        list.push(a);
    }
}

pub fn stokes_directions(s: &NormalSystem, k_max: u32) -> StokesData {
    let n = s.n();
    let mut points: Vec<StokesPoint> = Vec::new();
    for j in 0..n {
        for k in multi_indices(n, k_max) {
            let p = s.lambda[j] - dot(&k, &s.lambda);
            if p.norm() < LATTICE_TOL {
                continue;
            }
            if points.iter().any(|q| (q.p - p).norm() < LATTICE_TOL) {
                continue;
            }
            points.push(StokesPoint { j, k, p });
        }
    }
    let mut stokes = Vec::new();
    for p in &points {
        push_direction(&mut stokes, -p.p.arg());
    }
    let mut antistokes = Vec::new();
    for l in &s.lambda {
        if l.norm() < LATTICE_TOL {
            continue;
        }
        let base = (C64::i() * l.conj()).arg();
        push_direction(&mut antistokes, base);
        push_direction(&mut antistokes, base + PI);
    }
    stokes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    antistokes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    StokesData { points, stokes, antistokes }
}
