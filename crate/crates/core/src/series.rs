//! Dense truncated power series in one variable, series in 1/x, and sparse
//! analytic germs g(z, y) with their composition.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

// inherent on f64 whenever std is part of the build
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::C64;

/// Truncated Taylor series `c_0 + c_1 ξ + ... + c_K ξ^K`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries {
    coeffs: Vec<C64>,
}

impl TaylorSeries {
    /// Series from coefficients; the truncation order is `coeffs.len() - 1`.
    ///
    /// # Panics
    /// Panics if `coeffs` is empty.
    pub fn new(coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty(), "a series carries at least c_0");
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zeros(order: usize) -> Self {
        Self { coeffs: vec![C64::zero(); order + 1] }
    }

    pub fn constant(c: C64, order: usize) -> Self {
        let mut s = Self::zeros(order);
        s.coeffs[0] = c;
        s
    }

    /// The series of the variable itself, `ξ`.
    pub fn variable(order: usize) -> Self {
        let mut s = Self::zeros(order);
        if order >= 1 {
            s.coeffs[1] = C64::new(1.0, 0.0);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// Coefficient of `ξ^k`, zero past the truncation order.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_else(C64::zero)
    }

    /// Drops coefficients above `order`. Never extends.
    pub fn truncated(&self, order: usize) -> Self {
        let k = order.min(self.order());
        Self { coeffs: self.coeffs[..=k].to_vec() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| c * s).collect() }
    }

    /// Horner evaluation at `xi`.
    pub fn eval(&self, xi: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::zero(), |acc, &c| acc * xi + c)
    }

    /// Value and first derivative at `xi`.
    pub fn eval_with_derivative(&self, xi: C64) -> (C64, C64) {
        let mut v = C64::zero();
        let mut d = C64::zero();
        for &c in self.coeffs.iter().rev() {
            d = d * xi + v;
            v = v * xi + c;
        }
        (v, d)
    }

    /// `ξ F'(ξ)`, same truncation order.
    pub fn euler_derivative(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c * k as f64)
                .collect(),
        }
    }

    /// `F'(ξ)`, truncation order drops by one (order 0 stays order 0).
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zeros(0);
        }
        Self {
            coeffs: (1..=self.order()).map(|k| self.coeffs[k] * k as f64).collect(),
        }
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul_series(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        let mut out = vec![C64::zero(); k + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(k + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(k + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    pub fn add_series(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        Self {
            coeffs: (0..=k).map(|i| self.coeffs[i] + other.coeffs[i]).collect(),
        }
    }

    pub fn sub_series(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        Self {
            coeffs: (0..=k).map(|i| self.coeffs[i] - other.coeffs[i]).collect(),
        }
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, p: u32) -> Self {
        let mut result = Self::constant(C64::new(1.0, 0.0), self.order());
        let mut base = self.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_series(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_series(&base);
            }
        }
        result
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::NotInvertible);
        }
        let k = self.order();
        let inv0 = c0.inv();
        let mut out = vec![C64::zero(); k + 1];
        out[0] = inv0;
        for n in 1..=k {
            let mut acc = C64::zero();
            for j in 1..=n {
                acc += self.coeffs[j] * out[n - j];
            }
            out[n] = -acc * inv0;
        }
        Ok(Self { coeffs: out })
    }

    pub fn div_series(&self, other: &Self) -> Result<Self> {
        Ok(self.mul_series(&other.recip()?))
    }

    /// Divides by `ξ`; the constant term must vanish. Order drops by one.
    pub fn div_by_variable(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NotInvertible);
        }
        if self.order() == 0 {
            return Ok(Self::zeros(0));
        }
        Ok(Self { coeffs: self.coeffs[1..].to_vec() })
    }

    /// Multiplies by `ξ^p`, keeping the truncation order.
    pub fn shift_up(&self, p: usize) -> Self {
        let k = self.order();
        let mut out = vec![C64::zero(); k + 1];
        for i in 0..=k.saturating_sub(p) {
            if i + p <= k {
                out[i + p] = self.coeffs[i];
            }
        }
        Self { coeffs: out }
    }
}

impl Add for &TaylorSeries {
    type Output = TaylorSeries;
    fn add(self, rhs: Self) -> TaylorSeries {
        self.add_series(rhs)
    }
}

impl Sub for &TaylorSeries {
    type Output = TaylorSeries;
    fn sub(self, rhs: Self) -> TaylorSeries {
        self.sub_series(rhs)
    }
}

impl Mul for &TaylorSeries {
    type Output = TaylorSeries;
    fn mul(self, rhs: Self) -> TaylorSeries {
        self.mul_series(rhs)
    }
}

impl Neg for &TaylorSeries {
    type Output = TaylorSeries;
    fn neg(self) -> TaylorSeries {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// Series `Σ_{r = r_min}^{R} c_r x^{-r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvXSeries {
    r_min: usize,
    coeffs: Vec<C64>,
}

impl InvXSeries {
    /// `coeffs[j]` multiplies `x^{-(r_min + j)}`.
    pub fn new(r_min: usize, coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty());
        Self { r_min, coeffs }
    }

    pub fn r_min(&self) -> usize {
        self.r_min
    }

    pub fn order(&self) -> usize {
        self.r_min + self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `x^{-r}`, zero outside the stored range.
    pub fn coeff(&self, r: usize) -> C64 {
        if r < self.r_min {
            return C64::zero();
        }
        self.coeffs.get(r - self.r_min).copied().unwrap_or_else(C64::zero)
    }

    /// Partial sum over `r ≤ upto`.
    pub fn eval_partial(&self, x: C64, upto: usize) -> C64 {
        let z = x.inv();
        let top = upto.min(self.order());
        if top < self.r_min {
            return C64::zero();
        }
        let mut acc = C64::zero();
        for r in (self.r_min..=top).rev() {
            acc = acc * z + self.coeff(r);
        }
        acc * z.powu(self.r_min as u32)
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.eval_partial(x, self.order())
    }

    /// Index of the smallest term `|c_r x^{-r}|` over the stored range.
    pub fn least_term_index(&self, x_abs: f64) -> usize {
        let mut best = self.r_min;
        let mut best_val = f64::INFINITY;
        let mut pow = x_abs.powi(-(self.r_min as i32));
        for (j, c) in self.coeffs.iter().enumerate() {
            let v = c.norm() * pow;
            if v > 0.0 && v < best_val {
                best_val = v;
                best = self.r_min + j;
            }
            pow /= x_abs;
        }
        best
    }
}

/// Exponent data of a germ monomial `z^i y^k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub i: u32,
    pub k: Vec<u32>,
}

impl Monomial {
    pub fn new(i: u32, k: Vec<u32>) -> Self {
        Self { i, k }
    }

    pub fn y_degree(&self) -> u32 {
        self.k.iter().sum()
    }

    pub fn total_degree(&self) -> u32 {
        self.i + self.y_degree()
    }

    /// Monomials a normalized system may not contain: `z^0, z^1` and `y_j` alone.
    pub fn violates_order_condition(&self) -> bool {
        let ky = self.y_degree();
        (self.i <= 1 && ky == 0) || (self.i == 0 && ky == 1)
    }
}

/// Scalar germ `g(z, y) = Σ g_{i,k} z^i y^k` of total degree at most `degree_cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticGerm {
    dims: usize,
    degree_cap: u32,
    terms: BTreeMap<Monomial, C64>,
}

pub const DEFAULT_DEGREE_CAP: u32 = 12;

impl AnalyticGerm {
    pub fn new(dims: usize, degree_cap: u32) -> Self {
        Self { dims, degree_cap, terms: BTreeMap::new() }
    }

    pub fn zero(dims: usize) -> Self {
        Self::new(dims, DEFAULT_DEGREE_CAP)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Accumulates `c z^i y^k`; exact zeros are dropped.
    pub fn add_term(&mut self, i: u32, k: Vec<u32>, c: C64) -> Result<()> {
        if k.len() != self.dims {
            return Err(Error::DimensionMismatch { expected: self.dims, got: k.len() });
        }
        let m = Monomial::new(i, k);
        let degree = m.total_degree();
        if degree > self.degree_cap {
            return Err(Error::DegreeCapExceeded { degree, cap: self.degree_cap });
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(C64::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
        Ok(())
    }

    pub fn with_term(mut self, i: u32, k: &[u32], c: f64) -> Result<Self> {
        self.add_term(i, k.to_vec(), C64::new(c, 0.0))?;
        Ok(self)
    }

    pub fn coeff(&self, i: u32, k: &[u32]) -> C64 {
        self.terms
            .get(&Monomial::new(i, k.to_vec()))
            .copied()
            .unwrap_or_else(C64::zero)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    pub fn max_z_power(&self) -> u32 {
        self.terms.keys().map(|m| m.i).max().unwrap_or(0)
    }

    pub fn order_violations(&self) -> Vec<Monomial> {
        self.terms
            .keys()
            .filter(|m| m.violates_order_condition())
            .cloned()
            .collect()
    }

    /// `∂g/∂y_j` as a germ.
    pub fn partial_y(&self, j: usize) -> Self {
        let mut out = Self::new(self.dims, self.degree_cap);
        for (m, &c) in &self.terms {
            if m.k[j] == 0 {
                continue;
            }
            let mut k = m.k.clone();
            let p = k[j];
            k[j] -= 1;
            out.terms.insert(Monomial::new(m.i, k), c * p as f64);
        }
        out
    }

    /// Pointwise value `g(z, y)`.
    pub fn eval(&self, z: C64, y: &[C64]) -> C64 {
        let mut acc = C64::zero();
        for (m, &c) in &self.terms {
            let mut t = c * z.powu(m.i);
            for (yj, &kj) in y.iter().zip(&m.k) {
                if kj > 0 {
                    t *= yj.powu(kj);
                }
            }
            acc += t;
        }
        acc
    }

    /// Coefficient-exact composition `g(z_arg(ξ), y_args(ξ))`, truncated at the
    /// smallest argument order.
    pub fn compose(&self, z_arg: &TaylorSeries, y_args: &[TaylorSeries]) -> Result<TaylorSeries> {
        if y_args.len() != self.dims {
            return Err(Error::DimensionMismatch { expected: self.dims, got: y_args.len() });
        }
        let order = y_args
            .iter()
            .map(TaylorSeries::order)
            .chain(core::iter::once(z_arg.order()))
            .min()
            .unwrap_or(0);
        let mut acc = TaylorSeries::zeros(order);
        if self.terms.is_empty() {
            return Ok(acc);
        }
        let z_pow = powers(&z_arg.truncated(order), self.max_z_power());
        let y_pow: Vec<Vec<TaylorSeries>> = (0..self.dims)
            .map(|j| {
                let top = self.terms.keys().map(|m| m.k[j]).max().unwrap_or(0);
                powers(&y_args[j].truncated(order), top)
            })
            .collect();
        for (m, &c) in &self.terms {
            let degree = m.total_degree();
            if degree > self.degree_cap {
                return Err(Error::DegreeCapExceeded { degree, cap: self.degree_cap });
            }
            let mut t = z_pow[m.i as usize].clone();
            for (j, &kj) in m.k.iter().enumerate() {
                if kj > 0 {
                    t = t.mul_series(&y_pow[j][kj as usize]);
                }
            }
            for (a, b) in acc.coeffs.iter_mut().zip(t.coeffs.iter()) {
                *a += c * b;
            }
        }
        Ok(acc)
    }
}

fn powers(s: &TaylorSeries, top: u32) -> Vec<TaylorSeries> {
    let mut out = Vec::with_capacity(top as usize + 1);
    out.push(TaylorSeries::constant(C64::new(1.0, 0.0), s.order()));
    for p in 1..=top as usize {
        let next = out[p - 1].mul_series(s);
        out.push(next);
    }
    out
}

/// Composition of a vector germ with series arguments, one output per component.
pub fn germ_compose(
    g: &[AnalyticGerm],
    z_arg: &TaylorSeries,
    y_args: &[TaylorSeries],
) -> Result<Vec<TaylorSeries>> {
    g.iter().map(|gi| gi.compose(z_arg, y_args)).collect()
}

/// Polynomial in an auxiliary variable `z` whose coefficients are series in `ξ`:
/// `levels[j]` multiplies `z^j`, truncated at `z^{levels.len()-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedSeries {
    pub levels: Vec<TaylorSeries>,
}

impl GradedSeries {
    pub fn one(z_degree: usize, order: usize) -> Self {
        let mut levels = vec![TaylorSeries::zeros(order); z_degree + 1];
        levels[0] = TaylorSeries::constant(C64::new(1.0, 0.0), order);
        Self { levels }
    }

    pub fn z_degree(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.z_degree().min(other.z_degree());
        let order = self.levels[0].order().min(other.levels[0].order());
        let mut levels = vec![TaylorSeries::zeros(order); d + 1];
        for (a, la) in self.levels.iter().enumerate().take(d + 1) {
            if la.is_zero() {
                continue;
            }
            for (b, lb) in other.levels.iter().enumerate().take(d + 1 - a) {
                if lb.is_zero() {
                    continue;
                }
                let p = la.mul_series(lb);
                for (o, v) in levels[a + b].coeffs.iter_mut().zip(p.coeffs.iter()) {
                    *o += v;
                }
            }
        }
        Self { levels }
    }
}

/// `[z^m] g(z, Σ_j z^j Y_j(ξ))` for every component of a vector germ.
///
/// `ys[j]` holds the n-vector `Y_j`; levels missing from `ys` are zero.
pub fn graded_compose_level(
    g: &[AnalyticGerm],
    ys: &[Vec<TaylorSeries>],
    m: usize,
    order: usize,
) -> Result<Vec<TaylorSeries>> {
    let dims = g.first().map(AnalyticGerm::dims).unwrap_or(0);
    let mut comps: Vec<GradedSeries> = Vec::with_capacity(dims);
    for c in 0..dims {
        let levels = (0..=m)
            .map(|j| match ys.get(j) {
                Some(v) => v[c].truncated(order),
                None => TaylorSeries::zeros(order),
            })
            .map(|s| {
                if s.order() < order {
                    let mut coeffs = s.into_coeffs();
                    coeffs.resize(order + 1, C64::zero());
                    TaylorSeries::new(coeffs)
                } else {
                    s
                }
            })
            .collect();
        comps.push(GradedSeries { levels });
    }
    let mut cache: Vec<Vec<GradedSeries>> = comps
        .iter()
        .map(|s| vec![GradedSeries::one(m, order), s.clone()])
        .collect();
    let mut out = vec![TaylorSeries::zeros(order); g.len()];
    for (gi, germ) in g.iter().enumerate() {
        for (mono, &c) in germ.terms() {
            let i = mono.i as usize;
            if i > m {
                continue;
            }
            let mut prod: Option<GradedSeries> = None;
            for (j, &kj) in mono.k.iter().enumerate() {
                if kj == 0 {
                    continue;
                }
                while cache[j].len() <= kj as usize {
                    let next = cache[j].last().unwrap().mul(&comps[j]);
                    cache[j].push(next);
                }
                let f = &cache[j][kj as usize];
                prod = Some(match prod {
                    None => f.clone(),
                    Some(p) => p.mul(f),
                });
            }
            let need = m - i;
            let level = match &prod {
                None => {
                    if need == 0 {
                        TaylorSeries::constant(C64::new(1.0, 0.0), order)
                    } else {
                        continue;
                    }
                }
                Some(p) => p.levels[need].clone(),
            };
            for (o, v) in out[gi].coeffs.iter_mut().zip(level.coeffs.iter()) {
                *o += c * v;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn factorial_square_cubic() {
        let f: Vec<f64> = vec![1.0, 1.0, 2.0, 6.0];
        let a = TaylorSeries::from_real(&f);
        let p = &a * &a;
        assert_eq!(p.coeff(3), c(16.0));
    }

    #[test]
    fn difference_of_squares() {
        let a = TaylorSeries::from_real(&[1.0, 1.0, 0.0]);
        let b = TaylorSeries::from_real(&[1.0, -1.0, 0.0]);
        assert_eq!((&a * &b).coeffs(), &[c(1.0), c(0.0), c(-1.0)]);
    }

    #[test]
    fn truncation_is_min() {
        let a = TaylorSeries::from_real(&[1.0, 2.0, 3.0, 4.0]);
        let b = TaylorSeries::from_real(&[1.0, 1.0]);
        assert_eq!((&a * &b).order(), 1);
        assert_eq!((&a + &b).order(), 1);
    }

    #[test]
    fn recip_of_geometric() {
        let a = TaylorSeries::from_real(&[1.0, -1.0, 0.0, 0.0, 0.0]);
        let r = a.recip().unwrap();
        for k in 0..=4 {
            assert!((r.coeff(k) - c(1.0)).norm() < 1e-15);
        }
        assert!(TaylorSeries::variable(3).recip().is_err());
    }

    #[test]
    fn squaring_germ() {
        let g = AnalyticGerm::new(1, 12).with_term(0, &[2], 1.0).unwrap();
        let y = TaylorSeries::from_real(&[0.0, 1.0, 1.0, 0.0]);
        let out = g.compose(&TaylorSeries::zeros(3), &[y]).unwrap();
        assert_eq!(out.coeffs(), &[c(0.0), c(0.0), c(1.0), c(2.0)]);
    }

    #[test]
    fn constant_in_y_germ() {
        let g = AnalyticGerm::new(1, 12).with_term(2, &[0], 1.0).unwrap();
        let z = TaylorSeries::from_real(&[0.0, 3.0, 0.0, 0.0]);
        let out = g.compose(&z, &[TaylorSeries::from_real(&[0.5, 1.0, 0.0, 0.0])]).unwrap();
        assert_eq!(out.coeffs(), &[c(0.0), c(0.0), c(9.0), c(0.0)]);
    }

    #[test]
    fn degree_cap_enforced() {
        let err = AnalyticGerm::new(1, 3).with_term(2, &[2], 1.0);
        assert!(matches!(err, Err(Error::DegreeCapExceeded { degree: 4, cap: 3 })));
    }

    #[test]
    fn inv_x_partial_sum() {
        let s = InvXSeries::new(2, vec![c(1.0), c(2.0), c(3.0)]);
        let x = c(10.0);
        let v = s.eval_partial(x, 3);
        assert!((v - c(0.01 + 0.002)).norm() < 1e-15);
        assert_eq!(s.coeff(4), c(3.0));
        assert_eq!(s.coeff(1), c(0.0));
    }

    #[test]
    fn graded_level_matches_direct_expansion() {
        // g = z y^2 + y^3, Y(z) = Y0 + z Y1: [z^1] = Y0^2 + 3 Y0^2 Y1
        let g = vec![AnalyticGerm::new(1, 12)
            .with_term(1, &[2], 1.0)
            .unwrap()
            .with_term(0, &[3], 1.0)
            .unwrap()];
        let y0 = TaylorSeries::from_real(&[0.0, 1.0, 0.5, 0.0, 0.0]);
        let y1 = TaylorSeries::from_real(&[0.2, 0.0, 1.0, 0.0, 0.0]);
        let lvl = graded_compose_level(&g, &[vec![y0.clone()], vec![y1.clone()]], 1, 4).unwrap();
        let sq = &y0 * &y0;
        let expect = &sq + &(&sq * &y1).scale(c(3.0));
        for k in 0..=4 {
            assert!((lvl[0].coeff(k) - expect.coeff(k)).norm() < 1e-15);
        }
    }
}
