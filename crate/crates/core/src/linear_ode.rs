//! Coefficient-level solver for linear Euler-type systems `ξ F' = L(ξ) F + r(ξ)`.
//!
//! Order `k` reads `(k I − L_0) c_k = r_k + Σ_{j≥1} L_j c_{k−j}`. Orders where
//! `k I − L_0` is singular need a [`Seed`] pinning the resonant components;
//! the mismatch left in the pinned rows is reported instead of guessed.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::solve_with_fixed;
use crate::series::TaylorSeries;
use crate::C64;

/// Square matrix of series, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMatrix {
    n: usize,
    entries: Vec<TaylorSeries>,
}

impl SeriesMatrix {
    pub fn new(n: usize, entries: Vec<TaylorSeries>) -> Self {
        assert_eq!(entries.len(), n * n);
        Self { n, entries }
    }

    pub fn zeros(n: usize, order: usize) -> Self {
        Self { n, entries: vec![TaylorSeries::zeros(order); n * n] }
    }

    /// Constant diagonal matrix.
    pub fn diagonal(d: &[C64], order: usize) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, order);
        for (i, &v) in d.iter().enumerate() {
            m.entries[i * n + i] = TaylorSeries::constant(v, order);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &TaylorSeries {
        &self.entries[i * self.n + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut TaylorSeries {
        &mut self.entries[i * self.n + j]
    }

    pub fn order(&self) -> usize {
        self.entries.iter().map(TaylorSeries::order).min().unwrap_or(0)
    }

    /// Matrix–vector product of series.
    pub fn apply(&self, v: &[TaylorSeries]) -> Vec<TaylorSeries> {
        (0..self.n)
            .map(|i| {
                let mut acc = TaylorSeries::zeros(self.order().min(v[0].order()));
                for (j, vj) in v.iter().enumerate() {
                    acc = &acc + &(self.entry(i, j) * vj);
                }
                acc
            })
            .collect()
    }

    fn coeff_matrix(&self, k: usize) -> Vec<C64> {
        self.entries.iter().map(|s| s.coeff(k)).collect()
    }
}

/// Pins component `component` of the order-`order` coefficient to `value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seed {
    pub order: usize,
    pub component: usize,
    pub value: C64,
}

/// Solution together with the mismatch of each seeded order.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub f: Vec<TaylorSeries>,
    /// `(order, b − (kI − L_0)c_k)` for every seeded order.
    pub residuals: Vec<(usize, Vec<C64>)>,
}

impl LinearSolution {
    /// Residual of one component at one seeded order, zero if not seeded.
    pub fn residual(&self, order: usize, component: usize) -> C64 {
        self.residuals
            .iter()
            .find(|(k, _)| *k == order)
            .map(|(_, r)| r[component])
            .unwrap_or_else(C64::zero)
    }
}

/// Solves `ξ F' = L F + r` for the Taylor coefficients of `F` up to the
/// smallest order among `l` and `rhs`.
pub fn series_field_solve_linear(
    l: &SeriesMatrix,
    rhs: &[TaylorSeries],
    seeds: &[Seed],
) -> Result<LinearSolution> {
    let n = l.dim();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rhs.len() });
    }
    let order = rhs.iter().map(TaylorSeries::order).min().unwrap_or(0).min(l.order());
    let l_coeffs: Vec<Vec<C64>> = (0..=order).map(|k| l.coeff_matrix(k)).collect();
    let mut c: Vec<Vec<C64>> = Vec::with_capacity(order + 1);
    let mut residuals = Vec::new();
    for k in 0..=order {
        let mut b: Vec<C64> = rhs.iter().map(|r| r.coeff(k)).collect();
        for j in 1..=k {
            let lj = &l_coeffs[j];
            let prev = &c[k - j];
            for (row, bi) in b.iter_mut().enumerate() {
                for col in 0..n {
                    *bi += lj[row * n + col] * prev[col];
                }
            }
        }
        let mut a: Vec<C64> = l_coeffs[0].iter().map(|&v| -v).collect();
        for i in 0..n {
            a[i * n + i] += C64::new(k as f64, 0.0);
        }
        let fixed: Vec<(usize, C64)> = seeds
            .iter()
            .filter(|s| s.order == k)
            .map(|s| (s.component, s.value))
            .collect();
        let solved = solve_with_fixed(&a, &b, n, &fixed).ok_or(Error::ResonantOrder { order: k })?;
        if !fixed.is_empty() {
            residuals.push((k, solved.residual));
        }
        c.push(solved.x);
    }
    let f = (0..n)
        .map(|comp| TaylorSeries::new(c.iter().map(|ck| ck[comp]).collect()))
        .collect();
    Ok(LinearSolution { f, residuals })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn identity_with_unit_seed() {
        let l = SeriesMatrix::diagonal(&[c(1.0)], 6);
        let seed = Seed { order: 1, component: 0, value: c(1.0) };
        let s = series_field_solve_linear(&l, &[TaylorSeries::zeros(6)], &[seed]).unwrap();
        assert_eq!(s.f[0], TaylorSeries::variable(6));
        assert_eq!(s.residual(1, 0), c(0.0));
    }

    #[test]
    fn nonresonant_forcing() {
        let l = SeriesMatrix::diagonal(&[c(2.0)], 6);
        assert!(matches!(
            series_field_solve_linear(&l, &[TaylorSeries::variable(6)], &[]),
            Err(Error::ResonantOrder { order: 2 })
        ));
        // the analytic solution has c_2 = 0 and the order-2 row is consistent
        let seed = Seed { order: 2, component: 0, value: c(0.0) };
        let s = series_field_solve_linear(&l, &[TaylorSeries::variable(6)], &[seed]).unwrap();
        assert_eq!(s.f[0], TaylorSeries::variable(6).scale(c(-1.0)));
        assert_eq!(s.residual(2, 0), c(0.0));
    }

    #[test]
    fn resonant_forcing_is_reported() {
        let l = SeriesMatrix::diagonal(&[c(1.0)], 6);
        let err = series_field_solve_linear(&l, &[TaylorSeries::variable(6)], &[]);
        assert!(matches!(err, Err(Error::ResonantOrder { order: 1 })));
        let seed = Seed { order: 1, component: 0, value: c(0.0) };
        let s = series_field_solve_linear(&l, &[TaylorSeries::variable(6)], &[seed]).unwrap();
        assert_eq!(s.residual(1, 0), c(1.0));
    }
}
