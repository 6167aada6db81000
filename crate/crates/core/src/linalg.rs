//! Small dense complex linear algebra used by the coefficient recursions and fits.

use alloc::vec;
use alloc::vec::Vec;

// inherent on f64 whenever std is part of the build
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::C64;

/// Relative pivot threshold below which a matrix is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Outcome of [`solve_with_fixed`].
#[derive(Debug, Clone)]
pub struct FixedSolve {
    pub x: Vec<C64>,
    /// `b - A x` over all rows.
    pub residual: Vec<C64>,
}

/// Solves `A x = b` (row-major `n × n`) with some components of `x` pinned.
///
/// The free components are determined by Gaussian elimination with complete
/// pivoting on the rows that carry information; rows left over must be
/// satisfied by the pinned values and their mismatch is returned as residual.
/// Returns `None` when the free columns are rank deficient.
pub fn solve_with_fixed(a: &[C64], b: &[C64], n: usize, fixed: &[(usize, C64)]) -> Option<FixedSolve> {
    let scale = a.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mut x = vec![C64::zero(); n];
    let mut is_fixed = vec![false; n];
    for &(j, v) in fixed {
        x[j] = v;
        is_fixed[j] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&j| !is_fixed[j]).collect();
    let m = free.len();
    let mut rhs: Vec<C64> = (0..n)
        .map(|i| {
            let mut r = b[i];
            for &(j, v) in fixed {
                r -= a[i * n + j] * v;
            }
            r
        })
        .collect();
    let mut mat: Vec<C64> = Vec::with_capacity(n * m);
    for i in 0..n {
        for &j in &free {
            mat.push(a[i * n + j]);
        }
    }
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..m).collect();
    for step in 0..m {
        let mut best = (step, step, 0.0);
        for (ri, &r) in rows.iter().enumerate().skip(step) {
            for (ci, &cc) in cols.iter().enumerate().skip(step) {
                let v = mat[r * m + cc].norm();
                if v > best.2 {
                    best = (ri, ci, v);
                }
            }
        }
        if best.2 <= SINGULAR_TOL * scale {
            return None;
        }
        rows.swap(step, best.0);
        cols.swap(step, best.1);
        let pr = rows[step];
        let pc = cols[step];
        let piv = mat[pr * m + pc];
        for &r in rows.iter().skip(step + 1) {
            let f = mat[r * m + pc] / piv;
            if f.is_zero() {
                continue;
            }
            for &cc in cols.iter().skip(step) {
                let v = mat[pr * m + cc];
                mat[r * m + cc] -= f * v;
            }
            let v = rhs[pr];
            rhs[r] -= f * v;
        }
    }
    let mut sol = vec![C64::zero(); m];
    for step in (0..m).rev() {
        let pr = rows[step];
        let pc = cols[step];
        let mut acc = rhs[pr];
        for &cc in cols.iter().skip(step + 1) {
            acc -= mat[pr * m + cc] * sol[cc];
        }
        sol[pc] = acc / mat[pr * m + pc];
    }
    for (ci, &j) in free.iter().enumerate() {
        x[j] = sol[ci];
    }
    let residual = (0..n)
        .map(|i| {
            let mut r = b[i];
            for j in 0..n {
                r -= a[i * n + j] * x[j];
            }
            r
        })
        .collect();
    Some(FixedSolve { x, residual })
}

/// Solves a square nonsingular system; `None` if singular.
pub fn solve(a: &[C64], b: &[C64], n: usize) -> Option<Vec<C64>> {
    solve_with_fixed(a, b, n, &[]).map(|s| s.x)
}

/// Complex polynomial least squares: coefficients `p_0..p_d` minimizing
/// `Σ |y_i - Σ_j p_j t_i^j|^2`, via normal equations on scaled abscissae.
pub fn poly_fit(t: &[C64], y: &[C64], degree: usize) -> Option<Vec<C64>> {
    let d = degree + 1;
    if t.len() < d {
        return None;
    }
    let s = t.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let s = if s > 0.0 { s } else { 1.0 };
    let mut ata = vec![C64::zero(); d * d];
    let mut aty = vec![C64::zero(); d];
    for (&ti, &yi) in t.iter().zip(y) {
        let u = ti / s;
        let mut row = vec![C64::new(1.0, 0.0); d];
        for j in 1..d {
            row[j] = row[j - 1] * u;
        }
        for a in 0..d {
            aty[a] += row[a].conj() * yi;
            for b in 0..d {
                ata[a * d + b] += row[a].conj() * row[b];
            }
        }
    }
    let p = solve(&ata, &aty, d)?;
    Some(p.iter().enumerate().map(|(j, &c)| c / s.powi(j as i32)).collect())
}

/// Real ordinary least squares of `y` on columns of `x` (row-major `len × p`).
pub fn real_least_squares(x: &[f64], y: &[f64], p: usize) -> Option<Vec<f64>> {
    let n = y.len();
    let mut ata = vec![C64::zero(); p * p];
    let mut aty = vec![C64::zero(); p];
    for i in 0..n {
        for a in 0..p {
            aty[a] += C64::new(x[i * p + a] * y[i], 0.0);
            for b in 0..p {
                ata[a * p + b] += C64::new(x[i * p + a] * x[i * p + b], 0.0);
            }
        }
    }
    solve(&ata, &aty, p).map(|v| v.iter().map(|c| c.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn pinned_component_reports_residual() {
        // diag(0, 2) x = (1, 4) with x0 pinned to 3
        let a = [c(0.0), c(0.0), c(0.0), c(2.0)];
        let s = solve_with_fixed(&a, &[c(1.0), c(4.0)], 2, &[(0, c(3.0))]).unwrap();
        assert_eq!(s.x, vec![c(3.0), c(2.0)]);
        assert_eq!(s.residual[0], c(1.0));
        assert!(s.residual[1].norm() < 1e-15);
    }

    #[test]
    fn singular_without_pin() {
        let a = [c(0.0), c(0.0), c(0.0), c(2.0)];
        assert!(solve(&a, &[c(1.0), c(4.0)], 2).is_none());
    }

    #[test]
    fn fits_quadratic_exactly() {
        let t: Vec<C64> = (1..6).map(|k| C64::new(k as f64, 0.5)).collect();
        let y: Vec<C64> = t.iter().map(|&u| c(2.0) - u * 3.0 + u * u).collect();
        let p = poly_fit(&t, &y, 2).unwrap();
        assert!((p[0] - c(2.0)).norm() < 1e-10);
        assert!((p[1] - c(-3.0)).norm() < 1e-10);
        assert!((p[2] - c(1.0)).norm() < 1e-10);
    }
}
