//! Recovering the transseries constant from a numerical solution.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::poly_fit;
use crate::series::InvXSeries;
use crate::transasymptotics::{formal_power_series, TwoScaleExpansion};
use crate::C64;

/// Degree of the polynomial in `1/x` used to extrapolate the per-sample estimates.
pub const EXTRACT_DEGREE: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct CEstimate {
    pub c: C64,
    /// `|p_d(0) − p_{d−1}(0)|` between the degree-`d` and degree-`(d−1)` fits.
    pub uncertainty: f64,
    /// `(x, C(x))` before extrapolation.
    pub per_sample: Vec<(C64, C64)>,
}

/// Formal power series long enough for least-term truncation at every `|x| ≤ x_max`.
pub fn formal_for(e: &TwoScaleExpansion, x_max: f64) -> Result<Vec<InvXSeries>> {
    formal_power_series(&e.system, (x_max.floor() as usize + 2).max(2))
}

/// `Σ_{k ≤ ⌊|x|⌋} ỹ₀,k x^{-k}` for each component.
pub fn truncated_formal(formal: &[InvXSeries], x: C64) -> Vec<C64> {
    let upto = x.norm().floor() as usize;
    formal.iter().map(|f| f.eval_partial(x, upto)).collect()
}

/// Least-term formal series plus the exponential part of the two-scale sum.
///
/// Far out the truncated `F_m(0)` tail of the two-scale sum is much larger
/// than `ξ`, so the power-series part is taken from `formal` instead.
pub fn hybrid_seed(e: &TwoScaleExpansion, formal: &[InvXSeries], c: C64, x: C64) -> Vec<C64> {
    let xi = e.xi(c, x);
    let z = x.inv();
    let mut out = truncated_formal(formal, x);
    let mut zm = C64::new(1.0, 0.0);
    for m in 0..=e.m_max {
        for (j, o) in out.iter_mut().enumerate() {
            let f = &e.fm[m][j];
            *o += zm * (f.eval(xi) - f.coeff(0));
        }
        zm *= z;
    }
    out
}

/// `C(x) = (o·y − o·ỹ₀(x)) / (ξ̂(x) · o·F₀'(0))` at each sample, extrapolated to
/// `1/x → 0` with a polynomial fit.
pub fn extract_c(e: &TwoScaleExpansion, samples: &[(C64, Vec<C64>)]) -> Result<CEstimate> {
    if samples.len() < EXTRACT_DEGREE + 2 {
        return Err(Error::InsufficientCoefficients { nonzero: samples.len(), needed: EXTRACT_DEGREE + 2 });
    }
    let x_max = samples.iter().map(|s| s.0.norm()).fold(0.0, f64::max);
    let formal = formal_for(e, x_max)?;
    let s = &e.system;
    let lead = s.observe(&e.fm[0].iter().map(|f| f.coeff(1)).collect::<Vec<_>>());
    if lead.is_zero() {
        return Err(Error::InvalidInput("observable does not see the leading exponential"));
    }
    let per_sample: Vec<(C64, C64)> = samples
        .iter()
        .map(|(x, y)| {
            let power = s.observe(&truncated_formal(&formal, *x));
            (*x, (s.observe(y) - power) / (e.xi(C64::new(1.0, 0.0), *x) * lead))
        })
        .collect();
    let u: Vec<C64> = per_sample.iter().map(|p| p.0.inv()).collect();
    let v: Vec<C64> = per_sample.iter().map(|p| p.1).collect();
    let hi = poly_fit(&u, &v, EXTRACT_DEGREE).ok_or(Error::NotInvertible)?;
    let lo = poly_fit(&u, &v, EXTRACT_DEGREE - 1).ok_or(Error::NotInvertible)?;
    let c = hi[0];
    let uncertainty = (hi[0] - lo[0]).norm();
    // absolute floor so that a vanishing constant still counts as converged
    if uncertainty > 1e-2 * c.norm().max(1e-6) {
        return Err(Error::NotConverging { spread: uncertainty });
    }
    Ok(CEstimate { c, uncertainty, per_sample })
}
