//! JSON forms of the core types. Complex numbers are `[re, im]`.

use serde::{Deserialize, Serialize};
use transasym_core::singularities::{ArrayEntry, SingularityArray};
use transasym_core::transasymptotics::{GevreyFit, TwoScaleExpansion};
use transasym_core::validator::{ComparisonReport, MatchedPair, PoleObservation};
use transasym_core::{AnalyticGerm, NormalSystem, TaylorSeries, C64};

use crate::error::CliError;

pub type Complex = [f64; 2];

pub fn to_pair(z: C64) -> Complex {
    [z.re, z.im]
}

pub fn from_pair(p: Complex) -> C64 {
    C64::new(p[0], p[1])
}

fn pairs(v: &[C64]) -> Vec<Complex> {
    v.iter().copied().map(to_pair).collect()
}

fn complexes(v: &[Complex]) -> Vec<C64> {
    v.iter().copied().map(from_pair).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub truncation: usize,
    pub coeffs: Vec<Complex>,
}

impl From<&TaylorSeries> for SeriesJson {
    fn from(s: &TaylorSeries) -> Self {
        Self { truncation: s.order(), coeffs: pairs(s.coeffs()) }
    }
}

impl SeriesJson {
    pub fn to_series(&self) -> Result<TaylorSeries, CliError> {
        if self.coeffs.len() != self.truncation + 1 {
            return Err(CliError::Schema(format!(
                "series of truncation {} needs {} coefficients, found {}",
                self.truncation,
                self.truncation + 1,
                self.coeffs.len()
            )));
        }
        Ok(TaylorSeries::new(complexes(&self.coeffs)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub i: u32,
    pub k: Vec<u32>,
    pub c: Complex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GermJson {
    pub dims: usize,
    pub degree_cap: u32,
    pub terms: Vec<TermJson>,
}

impl From<&AnalyticGerm> for GermJson {
    fn from(g: &AnalyticGerm) -> Self {
        let terms = g.terms().map(|(m, c)| TermJson { i: m.i, k: m.k.clone(), c: to_pair(*c) }).collect();
        Self { dims: g.dims(), degree_cap: g.degree_cap(), terms }
    }
}

impl GermJson {
    pub fn to_germ(&self) -> Result<AnalyticGerm, CliError> {
        let mut g = AnalyticGerm::new(self.dims, self.degree_cap);
        for t in &self.terms {
            g.add_term(t.i, t.k.clone(), from_pair(t.c))?;
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemJson {
    pub label: String,
    pub lambda: Vec<Complex>,
    pub alpha: Vec<Complex>,
    pub observable: Vec<Complex>,
    pub g: Vec<GermJson>,
}

impl From<&NormalSystem> for SystemJson {
    fn from(s: &NormalSystem) -> Self {
        Self {
            label: s.label().to_string(),
            lambda: pairs(s.lambda()),
            alpha: pairs(s.alpha()),
            observable: pairs(s.observable()),
            g: s.g().iter().map(GermJson::from).collect(),
        }
    }
}

impl SystemJson {
    pub fn to_system(&self) -> Result<NormalSystem, CliError> {
        let g = self.g.iter().map(GermJson::to_germ).collect::<Result<Vec<_>, _>>()?;
        Ok(NormalSystem::new(
            self.label.clone(),
            complexes(&self.lambda),
            complexes(&self.alpha),
            g,
            complexes(&self.observable),
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GevreyJson {
    pub rho: f64,
    pub sup_norms: Vec<f64>,
    pub k_g: f64,
    pub b_g: f64,
    pub r_squared: Option<f64>,
}

impl From<&GevreyFit> for GevreyJson {
    fn from(g: &GevreyFit) -> Self {
        let r_squared = g.r_squared.is_finite().then_some(g.r_squared);
        Self { rho: g.rho, sup_norms: g.sup_norms.clone(), k_g: g.k_g, b_g: g.b_g, r_squared }
    }
}

impl GevreyJson {
    fn to_fit(&self) -> GevreyFit {
        GevreyFit {
            rho: self.rho,
            sup_norms: self.sup_norms.clone(),
            k_g: self.k_g,
            b_g: self.b_g,
            r_squared: self.r_squared.unwrap_or(f64::NAN),
        }
    }
}

/// Radii are `null` when infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionJson {
    pub system: SystemJson,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub lambda1: Complex,
    pub alpha1: Complex,
    pub free_constants: Vec<Complex>,
    pub radius: Option<f64>,
    pub gevrey: GevreyJson,
    /// `levels[m][j]` is component `j` of `F_m`.
    pub levels: Vec<Vec<SeriesJson>>,
}

impl From<&TwoScaleExpansion> for ExpansionJson {
    fn from(e: &TwoScaleExpansion) -> Self {
        Self {
            system: SystemJson::from(&e.system),
            m: e.m_max,
            k: e.k,
            lambda1: to_pair(e.lambda1),
            alpha1: to_pair(e.alpha1),
            free_constants: pairs(&e.free_constants),
            radius: e.radius.is_finite().then_some(e.radius),
            gevrey: GevreyJson::from(&e.gevrey),
            levels: e.fm.iter().map(|f| f.iter().map(SeriesJson::from).collect()).collect(),
        }
    }
}

impl ExpansionJson {
    pub fn to_expansion(&self) -> Result<TwoScaleExpansion, CliError> {
        let system = self.system.to_system()?;
        let fm = self
            .levels
            .iter()
            .map(|l| l.iter().map(SeriesJson::to_series).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        if fm.len() != self.m + 1 || fm.iter().any(|f| f.len() != system.n()) {
            return Err(CliError::Schema("levels do not match M and the system dimension".into()));
        }
        Ok(TwoScaleExpansion {
            system,
            m_max: self.m,
            k: self.k,
            fm,
            free_constants: complexes(&self.free_constants),
            lambda1: from_pair(self.lambda1),
            alpha1: from_pair(self.alpha1),
            radius: self.radius.unwrap_or(f64::INFINITY),
            gevrey: self.gevrey.to_fit(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryJson {
    pub n: i64,
    pub x_asym: Complex,
    pub x_ref: Option<Complex>,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayJson {
    pub xi_s: Complex,
    #[serde(rename = "C")]
    pub c: Complex,
    pub alpha1: Complex,
    pub entries: Vec<EntryJson>,
}

impl From<&SingularityArray> for ArrayJson {
    fn from(a: &SingularityArray) -> Self {
        Self {
            xi_s: to_pair(a.xi_s),
            c: to_pair(a.c),
            alpha1: to_pair(a.alpha1),
            entries: a.entries.iter().map(EntryJson::from).collect(),
        }
    }
}

impl From<&ArrayEntry> for EntryJson {
    fn from(e: &ArrayEntry) -> Self {
        Self { n: e.n, x_asym: to_pair(e.x_asymptotic), x_ref: e.x_refined.map(to_pair), residual: finite(e.residual) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairJson {
    pub n: i64,
    pub predicted: Complex,
    pub observed: Complex,
    pub delta: f64,
}

impl From<&MatchedPair> for PairJson {
    fn from(p: &MatchedPair) -> Self {
        Self { n: p.n, predicted: to_pair(p.predicted), observed: to_pair(p.observed), delta: p.delta }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationJson {
    pub location: Complex,
    pub kind: String,
    pub chart: String,
    pub exponent: f64,
    pub amplitude: Complex,
    pub fit_residual: f64,
}

impl From<&PoleObservation> for ObservationJson {
    fn from(o: &PoleObservation) -> Self {
        Self {
            location: to_pair(o.location),
            kind: format!("{:?}", o.kind),
            chart: format!("{:?}", o.chart),
            exponent: o.local_fit.exponent,
            amplitude: to_pair(o.local_fit.amplitude),
            fit_residual: o.local_fit.residual,
        }
    }
}

/// Statistics are `null` when no pair matched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub pairs: Vec<PairJson>,
    pub unmatched_predicted: Vec<i64>,
    pub unmatched_observed: Vec<Complex>,
    pub max_delta: Option<f64>,
    pub median_delta: Option<f64>,
    pub delta_slope: Option<f64>,
    pub nonincreasing: bool,
    pub observations: Vec<ObservationJson>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl ReportJson {
    pub fn new(r: &ComparisonReport, observations: &[PoleObservation]) -> Self {
        Self {
            pairs: r.pairs.iter().map(PairJson::from).collect(),
            unmatched_predicted: r.unmatched_predicted.clone(),
            unmatched_observed: pairs(&r.unmatched_observed),
            max_delta: finite(r.max_delta),
            median_delta: finite(r.median_delta),
            delta_slope: finite(r.delta_slope),
            nonincreasing: r.nonincreasing,
            observations: observations.iter().map(ObservationJson::from).collect(),
        }
    }
}

/// Waypoints in the ξ-plane for `continue`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathJson {
    pub waypoints: Vec<Complex>,
}

impl PathJson {
    pub fn points(&self) -> Vec<C64> {
        complexes(&self.waypoints)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use transasym_core::builtin;
    use transasym_core::transasymptotics::build_expansion;

    #[test]
    fn system_round_trip() {
        for label in ["p1", "abel", "p2b:0.3"] {
            let (s, _) = builtin(label).unwrap();
            let j = SystemJson::from(&s);
            let text = serde_json::to_string(&j).unwrap();
            let back: SystemJson = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_system().unwrap(), s);
        }
    }

    #[test]
    fn expansion_round_trip() {
        let (s, _) = builtin("p1").unwrap();
        let e = build_expansion(&s, 2, 16).unwrap();
        let j = ExpansionJson::from(&e);
        let text = serde_json::to_string(&j).unwrap();
        let back = serde_json::from_str::<ExpansionJson>(&text).unwrap().to_expansion().unwrap();
        assert_eq!(back.fm, e.fm);
        assert_eq!(back.free_constants, e.free_constants);
        assert_eq!(serde_json::to_string(&ExpansionJson::from(&back)).unwrap(), text);
    }

    #[test]
    fn series_length_is_checked() {
        let j = SeriesJson { truncation: 3, coeffs: vec![[1.0, 0.0]] };
        assert!(j.to_series().is_err());
    }
}
