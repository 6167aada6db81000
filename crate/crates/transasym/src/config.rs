//! Resolved run configuration and the precision profile.

use serde::{Deserialize, Serialize};
use transasym_core::validator::ApproachOptions;

use crate::error::CliError;
use crate::schema::Complex;

pub const PRECISION_VAR: &str = "TRANSASYM_PRECISION";

/// Tolerance profile; the scalar type is `f64` complex either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    Double,
    Extended,
}

impl Precision {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "double" => Ok(Self::Double),
            "extended" => Ok(Self::Extended),
            other => Err(CliError::Config(format!("{PRECISION_VAR} must be `double` or `extended`, got `{other}`"))),
        }
    }

    /// Unset means `double`.
    pub fn from_env() -> Result<Self, CliError> {
        match std::env::var(PRECISION_VAR) {
            Ok(v) => Self::parse(&v),
            Err(std::env::VarError::NotPresent) => Ok(Self::Double),
            Err(e) => Err(CliError::Config(format!("{PRECISION_VAR}: {e}"))),
        }
    }

    pub fn tolerances(self) -> Tolerances {
        match self {
            Self::Double => Tolerances { rel_tol: 1e-12, abs_tol: 1e-14 },
            Self::Extended => Tolerances { rel_tol: 1e-13, abs_tol: 1e-16 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Outputs {
    pub expansion: Option<String>,
    pub array: Option<String>,
    pub report: Option<String>,
    pub trajectory: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub label: String,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub k_max: u32,
    #[serde(rename = "C")]
    pub c: Complex,
    pub n_range: [i64; 2],
    pub tolerances: Tolerances,
    pub outputs: Outputs,
    pub precision: Precision,
}

impl RunConfig {
    pub fn new(label: &str, precision: Precision) -> Self {
        Self {
            label: label.to_string(),
            m: 8,
            k: 64,
            k_max: 3,
            c: [1.0, 0.0],
            n_range: [1, 1],
            tolerances: precision.tolerances(),
            outputs: Outputs::default(),
            precision,
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let c: Self = serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
        if !(c.tolerances.rel_tol > 0.0 && c.tolerances.abs_tol > 0.0) {
            return Err(CliError::Config("tolerances must be positive".into()));
        }
        if c.n_range[0] > c.n_range[1] {
            return Err(CliError::Config("n_range must be increasing".into()));
        }
        Ok(c)
    }

    pub fn approach_options(&self) -> ApproachOptions {
        ApproachOptions { rel_tol: self.tolerances.rel_tol, abs_tol: self.tolerances.abs_tol, ..ApproachOptions::default() }
    }
}
