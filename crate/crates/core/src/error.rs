use alloc::boxed::Box;
use alloc::string::String;

use crate::validator::Trajectory;
use crate::C64;

/// Errors raised across the crate.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("monomial of total degree {degree} exceeds the germ degree cap {cap}")]
    DegreeCapExceeded { degree: u32, cap: u32 },
    #[error("germ has {got} variables, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coefficient recursion is singular at order {order}")]
    ResonantOrder { order: usize },
    #[error("series has zero constant term and cannot be inverted")]
    NotInvertible,
    #[error("unknown builtin label `{0}`")]
    UnknownLabel(String),
    #[error("point lies on the branch cut or at the branch point of the map")]
    OnBranchCut,
    #[error("only {nonzero} usable trailing coefficients, need at least {needed}")]
    InsufficientCoefficients { nonzero: usize, needed: usize },
    #[error("coefficient ratios oscillate (conjugate singularities); modulus {radius}")]
    Oscillatory { radius: f64 },
    #[error("continuation blew up near xi = {xi}")]
    SingularApproach { xi: C64 },
    #[error("Newton iteration diverged for entry {n}")]
    NewtonDiverged { n: i64 },
    #[error("the transseries constant C is zero")]
    ZeroC,
    #[error("oracle evaluated at its own pole")]
    PoleOfOracle,
    #[error("requested Riemann sheet is unreachable")]
    SheetUnreachable,
    #[error("|xi| = {xi_abs} lies outside the reliable disk of radius {radius}")]
    OutsideReliableDisk { xi_abs: f64, radius: f64 },
    #[error("|xi| = {xi_abs} is past the first singularity at radius {radius}")]
    ScalePastBranch { xi_abs: f64, radius: f64 },
    #[error("step size underflow near x = {x}")]
    StepUnderflow { x: C64, partial: Box<Trajectory> },
    #[error("trajectory tail shows no blow-up")]
    NoBlowup,
    #[error("local chart is ambiguous between {0} and {1}")]
    ChartAmbiguous(C64, C64),
    #[error("successive estimates are not Cauchy (spread {spread})")]
    NotConverging { spread: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
