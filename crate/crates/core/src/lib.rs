//! Transasymptotic two-scale expansions near a rank-one irregular singular
//! point, the singularity arrays they predict, and a complex-plane validator.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod experiments;
pub mod linalg;
pub mod linear_ode;
pub mod normal_form;
pub mod series;
pub mod singularities;
pub mod transasymptotics;
pub mod validator;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use linear_ode::{series_field_solve_linear, LinearSolution, Seed, SeriesMatrix};
pub use normal_form::{builtin, map_point, stokes_directions, validate_system, CoordinateMap, NormalSystem};
pub use series::{germ_compose, AnalyticGerm, InvXSeries, Monomial, TaylorSeries};
