//! Numerical ground truth: integration along complex paths, singularity
//! detection, extraction of the transseries constant and array comparison.

mod compare;
mod detect;
mod extract;
mod integrator;
mod pipeline;

pub use compare::{compare_arrays, compare_locations, hungarian, ComparisonReport, MatchedPair, CAPTURE_RADIUS};
pub use detect::{
    approach, continue_approach, detect_singularity, fit_local, inverse_chart_landing, locate_singularity, monodromy, ApproachOptions,
    DetectionChart, LocalFit, Monodromy, PoleKind, PoleObservation,
};
pub use extract::{extract_c, formal_for, hybrid_seed, truncated_formal, CEstimate, EXTRACT_DEGREE};
pub use integrator::{integrate_path, integrate_polyline, IntegratorStats, PathSpec, Sample, Trajectory};
pub use pipeline::{anchor_at, loop_check, observe_pole, ray_samples, second_array_targets, PoleRun, RaySamples};
