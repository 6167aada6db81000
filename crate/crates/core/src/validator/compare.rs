//! Matching predicted singularity arrays against observed poles.

use alloc::vec;
use alloc::vec::Vec;

use super::detect::PoleObservation;
use crate::singularities::SingularityArray;
use crate::C64;

/// Distance beyond which a prediction is left unmatched.
pub const CAPTURE_RADIUS: f64 = 1.0;

const FORBIDDEN: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPair {
    pub n: i64,
    pub predicted: C64,
    pub observed: C64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub pairs: Vec<MatchedPair>,
    pub unmatched_predicted: Vec<i64>,
    pub unmatched_observed: Vec<C64>,
    pub max_delta: f64,
    pub median_delta: f64,
    /// Least-squares slope of `|Δ|` against `n`.
    pub delta_slope: f64,
    /// `|Δ|` never increases with `n` over the matched pairs.
    pub nonincreasing: bool,
}

/// Minimum-cost assignment of rows to distinct columns, `rows ≤ cols`.
/// Returns the column chosen for each row.
pub fn hungarian(cost: &[f64], rows: usize, cols: usize) -> Vec<usize> {
    assert!(rows <= cols && cost.len() == rows * cols);
    let inf = f64::INFINITY;
    let mut u = vec![0.0; rows + 1];
    let mut v = vec![0.0; cols + 1];
    let mut owner = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    for i in 1..=rows {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * cols + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=cols {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; rows];
    for j in 1..=cols {
        if owner[j] != 0 {
            out[owner[j] - 1] = j - 1;
        }
    }
    out
}

/// Assigns observed poles to the refined (or asymptotic) predictions.
pub fn compare_arrays(predicted: &SingularityArray, observed: &[PoleObservation]) -> ComparisonReport {
    let locs: Vec<C64> = observed.iter().map(|o| o.location).collect();
    compare_locations(predicted, &locs)
}

/// [`compare_arrays`] on bare locations.
///
/// Every prediction may instead take a private dummy column at cost
/// [`CAPTURE_RADIUS`], so pairs further apart than that are never formed.
pub fn compare_locations(predicted: &SingularityArray, observed: &[C64]) -> ComparisonReport {
    let np = predicted.entries.len();
    let no = observed.len();
    let cols = no + np;
    let pred: Vec<C64> = predicted.entries.iter().map(|e| e.x_refined.unwrap_or(e.x_asymptotic)).collect();
    let mut cost = vec![FORBIDDEN; np * cols];
    for i in 0..np {
        for j in 0..no {
            let d = (pred[i] - observed[j]).norm();
            if d <= CAPTURE_RADIUS {
                cost[i * cols + j] = d;
            }
        }
        cost[i * cols + no + i] = CAPTURE_RADIUS;
    }
    let assign = if np == 0 { Vec::new() } else { hungarian(&cost, np, cols) };
    let mut pairs = Vec::new();
    let mut unmatched_predicted = Vec::new();
    let mut taken = vec![false; no];
    for (i, &j) in assign.iter().enumerate() {
        let n = predicted.entries[i].n;
        if j < no && cost[i * cols + j] < FORBIDDEN && (pred[i] - observed[j]).norm() < CAPTURE_RADIUS {
            taken[j] = true;
            pairs.push(MatchedPair { n, predicted: pred[i], observed: observed[j], delta: (pred[i] - observed[j]).norm() });
        } else {
            unmatched_predicted.push(n);
        }
    }
    pairs.sort_by_key(|p| p.n);
    let unmatched_observed = observed.iter().zip(&taken).filter(|(_, t)| !**t).map(|(o, _)| *o).collect();
    let deltas: Vec<f64> = pairs.iter().map(|p| p.delta).collect();
    let max_delta = deltas.iter().copied().fold(0.0, f64::max);
    let median_delta = median(&deltas);
    let delta_slope = slope(&pairs);
    let nonincreasing = deltas.windows(2).all(|w| w[1] <= w[0]);
    ComparisonReport { pairs, unmatched_predicted, unmatched_observed, max_delta, median_delta, delta_slope, nonincreasing }
}

fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = s.len();
    if k % 2 == 1 {
        s[k / 2]
    } else {
        0.5 * (s[k / 2 - 1] + s[k / 2])
    }
}

fn slope(pairs: &[MatchedPair]) -> f64 {
    if pairs.len() < 2 {
        return f64::NAN;
    }
    let k = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.n as f64).sum::<f64>() / k;
    let my = pairs.iter().map(|p| p.delta).sum::<f64>() / k;
    let sxx: f64 = pairs.iter().map(|p| (p.n as f64 - mx) * (p.n as f64 - mx)).sum();
    let sxy: f64 = pairs.iter().map(|p| (p.n as f64 - mx) * (p.delta - my)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignment_prefers_global_minimum() {
        // greedy would take (0,0) at cost 1 and force (1,1) at cost 10
        let cost = [1.0, 2.0, 2.0, 10.0];
        assert_eq!(hungarian(&cost, 2, 2), vec![1, 0]);
    }

    #[test]
    fn rectangular_assignment() {
        let cost = [5.0, 1.0, 9.0, 4.0, 8.0, 1.5];
        let a = hungarian(&cost, 2, 3);
        assert_eq!(a, vec![1, 2]);
    }
}
