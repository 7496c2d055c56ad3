//! Trial bookkeeping: estimate-to-truth matching, the gated RMSE aggregate,
//! and the two-source resolution test.

use crate::error::{BenchError, Result};

/// Outcome of a single Monte Carlo trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialEstimate {
    pub estimated_doas_deg: Vec<f64>,
    /// Picked grid angles before off-grid refinement.
    pub on_grid_doas_deg: Vec<f64>,
    pub true_doas_deg: Vec<f64>,
    /// Absolute errors after minimum-total-error assignment, aligned to
    /// `true_doas_deg`.
    pub matched_errors_deg: Vec<f64>,
    /// True iff the trial passed the 3-degree gate (every matched error < 3).
    pub included_in_rmse: bool,
    /// Two-source resolution test outcome; false for K != 2.
    pub resolved: bool,
    pub solver_iterations: usize,
    /// Solver diverged; the trial is excluded but the sweep carries on.
    pub solver_failed: bool,
}

/// Per-trial gate on the matched errors.
pub const RMSE_GATE_DEG: f64 = 3.0;

/// Absolute errors under the estimate permutation minimizing the total
/// absolute error, returned in truth order. Estimates and truths must have the
/// same length. On a line the minimum is attained by pairing both lists in
/// sorted order (exchange argument); that pairing is also the canonical choice
/// when the total ties — e.g. two estimates past both truths on the same side
/// — because input order can no longer influence the outcome.
pub fn match_errors(estimated_deg: &[f64], true_deg: &[f64]) -> Vec<f64> {
    assert_eq!(
        estimated_deg.len(),
        true_deg.len(),
        "matching needs equal-length estimate and truth lists"
    );
    let k = true_deg.len();
    let mut est_sorted = estimated_deg.to_vec();
    est_sorted.sort_by(f64::total_cmp);
    let mut truth_order: Vec<usize> = (0..k).collect();
    truth_order.sort_by(|&a, &b| true_deg[a].total_cmp(&true_deg[b]));
    let mut errors = vec![0.0; k];
    for (rank, &ti) in truth_order.iter().enumerate() {
        errors[ti] = (est_sorted[rank] - true_deg[ti]).abs();
    }
    errors
}

/// Gated RMSE over included trials and the inclusion fraction over all trials:
/// sqrt( sum_j sum_k err_{j,k}^2 / (N_inc * K) ). With no included trials the
/// RMSE is absent and the fraction 0.
pub fn rmse(estimates: &[TrialEstimate]) -> (Option<f64>, f64) {
    if estimates.is_empty() {
        return (None, 0.0);
    }
    let mut total_sq = 0.0;
    let mut terms = 0usize;
    let mut included = 0usize;
    for est in estimates {
        if !est.included_in_rmse {
            continue;
        }
        included += 1;
        for err in &est.matched_errors_deg {
            total_sq += err * err;
            terms += 1;
        }
    }
    let fraction = included as f64 / estimates.len() as f64;
    if terms == 0 {
        (None, fraction)
    } else {
        (Some((total_sq / terms as f64).sqrt()), fraction)
    }
}

/// Two-source resolution test: the pair counts as resolved iff
/// `max_k |matched error_k| < |theta_1 - theta_2| / 2`.
pub fn resolution_flag(estimate: &TrialEstimate) -> Result<bool> {
    if estimate.true_doas_deg.len() != 2 || estimate.matched_errors_deg.len() != 2 {
        return Err(BenchError::InvalidExperiment(format!(
            "resolution test is defined for exactly 2 sources, got {}",
            estimate.true_doas_deg.len()
        )));
    }
    let half_gap = (estimate.true_doas_deg[0] - estimate.true_doas_deg[1]).abs() / 2.0;
    let max_err = estimate
        .matched_errors_deg
        .iter()
        .fold(0.0_f64, |acc, e| acc.max(e.abs()));
    Ok(max_err < half_gap)
}
