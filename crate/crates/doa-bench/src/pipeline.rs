//! Single-trial pipeline: synthesize snapshots, run the ADMM recovery on the
//! grid dictionary, pick the strongest rows, refine off-grid, and score the
//! estimates against the truth.

use doa_core::admm::{solve, AdmmConfig};
use doa_core::array::{steering_matrix, synthesize, AngleGrid, ArrayScenario};
use doa_core::error::CoreError;
use doa_core::refine::{pick_on_grid, refine_with_options, RefineOptions};
use num_complex::Complex64;

use crate::error::Result;
use crate::metrics::{match_errors, resolution_flag, TrialEstimate, RMSE_GATE_DEG};

/// Solver configuration for a scenario. The SNR splits the sparsity weights
/// into two regimes: (7, 1.4) above 5 dB, and (4 sqrt(M), 4) at or below.
/// The low-SNR row weight is stated for a unit-modulus dictionary; this
/// pipeline normalizes dictionary columns to unit norm (so that the fixed
/// step beta = 0.03 contracts), which scales row norms of X by sqrt(M) and
/// the equivalent group threshold with them. Noiseless outlier-free runs cap
/// at 8000 iterations: they do converge, but slowly — a few thousand
/// iterations at broadside and more toward endfire where the grid columns are
/// nearly coherent. Noisy runs get 2000; their high-SNR iterates settle into
/// a sub-tolerance limit cycle and run to the cap without hurting accuracy.
pub fn solver_preset(scenario: &ArrayScenario) -> AdmmConfig {
    let m = scenario.geometry.num_elements() as f64;
    let (lambda1, lambda2) = if scenario.snr_db > 5.0 {
        (7.0, 1.4)
    } else {
        (4.0 * m.sqrt(), 4.0)
    };
    let noiseless = scenario.snr_db.is_infinite() && scenario.outlier_prob == 0.0;
    AdmmConfig {
        lambda1,
        lambda2,
        max_iters: if noiseless { 8000 } else { 2000 },
        ..AdmmConfig::default()
    }
}

/// Unit-norm-column steering dictionary on the grid.
pub fn grid_dictionary(
    scenario: &ArrayScenario,
    grid: &AngleGrid,
) -> Result<ndarray::Array2<Complex64>> {
    let a = steering_matrix(&scenario.geometry, grid.angles_deg())?;
    let m = scenario.geometry.num_elements() as f64;
    Ok(a / Complex64::new(m.sqrt(), 0.0))
}

/// Runs one Monte Carlo trial end to end. Solver divergence marks the trial
/// failed/excluded without aborting the caller's sweep; refinement failure
/// falls back to the on-grid picks.
pub fn run_trial(
    scenario: &ArrayScenario,
    grid: &AngleGrid,
    cfg: &AdmmConfig,
) -> Result<TrialEstimate> {
    let k = scenario.true_doas_deg.len();
    let data = synthesize(scenario)?;
    let dictionary = grid_dictionary(scenario, grid)?;

    let solved = match solve(&dictionary, &data.observations, cfg) {
        Ok(result) => result,
        Err(CoreError::Divergence(iter)) => {
            return Ok(TrialEstimate {
                estimated_doas_deg: Vec::new(),
                on_grid_doas_deg: Vec::new(),
                true_doas_deg: scenario.true_doas_deg.clone(),
                matched_errors_deg: vec![f64::INFINITY; k],
                included_in_rmse: false,
                resolved: false,
                solver_iterations: iter,
                solver_failed: true,
            });
        }
        Err(other) => return Err(other.into()),
    };

    let picks = pick_on_grid(&solved.x, grid, k)?;
    let refined = refine_with_options(
        &data.observations,
        &solved.o,
        &picks,
        &scenario.geometry,
        &RefineOptions::for_grid(grid),
    );
    let estimated = match refined {
        Ok(result) => result.doas_deg,
        Err(_) => picks.angles_deg.clone(),
    };

    let matched = match_errors(&estimated, &scenario.true_doas_deg);
    let included = matched.iter().all(|e| *e < RMSE_GATE_DEG);
    let mut estimate = TrialEstimate {
        estimated_doas_deg: estimated,
        on_grid_doas_deg: picks.angles_deg.clone(),
        true_doas_deg: scenario.true_doas_deg.clone(),
        matched_errors_deg: matched,
        included_in_rmse: included,
        resolved: false,
        solver_iterations: solved.iterations,
        solver_failed: false,
    };
    if k == 2 {
        estimate.resolved = resolution_flag(&estimate)?;
    }
    Ok(estimate)
}
