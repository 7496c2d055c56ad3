//! Monte Carlo sweeps: one experiment axis, per-trial seed streams, gated
//! aggregation, and an optional MUSIC comparator scored on the same data.

use std::time::Instant;

use doa_core::admm::AdmmConfig;
use doa_core::array::{synthesize, AngleGrid, ArrayScenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{BenchError, Result};
use crate::metrics::{match_errors, resolution_flag, rmse, TrialEstimate, RMSE_GATE_DEG};
use crate::music::music_baseline;
use crate::pipeline::{run_trial, solver_preset};
use crate::seed::trial_seed;

/// The swept experiment axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Snr,
    Snapshots,
    OutlierProb,
    Separation,
    CoherentSnr,
}

impl SweepAxis {
    /// Column value for `axis_name` in the CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Snr => "snr_db",
            SweepAxis::Snapshots => "snapshots",
            SweepAxis::OutlierProb => "outlier_prob",
            SweepAxis::Separation => "separation_deg",
            SweepAxis::CoherentSnr => "coherent_snr_db",
        }
    }
}

/// How each trial's solver configuration is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverPreset {
    /// SNR-dependent weights via [`solver_preset`].
    Auto,
    /// One fixed configuration for every trial.
    Fixed(AdmmConfig),
}

/// One benchmark experiment: a scenario template with a single swept axis.
///
/// The template supplies everything the axis does not: M, T, SNR, SOR,
/// outlier probability, coherence. Source angles are redrawn per trial,
/// uniformly from [-10, 0] and [20, 30] degrees, except for the separation
/// sweep, which fixes theta_1 = -10.8 degrees and theta_2 = theta_1 + delta.
/// The template's `true_doas_deg` therefore only fixes K, which must be 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub template: ArrayScenario,
    pub sweep_axis: SweepAxis,
    pub sweep_values: Vec<f64>,
    pub num_trials: usize,
    pub grid_spacing_deg: f64,
    pub solver_preset: SolverPreset,
    pub master_seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sweep_values.is_empty() {
            return Err(BenchError::InvalidExperiment(
                "sweep_values must be nonempty".into(),
            ));
        }
        if self.sweep_values.windows(2).any(|w| w[0] > w[1]) {
            return Err(BenchError::InvalidExperiment(
                "sweep_values must be sorted ascending".into(),
            ));
        }
        if self.num_trials == 0 {
            return Err(BenchError::InvalidExperiment(
                "num_trials must be >= 1".into(),
            ));
        }
        if self.template.true_doas_deg.len() != 2 {
            return Err(BenchError::InvalidExperiment(
                "sweeps are defined for K = 2 sources".into(),
            ));
        }
        Ok(())
    }
}

/// Aggregates of one axis point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis_value: f64,
    /// Absent when no trial passed the error gate.
    pub rmse_deg: Option<f64>,
    pub inclusion_fraction: f64,
    /// Fraction of trials passing the resolution test; separation sweep only.
    pub resolution_prob: Option<f64>,
    /// Mean solver iterations over non-failed trials; absent for the MUSIC
    /// comparator and when every trial failed.
    pub mean_iterations: Option<f64>,
    /// Mean wall-clock per trial; consumed only when timing output is
    /// requested (it is not deterministic).
    pub mean_runtime_ms: Option<f64>,
    pub trials: usize,
    pub failed_trials: usize,
}

/// Proposed-method results plus the optional comparator, in axis order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub proposed: Vec<SweepResult>,
    pub baseline: Option<Vec<SweepResult>>,
}

/// Scenario for one trial of one axis point. The trial seed feeds a dedicated
/// stream that draws the source angles (where the axis calls for random
/// truths) and then the synthesis seed.
fn trial_scenario(spec: &ExperimentSpec, axis_value: f64, seed: u64) -> Result<ArrayScenario> {
    let mut scenario = spec.template.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match spec.sweep_axis {
        SweepAxis::Snr => scenario.snr_db = axis_value,
        SweepAxis::Snapshots => {
            let t = axis_value.round();
            if t < 1.0 || (t - axis_value).abs() > 1e-9 {
                return Err(BenchError::InvalidExperiment(format!(
                    "snapshot counts must be positive integers, got {axis_value}"
                )));
            }
            scenario.num_snapshots = t as usize;
        }
        SweepAxis::OutlierProb => scenario.outlier_prob = axis_value,
        SweepAxis::Separation => {
            let theta1 = -10.8;
            scenario.true_doas_deg = vec![theta1, theta1 + axis_value];
        }
        SweepAxis::CoherentSnr => {
            scenario.snr_db = axis_value;
            scenario.coherent = true;
        }
    }
    if spec.sweep_axis != SweepAxis::Separation {
        let theta1 = -10.0 + 10.0 * rng.random::<f64>();
        let theta2 = 20.0 + 10.0 * rng.random::<f64>();
        scenario.true_doas_deg = vec![theta1, theta2];
    }
    scenario.rng_seed = rng.random::<u64>();
    Ok(scenario)
}

fn aggregate(
    axis_value: f64,
    trials: &[TrialEstimate],
    runtimes_ms: &[f64],
    resolution: bool,
) -> SweepResult {
    let (rmse_deg, inclusion_fraction) = rmse(trials);
    let failed = trials.iter().filter(|t| t.solver_failed).count();
    let completed = trials.len() - failed;
    let mean_iterations = if completed > 0 {
        Some(
            trials
                .iter()
                .filter(|t| !t.solver_failed)
                .map(|t| t.solver_iterations as f64)
                .sum::<f64>()
                / completed as f64,
        )
    } else {
        None
    };
    let resolution_prob = if resolution {
        let resolved = trials.iter().filter(|t| t.resolved).count();
        Some(resolved as f64 / trials.len() as f64)
    } else {
        None
    };
    SweepResult {
        axis_value,
        rmse_deg,
        inclusion_fraction,
        resolution_prob,
        mean_iterations,
        mean_runtime_ms: Some(runtimes_ms.iter().sum::<f64>() / runtimes_ms.len() as f64),
        trials: trials.len(),
        failed_trials: failed,
    }
}

/// Scores MUSIC on the same synthesized data as a proposed-method trial.
fn music_trial(
    scenario: &ArrayScenario,
    grid: &AngleGrid,
) -> Result<TrialEstimate> {
    let k = scenario.true_doas_deg.len();
    let data = synthesize(scenario)?;
    let estimated = music_baseline(&data.observations, grid, k, &scenario.geometry)?;
    let matched = match_errors(&estimated, &scenario.true_doas_deg);
    let included = matched.iter().all(|e| *e < RMSE_GATE_DEG);
    let mut estimate = TrialEstimate {
        estimated_doas_deg: estimated.clone(),
        on_grid_doas_deg: estimated,
        true_doas_deg: scenario.true_doas_deg.clone(),
        matched_errors_deg: matched,
        included_in_rmse: included,
        resolved: false,
        solver_iterations: 0,
        solver_failed: false,
    };
    if k == 2 {
        estimate.resolved = resolution_flag(&estimate)?;
    }
    Ok(estimate)
}

/// Runs the full sweep; with `with_music` the comparator is evaluated on the
/// identical per-trial data. Trials execute in (axis, trial) order and
/// aggregation is deterministic for a fixed master seed.
pub fn run_sweep_full(spec: &ExperimentSpec, with_music: bool) -> Result<SweepOutput> {
    spec.validate()?;
    let grid = AngleGrid::uniform(spec.grid_spacing_deg)?;
    let resolution = spec.sweep_axis == SweepAxis::Separation;

    let mut proposed = Vec::with_capacity(spec.sweep_values.len());
    let mut baseline = Vec::with_capacity(spec.sweep_values.len());
    for (axis_index, &axis_value) in spec.sweep_values.iter().enumerate() {
        let mut trials = Vec::with_capacity(spec.num_trials);
        let mut runtimes = Vec::with_capacity(spec.num_trials);
        let mut music_trials = Vec::new();
        let mut music_runtimes = Vec::new();
        for trial_index in 0..spec.num_trials {
            let seed = trial_seed(spec.master_seed, axis_index, trial_index);
            let scenario = trial_scenario(spec, axis_value, seed)?;
            let cfg = match spec.solver_preset {
                SolverPreset::Auto => solver_preset(&scenario),
                SolverPreset::Fixed(cfg) => cfg,
            };
            let start = Instant::now();
            trials.push(run_trial(&scenario, &grid, &cfg)?);
            runtimes.push(start.elapsed().as_secs_f64() * 1e3);
            if with_music {
                let start = Instant::now();
                music_trials.push(music_trial(&scenario, &grid)?);
                music_runtimes.push(start.elapsed().as_secs_f64() * 1e3);
            }
        }
        proposed.push(aggregate(axis_value, &trials, &runtimes, resolution));
        if with_music {
            let mut result = aggregate(axis_value, &music_trials, &music_runtimes, resolution);
            result.mean_iterations = None;
            baseline.push(result);
        }
    }
    Ok(SweepOutput {
        proposed,
        baseline: with_music.then_some(baseline),
    })
}

/// Proposed-method sweep without the comparator.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<SweepResult>> {
    Ok(run_sweep_full(spec, false)?.proposed)
}
