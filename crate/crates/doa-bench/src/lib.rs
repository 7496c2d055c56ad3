//! Benchmark harness for the robust DOA recovery pipeline: Monte Carlo sweeps
//! over SNR, snapshot count, outlier probability, and angular separation,
//! with gated RMSE aggregation, a two-source resolution statistic, a MUSIC
//! comparator, and deterministic CSV output for plotting.

pub mod config;
pub mod csvout;
pub mod error;
pub mod metrics;
pub mod music;
pub mod pipeline;
pub mod seed;
pub mod sweep;

pub use config::SolveConfig;
pub use csvout::{write_csv, CSV_HEADER};
pub use error::{BenchError, Result};
pub use metrics::{match_errors, resolution_flag, rmse, TrialEstimate, RMSE_GATE_DEG};
pub use music::music_baseline;
pub use pipeline::{grid_dictionary, run_trial, solver_preset};
pub use seed::{splitmix64, trial_seed};
pub use sweep::{
    run_sweep, run_sweep_full, ExperimentSpec, SolverPreset, SweepAxis, SweepOutput, SweepResult,
};
