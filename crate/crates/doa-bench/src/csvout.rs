//! CSV emission. Columns are fixed so external plotting stays reproducible;
//! floats print in Rust's shortest round-trip form and rows appear in axis
//! order (comparator row directly after its proposed-method row), which makes
//! repeated runs with one master seed byte-identical. Runtime means are only
//! written on request since wall clocks are not deterministic.

use std::io::{self, Write};

use crate::sweep::{SweepAxis, SweepOutput, SweepResult};

pub const CSV_HEADER: &str = "axis_name,axis_value,method,rmse_deg,inclusion_fraction,\
resolution_prob,mean_iterations,mean_runtime_ms,trials,seed";

fn opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn row(
    out: &mut impl Write,
    axis: SweepAxis,
    method: &str,
    result: &SweepResult,
    master_seed: u64,
    timing: bool,
) -> io::Result<()> {
    let runtime = if timing { result.mean_runtime_ms } else { None };
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{}",
        axis.name(),
        result.axis_value,
        method,
        opt(result.rmse_deg),
        result.inclusion_fraction,
        opt(result.resolution_prob),
        opt(result.mean_iterations),
        opt(runtime),
        result.trials,
        master_seed,
    )
}

pub fn write_csv(
    out: &mut impl Write,
    axis: SweepAxis,
    master_seed: u64,
    timing: bool,
    output: &SweepOutput,
) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for (i, result) in output.proposed.iter().enumerate() {
        row(out, axis, "proposed", result, master_seed, timing)?;
        if let Some(baseline) = &output.baseline {
            row(out, axis, "music", &baseline[i], master_seed, timing)?;
        }
    }
    Ok(())
}
