//! TOML configuration for the `solve` subcommand. Keys mirror the scenario
//! and solver field names; unknown keys are rejected so typos fail loudly.
//! The `[solver]` table is optional and overrides the SNR-based preset field
//! by field.

use std::path::Path;

use doa_core::admm::AdmmConfig;
use doa_core::array::{AngleGrid, ArrayGeometry, ArrayScenario};
use doa_core::prox::MlcParams;
use serde::Deserialize;

use crate::error::{BenchError, Result};
use crate::pipeline::solver_preset;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub scenario: ScenarioConfig,
    pub solver: Option<SolverOverrides>,
    pub grid: Option<GridConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub geometry: GeometryConfig,
    pub true_doas_deg: Vec<f64>,
    pub num_snapshots: usize,
    /// Use `inf` for a noise-free scenario.
    pub snr_db: f64,
    pub sor_db: f64,
    pub outlier_prob: f64,
    #[serde(default)]
    pub coherent: bool,
    pub rng_seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub num_elements: usize,
    #[serde(default = "half_wavelength")]
    pub spacing_over_wavelength: f64,
}

fn half_wavelength() -> f64 {
    0.5
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub rho: Option<f64>,
    pub beta: Option<f64>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub mlc: Option<MlcOverrides>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlcOverrides {
    pub lam: Option<f64>,
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub spacing_deg: f64,
}

impl SolveConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| BenchError::Config(e.to_string()))
    }

    pub fn scenario(&self) -> Result<ArrayScenario> {
        let s = &self.scenario;
        let geometry = ArrayGeometry::with_spacing(
            s.geometry.num_elements,
            s.geometry.spacing_over_wavelength,
        )?;
        let scenario = ArrayScenario {
            geometry,
            true_doas_deg: s.true_doas_deg.clone(),
            num_snapshots: s.num_snapshots,
            snr_db: s.snr_db,
            sor_db: s.sor_db,
            outlier_prob: s.outlier_prob,
            coherent: s.coherent,
            rng_seed: s.rng_seed,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn grid(&self) -> Result<AngleGrid> {
        let spacing = self.grid.as_ref().map_or(2.0, |g| g.spacing_deg);
        Ok(AngleGrid::uniform(spacing)?)
    }

    pub fn solver(&self, scenario: &ArrayScenario) -> AdmmConfig {
        let mut cfg = solver_preset(scenario);
        if let Some(s) = &self.solver {
            if let Some(v) = s.lambda1 {
                cfg.lambda1 = v;
            }
            if let Some(v) = s.lambda2 {
                cfg.lambda2 = v;
            }
            if let Some(v) = s.rho {
                cfg.rho = v;
            }
            if let Some(v) = s.beta {
                cfg.beta = v;
            }
            if let Some(v) = s.tol {
                cfg.tol = v;
            }
            if let Some(v) = s.max_iters {
                cfg.max_iters = v;
            }
            if let Some(mlc) = &s.mlc {
                let mut params = MlcParams::default();
                if let Some(v) = mlc.lam {
                    params.lam = v;
                }
                if let Some(v) = mlc.gamma {
                    params.gamma = v;
                }
                if let Some(v) = mlc.eta {
                    params.eta = v;
                }
                cfg.mlc = params;
            }
        }
        cfg
    }
}
