//! Robust direction-of-arrival estimation under impulsive noise.
//!
//! The observation model splits each snapshot into an on-grid sparse signal
//! part, dense Gaussian noise, and isolated strong outliers. [`admm`] recovers
//! the row-sparse source matrix and the outlier matrix jointly with a
//! linearized ADMM built on the proximal kernels in [`prox`]; [`refine`] then
//! moves the picked grid angles off-grid with an alternating least-squares /
//! Taylor-correction loop. [`array`] provides the ULA model and Monte Carlo
//! snapshot synthesis, and [`linalg`] the small dense complex kernels
//! everything runs on.

pub mod admm;
pub mod array;
pub mod error;
pub mod linalg;
pub mod prox;
pub mod refine;

pub use admm::{solve, AdmmConfig, AdmmResult, AdmmState};
pub use array::{
    steering_derivative, steering_matrix, steering_vector, synthesize, AngleGrid, ArrayGeometry,
    ArrayScenario, SnapshotData,
};
pub use error::{CoreError, Result};
pub use prox::{
    log_prox, mlc_prox, mlc_value, row_soft_threshold, variational_weight, MlcParams,
};
pub use refine::{
    pick_on_grid, refine, refine_with_options, solve_gap, OnGridPicks, RefineOptions, RefineResult,
};
