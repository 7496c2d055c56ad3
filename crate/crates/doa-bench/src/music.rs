//! Spectral MUSIC on the angle grid, used as a sanity comparator. Not part of
//! the recovery pipeline: it sees the same raw snapshots as the proposed
//! method and is expected to degrade under outliers and coherent sources.

use doa_core::array::{steering_vector, AngleGrid, ArrayGeometry};
use doa_core::linalg::{eigh_hermitian, mul_conj_t};
use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{BenchError, Result};

/// Estimates K DOAs as the K largest local maxima of the MUSIC
/// pseudo-spectrum of the sample covariance `Y Y^H / T`. If the spectrum has
/// fewer than K local maxima (merged peaks), the remaining estimates fall back
/// to the strongest unclaimed grid points. Returns angles in descending
/// spectrum order.
pub fn music_baseline(
    y: &Array2<Complex64>,
    grid: &AngleGrid,
    k: usize,
    geometry: &ArrayGeometry,
) -> Result<Vec<f64>> {
    let m = y.nrows();
    if k == 0 || k >= m {
        return Err(BenchError::MusicDomain { k, m });
    }
    if m != geometry.num_elements() {
        return Err(BenchError::InvalidExperiment(format!(
            "data has {m} rows but the geometry has {} elements",
            geometry.num_elements()
        )));
    }
    let t = y.ncols().max(1) as f64;
    let cov = mul_conj_t(y, y) / Complex64::new(t, 0.0);
    let (_eigvals, eigvecs) = eigh_hermitian(&cov);

    // Noise subspace: eigenvectors of the M - K smallest eigenvalues
    // (ascending order, so the leading columns).
    let spectrum: Vec<f64> = grid
        .angles_deg()
        .iter()
        .map(|&angle| {
            let a = steering_vector(geometry, angle).expect("grid angles are in range");
            let mut denom = 0.0;
            for j in 0..m - k {
                let mut proj = Complex64::ZERO;
                for i in 0..m {
                    proj += eigvecs[(i, j)].conj() * a[i];
                }
                denom += proj.norm_sqr();
            }
            1.0 / denom.max(1e-300)
        })
        .collect();

    let n = spectrum.len();
    let is_peak = |i: usize| -> bool {
        let left_ok = i == 0 || spectrum[i] > spectrum[i - 1];
        let right_ok = i == n - 1 || spectrum[i] > spectrum[i + 1];
        left_ok && right_ok
    };
    let mut order: Vec<usize> = (0..n).collect();
    // Peaks first, strongest first; ties resolve to the lower grid index.
    order.sort_by(|&i, &j| {
        is_peak(j)
            .cmp(&is_peak(i))
            .then(spectrum[j].total_cmp(&spectrum[i]))
            .then(i.cmp(&j))
    });
    Ok(order[..k]
        .iter()
        .map(|&i| grid.angles_deg()[i])
        .collect())
}
