//! Uniform linear array model: steering vectors, their angle derivatives, the
//! overcomplete grid dictionary, and Monte Carlo snapshot synthesis with
//! Gaussian noise plus Bernoulli-gated impulsive outliers.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::TAU;

use crate::error::{CoreError, Result};

/// Uniform linear array: `num_elements` sensors spaced `element_spacing_over_wavelength`
/// wavelengths apart (half-wavelength by default).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    num_elements: usize,
    element_spacing_over_wavelength: f64,
}

impl ArrayGeometry {
    /// Half-wavelength ULA with `num_elements` sensors.
    pub fn new(num_elements: usize) -> Result<Self> {
        Self::with_spacing(num_elements, 0.5)
    }

    pub fn with_spacing(num_elements: usize, element_spacing_over_wavelength: f64) -> Result<Self> {
        if num_elements < 2 {
            return Err(CoreError::InvalidConfig(format!(
                "array needs at least 2 elements, got {num_elements}"
            )));
        }
        if !(element_spacing_over_wavelength > 0.0) {
            return Err(CoreError::InvalidConfig(format!(
                "element spacing must be positive, got {element_spacing_over_wavelength}"
            )));
        }
        Ok(Self {
            num_elements,
            element_spacing_over_wavelength,
        })
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn spacing_over_wavelength(&self) -> f64 {
        self.element_spacing_over_wavelength
    }
}

/// Uniformly spaced angle grid covering [-90, 90] degrees inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    angles_deg: Vec<f64>,
    spacing_deg: f64,
}

impl AngleGrid {
    /// Builds the grid at `spacing_deg` resolution; the spacing must divide
    /// 180 degrees so both endpoints land exactly on the grid.
    pub fn uniform(spacing_deg: f64) -> Result<Self> {
        if !(spacing_deg > 0.0) || !spacing_deg.is_finite() {
            return Err(CoreError::InvalidConfig(format!(
                "grid spacing must be positive and finite, got {spacing_deg}"
            )));
        }
        let steps = 180.0 / spacing_deg;
        let n_steps = steps.round();
        if (steps - n_steps).abs() > 1e-9 || n_steps < 2.0 {
            return Err(CoreError::InvalidConfig(format!(
                "grid spacing {spacing_deg} does not evenly divide 180 degrees"
            )));
        }
        let n_steps = n_steps as usize;
        let mut angles_deg: Vec<f64> = (0..=n_steps)
            .map(|i| -90.0 + i as f64 * spacing_deg)
            .collect();
        // Pin the endpoint exactly; accumulated rounding must not leak past 90.
        angles_deg[n_steps] = 90.0;
        Ok(Self {
            angles_deg,
            spacing_deg,
        })
    }

    pub fn angles_deg(&self) -> &[f64] {
        &self.angles_deg
    }

    pub fn spacing_deg(&self) -> f64 {
        self.spacing_deg
    }

    pub fn len(&self) -> usize {
        self.angles_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles_deg.is_empty()
    }

    /// Index of the grid angle nearest to `angle_deg`.
    pub fn nearest_index(&self, angle_deg: f64) -> usize {
        let raw = ((angle_deg + 90.0) / self.spacing_deg).round();
        (raw.max(0.0) as usize).min(self.angles_deg.len() - 1)
    }
}

/// Generative description of one simulated trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayScenario {
    pub geometry: ArrayGeometry,
    pub true_doas_deg: Vec<f64>,
    pub num_snapshots: usize,
    /// Signal-to-Gaussian-noise ratio in dB; `f64::INFINITY` disables noise.
    pub snr_db: f64,
    /// Signal-to-outlier ratio in dB; strongly negative means strong outliers.
    pub sor_db: f64,
    pub outlier_prob: f64,
    /// Fully correlated source waveforms when set.
    pub coherent: bool,
    pub rng_seed: u64,
}

impl ArrayScenario {
    pub fn validate(&self) -> Result<()> {
        if self.true_doas_deg.is_empty() {
            return Err(CoreError::EmptyAngles);
        }
        for &d in &self.true_doas_deg {
            if !(d > -90.0 && d < 90.0) {
                return Err(CoreError::AngleOutOfRange(d));
            }
        }
        for (i, &a) in self.true_doas_deg.iter().enumerate() {
            for &b in &self.true_doas_deg[i + 1..] {
                if a == b {
                    return Err(CoreError::InvalidConfig(format!(
                        "duplicate source angle {a} deg"
                    )));
                }
            }
        }
        if self.num_snapshots == 0 {
            return Err(CoreError::InvalidConfig("num_snapshots must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.outlier_prob) {
            return Err(CoreError::InvalidConfig(format!(
                "outlier probability {} outside [0, 1]",
                self.outlier_prob
            )));
        }
        Ok(())
    }
}

/// One synthesized trial, kept decomposed so tests can check each term.
#[derive(Debug, Clone)]
pub struct SnapshotData {
    /// Y = clean + noise + outliers.
    pub observations: Array2<Complex64>,
    pub clean_signal: Array2<Complex64>,
    pub gaussian_noise: Array2<Complex64>,
    pub outliers: Array2<Complex64>,
    pub outlier_mask: Array2<bool>,
}

/// Array response to a unit source at `angle_deg`; element m is
/// `exp(-j 2 pi (d / lambda) m sin(theta))`, so element 0 is exactly 1.
pub fn steering_vector(geometry: &ArrayGeometry, angle_deg: f64) -> Result<Array1<Complex64>> {
    if !((-90.0..=90.0).contains(&angle_deg)) {
        return Err(CoreError::AngleOutOfRange(angle_deg));
    }
    let phase_step = -TAU * geometry.spacing_over_wavelength() * angle_deg.to_radians().sin();
    Ok(Array1::from_iter(
        (0..geometry.num_elements()).map(|m| Complex64::from_polar(1.0, phase_step * m as f64)),
    ))
}

/// Stacks steering vectors for `angles_deg` as columns; serves both the
/// K-source response and the overcomplete grid dictionary.
pub fn steering_matrix(geometry: &ArrayGeometry, angles_deg: &[f64]) -> Result<Array2<Complex64>> {
    if angles_deg.is_empty() {
        return Err(CoreError::EmptyAngles);
    }
    let m = geometry.num_elements();
    let mut out = Array2::zeros((m, angles_deg.len()));
    for (k, &angle) in angles_deg.iter().enumerate() {
        let col = steering_vector(geometry, angle)?;
        for i in 0..m {
            out[(i, k)] = col[i];
        }
    }
    Ok(out)
}

/// Per-radian derivative of the steering matrix: column k, element m is
/// `(-j 2 pi (d / lambda) m cos(theta_k)) * exp(-j 2 pi (d / lambda) m sin(theta_k))`.
///
/// Rejects +-90 degrees, where `cos(theta) = 0` collapses the derivative.
pub fn steering_derivative(
    geometry: &ArrayGeometry,
    angles_deg: &[f64],
) -> Result<Array2<Complex64>> {
    if angles_deg.is_empty() {
        return Err(CoreError::EmptyAngles);
    }
    let m = geometry.num_elements();
    let mut out = Array2::zeros((m, angles_deg.len()));
    for (k, &angle) in angles_deg.iter().enumerate() {
        if !(angle > -90.0 && angle < 90.0) {
            return Err(CoreError::EndfireDerivative(angle));
        }
        let rad = angle.to_radians();
        let phase_step = -TAU * geometry.spacing_over_wavelength() * rad.sin();
        let deriv_scale = -TAU * geometry.spacing_over_wavelength() * rad.cos();
        for i in 0..m {
            let factor = Complex64::new(0.0, deriv_scale * i as f64);
            out[(i, k)] = factor * Complex64::from_polar(1.0, phase_step * i as f64);
        }
    }
    Ok(out)
}

fn complex_normal(rng: &mut ChaCha8Rng, std_per_part: f64) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * std_per_part, im * std_per_part)
}

/// Draws one trial's snapshot matrix: unit-modulus sources, circularly
/// symmetric Gaussian noise with variance `10^(-snr_db / 10)`, and outliers on
/// a Bernoulli(p) mask with variance `10^(-sor_db / 10)`.
///
/// The same seed reproduces the same output bit for bit; the draw order
/// (sources, then noise, then mask, then outlier values) is part of that
/// contract.
pub fn synthesize(scenario: &ArrayScenario) -> Result<SnapshotData> {
    scenario.validate()?;
    let m = scenario.geometry.num_elements();
    let t = scenario.num_snapshots;
    let k = scenario.true_doas_deg.len();
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.rng_seed);

    let mut sources = Array2::zeros((k, t));
    if scenario.coherent {
        // One shared phase sequence, scaled by a fixed unit constant per source.
        let shared: Vec<Complex64> = (0..t)
            .map(|_| Complex64::from_polar(1.0, rng.random::<f64>() * TAU))
            .collect();
        for row in 0..k {
            let c = Complex64::from_polar(1.0, rng.random::<f64>() * TAU);
            for col in 0..t {
                sources[(row, col)] = c * shared[col];
            }
        }
    } else {
        for row in 0..k {
            for col in 0..t {
                sources[(row, col)] = Complex64::from_polar(1.0, rng.random::<f64>() * TAU);
            }
        }
    }

    let a = steering_matrix(&scenario.geometry, &scenario.true_doas_deg)?;
    let clean_signal = crate::linalg::mat_mul(&a, &sources);

    let noise_var = if scenario.snr_db.is_infinite() && scenario.snr_db > 0.0 {
        0.0
    } else {
        10f64.powf(-scenario.snr_db / 10.0)
    };
    let noise_std = (noise_var / 2.0).sqrt();
    let mut gaussian_noise = Array2::zeros((m, t));
    if noise_var > 0.0 {
        for row in 0..m {
            for col in 0..t {
                gaussian_noise[(row, col)] = complex_normal(&mut rng, noise_std);
            }
        }
    }

    let mut outlier_mask = Array2::from_elem((m, t), false);
    if scenario.outlier_prob > 0.0 {
        for row in 0..m {
            for col in 0..t {
                outlier_mask[(row, col)] = rng.random::<f64>() < scenario.outlier_prob;
            }
        }
    }
    let outlier_std = (10f64.powf(-scenario.sor_db / 10.0) / 2.0).sqrt();
    let mut outliers = Array2::zeros((m, t));
    for row in 0..m {
        for col in 0..t {
            if outlier_mask[(row, col)] {
                outliers[(row, col)] = complex_normal(&mut rng, outlier_std);
            }
        }
    }

    let observations = &clean_signal + &gaussian_noise + &outliers;
    Ok(SnapshotData {
        observations,
        clean_signal,
        gaussian_noise,
        outliers,
        outlier_mask,
    })
}
