//! The MLC penalty, its variational weight, and the proximal operators used by
//! the ADMM solver: a log-penalty prox for outlier entries and row-wise soft
//! thresholding for the group-sparse source matrix.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{CoreError, Result};

/// Parameters of the minimax logarithmic concave penalty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlcParams {
    pub lam: f64,
    pub gamma: f64,
    pub eta: f64,
}

impl Default for MlcParams {
    fn default() -> Self {
        Self {
            lam: 1.0,
            gamma: 2.0,
            eta: 0.5,
        }
    }
}

impl MlcParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lam > 0.0 && self.gamma > 0.0 && self.eta > 0.0) {
            return Err(CoreError::InvalidConfig(format!(
                "MLC parameters must be strictly positive: lam={}, gamma={}, eta={}",
                self.lam, self.gamma, self.eta
            )));
        }
        Ok(())
    }

    /// Magnitude at which the penalty saturates: `eta * (e^(gamma lam) - 1)`.
    pub fn saturation_point(&self) -> f64 {
        self.eta * ((self.gamma * self.lam).exp() - 1.0)
    }

    /// Saturated penalty value: `gamma lam^2 / 2`.
    pub fn saturation_value(&self) -> f64 {
        self.gamma * self.lam * self.lam / 2.0
    }
}

/// The MLC penalty of a complex scalar: concave-log growth up to the
/// saturation point, constant `gamma lam^2 / 2` beyond it.
pub fn mlc_value(params: &MlcParams, x: Complex64) -> f64 {
    let mag = x.norm();
    if mag > params.saturation_point() {
        return params.saturation_value();
    }
    let g = (mag / params.eta + 1.0).ln();
    params.lam * g - g * g / (2.0 * params.gamma)
}

/// Optimal weight of the penalty's variational form:
/// `max(lam - log(|x| / eta + 1) / gamma, 0)`.
pub fn variational_weight(params: &MlcParams, x: Complex64) -> f64 {
    let g = (x.norm() / params.eta + 1.0).ln();
    (params.lam - g / params.gamma).max(0.0)
}

fn log_objective(mu: f64, eta: f64, mag: f64, c_mag: f64) -> f64 {
    mu * (mag + eta).ln() + 0.5 * (mag - c_mag) * (mag - c_mag)
}

/// Proximity operator of `mu log(|x| + eta)`: the global minimizer of
/// `mu log(|x| + eta) + 0.5 |x - c|^2`.
///
/// The minimizer keeps the phase of `c`; its magnitude is either 0 or the
/// larger stationary point `((|c| - eta) + sqrt((|c| + eta)^2 - 4 mu)) / 2`,
/// whichever has the lower objective (ties resolve to 0).
pub fn log_prox(mu: f64, eta: f64, c: Complex64) -> Complex64 {
    debug_assert!(mu > 0.0 && eta > 0.0);
    let c_mag = c.norm();
    if c_mag == 0.0 {
        return Complex64::ZERO;
    }
    let disc = (c_mag + eta) * (c_mag + eta) - 4.0 * mu;
    if disc < 0.0 {
        return Complex64::ZERO;
    }
    let alpha = ((c_mag - eta) + disc.sqrt()) / 2.0;
    if alpha <= 0.0 {
        return Complex64::ZERO;
    }
    // The log penalty is nonconvex: the stationary point can lose to 0.
    if log_objective(mu, eta, alpha, c_mag) < log_objective(mu, eta, 0.0, c_mag) {
        c * (alpha / c_mag)
    } else {
        Complex64::ZERO
    }
}

/// One reweighted proximal step of the MLC penalty: evaluates the variational
/// weight at the previous iterate `x_prev`, then applies `log_prox` with the
/// reweighted strength `mu * w`. A saturated weight (`w = 0`) disables
/// shrinkage entirely and `c` passes through.
pub fn mlc_prox(params: &MlcParams, mu: f64, c: Complex64, x_prev: Complex64) -> Complex64 {
    debug_assert!(mu > 0.0);
    let w = variational_weight(params, x_prev);
    if w <= 0.0 {
        return c;
    }
    log_prox(mu * w, params.eta, c)
}

/// Row-wise soft thresholding: row i shrinks to
/// `row * (||row|| - tau) / ||row||` when `||row|| >= tau`, else to zero.
pub fn row_soft_threshold(c: &Array2<Complex64>, tau: f64) -> Array2<Complex64> {
    debug_assert!(tau >= 0.0);
    let mut out = c.clone();
    for mut row in out.rows_mut() {
        let norm: f64 = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm >= tau && norm > 0.0 {
            let scale = (norm - tau) / norm;
            for z in row.iter_mut() {
                *z *= scale;
            }
        } else {
            row.fill(Complex64::ZERO);
        }
    }
    out
}
