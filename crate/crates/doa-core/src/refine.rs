//! Off-grid refinement: convert the row-sparse solution into on-grid picks,
//! then alternate least-squares source re-estimation with a first-order
//! Taylor correction of the picked angles until the gap update stalls.

use ndarray::Array2;
use num_complex::Complex64;

use crate::array::{steering_derivative, steering_matrix, AngleGrid, ArrayGeometry};
use crate::error::{CoreError, Result};
use crate::linalg::{lstsq, mat_mul, mul_conj_t, solve_real};

/// Grid rows selected as initial DOA estimates, strongest first.
#[derive(Debug, Clone, PartialEq)]
pub struct OnGridPicks {
    pub grid_indices: Vec<usize>,
    pub angles_deg: Vec<f64>,
    pub row_norms: Vec<f64>,
}

/// Refined angles with diagnostics; `gaps_deg` is the total offset each angle
/// moved from its on-grid pick.
#[derive(Debug, Clone, PartialEq)]
pub struct RefineResult {
    pub doas_deg: Vec<f64>,
    pub gaps_deg: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Knobs for the refinement loop beyond the pinned tolerance/iteration pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    pub tol: f64,
    pub max_iters: usize,
    /// Per-iteration cap on each |delta_k| in radians; the first-order model
    /// is only locally valid, so unclamped steps can jump between basins.
    /// `None` disables clamping. Defaults to half of a 2-degree grid cell.
    pub step_clamp_rad: Option<f64>,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            max_iters: 50,
            step_clamp_rad: Some(1.0_f64.to_radians()),
        }
    }
}

impl RefineOptions {
    /// Clamp matched to a grid: half a cell per iteration.
    pub fn for_grid(grid: &AngleGrid) -> Self {
        Self {
            step_clamp_rad: Some((grid.spacing_deg() / 2.0).to_radians()),
            ..Self::default()
        }
    }
}

/// Returns the K rows of X with the largest l2 norms, sorted by descending
/// norm; ties resolve to the lower row index. An all-zero X degenerates to
/// the first K indices, flagged by zero `row_norms`.
pub fn pick_on_grid(x: &Array2<Complex64>, grid: &AngleGrid, k: usize) -> Result<OnGridPicks> {
    let n = x.nrows();
    if k > n {
        return Err(CoreError::TooManyPicks { k, n });
    }
    if n != grid.len() {
        return Err(CoreError::ShapeMismatch(format!(
            "X has {n} rows but the grid has {} points",
            grid.len()
        )));
    }
    let norms: Vec<f64> = x
        .rows()
        .into_iter()
        .map(|row| row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    order.truncate(k);
    Ok(OnGridPicks {
        angles_deg: order.iter().map(|&i| grid.angles_deg()[i]).collect(),
        row_norms: order.iter().map(|&i| norms[i]).collect(),
        grid_indices: order,
    })
}

/// Solves the gap quadratic at the current angles: with
/// `H = Y - O_tilde - A(theta) X_hat`, `G = (B^H B) .* (X_hat X_hat^H)^T` and
/// `z = diag(X_hat H^H B)`, returns the real solution of `Re(G) delta = Re(z)`
/// in radians. Ill-conditioned systems fall back to a small ridge before
/// failing.
pub fn solve_gap(
    y: &Array2<Complex64>,
    o_tilde: &Array2<Complex64>,
    theta_deg: &[f64],
    x_hat: &Array2<Complex64>,
    geometry: &ArrayGeometry,
) -> Result<Vec<f64>> {
    let k = theta_deg.len();
    if x_hat.nrows() != k {
        return Err(CoreError::ShapeMismatch(format!(
            "X_hat has {} rows for {k} angles",
            x_hat.nrows()
        )));
    }
    let a = steering_matrix(geometry, theta_deg)?;
    let b = steering_derivative(geometry, theta_deg)?;
    let h = y - o_tilde - &mat_mul(&a, x_hat);

    // G = (B^H B) .* (X_hat X_hat^H)^T, Hermitian PSD.
    let btb = crate::linalg::conj_t_mul(&b, &b);
    let xxh = mul_conj_t(x_hat, x_hat);
    let mut g_re = Array2::zeros((k, k));
    for i in 0..k {
        for j in 0..k {
            // Transposing X X^H conjugates the (i, j) entry.
            g_re[(i, j)] = (btb[(i, j)] * xxh[(j, i)]).re;
        }
    }
    // z = diag(X_hat H^H B)
    let xh_h = mul_conj_t(x_hat, &h);
    let mut z_re = vec![0.0; k];
    for i in 0..k {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..h.nrows() {
            acc += xh_h[(i, m)] * b[(m, i)];
        }
        z_re[i] = acc.re;
    }

    const COND_LIMIT: f64 = 1e12;
    match solve_real(&g_re, &z_re) {
        Some((delta, cond)) if cond <= COND_LIMIT => Ok(delta),
        first_try => {
            let trace: f64 = (0..k).map(|i| g_re[(i, i)]).sum();
            let ridge = 1e-8 * trace / k as f64;
            let mut g_ridged = g_re;
            for i in 0..k {
                g_ridged[(i, i)] += ridge;
            }
            match solve_real(&g_ridged, &z_re) {
                Some((delta, _)) => Ok(delta),
                None => Err(CoreError::RefinementFailed(format!(
                    "gap system singular even with ridge (condition proxy {:?})",
                    first_try.map(|(_, c)| c)
                ))),
            }
        }
    }
}

/// Runs the alternating refinement from `picks` with explicit options.
///
/// Each iteration re-fits `X_hat` by least squares against `Y - O_tilde`,
/// solves the gap quadratic at the current angles, and steps every angle by
/// its (clamped) gap. Stops when the gap update stalls:
/// `||delta^{l+1} - delta^l|| / ||delta^l|| < tol`, with an absolute test on
/// the first iteration. Angles stay inside (-89.9, 89.9) degrees.
pub fn refine_with_options(
    y: &Array2<Complex64>,
    o_tilde: &Array2<Complex64>,
    picks: &OnGridPicks,
    geometry: &ArrayGeometry,
    opts: &RefineOptions,
) -> Result<RefineResult> {
    if picks.angles_deg.is_empty() {
        return Err(CoreError::EmptyAngles);
    }
    if !(opts.tol > 0.0) || opts.max_iters == 0 {
        return Err(CoreError::InvalidConfig(
            "refine needs tol > 0 and max_iters >= 1".into(),
        ));
    }
    let data = y - o_tilde;
    let mut theta: Vec<f64> = picks.angles_deg.clone();
    // Picks at +-90 would make the derivative degenerate; nudge inside.
    for t in theta.iter_mut() {
        *t = t.clamp(-89.9, 89.9);
    }
    let theta0 = theta.clone();
    let mut delta_prev: Vec<f64> = vec![0.0; theta.len()];
    let mut iterations = 0;
    let mut converged = false;

    for l in 0..opts.max_iters {
        let a = steering_matrix(geometry, &theta)?;
        let x_hat = lstsq(&a, &data)?;
        let delta = solve_gap(y, o_tilde, &theta, &x_hat, geometry)?;
        // The stall test below watches the raw gap estimates; the clamp is a
        // trust region on the applied step only, so two successive clamped
        // steps cannot masquerade as convergence.
        let mut step = delta.clone();
        if let Some(clamp) = opts.step_clamp_rad {
            for d in step.iter_mut() {
                *d = d.clamp(-clamp, clamp);
            }
        }
        for (t, &d) in theta.iter_mut().zip(step.iter()) {
            *t = (*t + d.to_degrees()).clamp(-89.9, 89.9);
        }
        iterations = l + 1;

        let prev_norm: f64 = delta_prev.iter().map(|d| d * d).sum::<f64>().sqrt();
        let diff_norm: f64 = delta
            .iter()
            .zip(delta_prev.iter())
            .map(|(d, p)| (d - p) * (d - p))
            .sum::<f64>()
            .sqrt();
        let stalled = if l == 0 || prev_norm == 0.0 {
            delta.iter().map(|d| d * d).sum::<f64>().sqrt() < opts.tol
        } else {
            diff_norm / prev_norm < opts.tol
        };
        delta_prev = delta;
        if stalled {
            converged = true;
            break;
        }
    }

    let gaps_deg: Vec<f64> = theta
        .iter()
        .zip(theta0.iter())
        .map(|(t, t0)| t - t0)
        .collect();
    Ok(RefineResult {
        doas_deg: theta,
        gaps_deg,
        iterations,
        converged,
    })
}

/// Refinement with the default step clamp (half of a 2-degree grid cell).
/// Use [`refine_with_options`] with [`RefineOptions::for_grid`] when the grid
/// spacing differs.
pub fn refine(
    y: &Array2<Complex64>,
    o_tilde: &Array2<Complex64>,
    picks: &OnGridPicks,
    geometry: &ArrayGeometry,
    tol: f64,
    max_iters: usize,
) -> Result<RefineResult> {
    refine_with_options(
        y,
        o_tilde,
        picks,
        geometry,
        &RefineOptions {
            tol,
            max_iters,
            ..RefineOptions::default()
        },
    )
}
