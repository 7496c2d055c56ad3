//! Linearized ADMM for the on-grid robust recovery problem: row-sparse source
//! matrix X, dot-sparse outliers O, Gaussian residual W, dual U.
//!
//! The X subproblem is linearized around the current iterate with a fixed
//! proximal step `beta`, which keeps every update in closed form. `beta` must
//! satisfy `beta * sigma_max(A)^2 < 1` for the gradient step to contract;
//! callers working with a raw unit-modulus dictionary should normalize its
//! columns (see the benchmark harness) or shrink `beta` accordingly.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::linalg::{conj_t_mul, fro_norm, mat_mul};
use crate::prox::{mlc_prox, row_soft_threshold, MlcParams};

/// Solver hyperparameters. Defaults mirror the reference configuration:
/// `rho = 3`, `beta = 0.03`, `tol = 1e-4`, 500 iterations, MLC at
/// `(lam, gamma, eta) = (1, 2, 0.5)`. The sparsity weights `lambda1`/`lambda2`
/// are scenario-dependent and default to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmmConfig {
    /// Row-sparsity weight on X.
    pub lambda1: f64,
    /// Outlier penalty weight on O.
    pub lambda2: f64,
    /// Augmented Lagrangian parameter.
    pub rho: f64,
    /// Proximal (linearization) step for the X update.
    pub beta: f64,
    pub mlc: MlcParams,
    /// Relative-change stopping tolerance on X.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            lambda1: 1.0,
            lambda2: 1.0,
            rho: 3.0,
            beta: 0.03,
            mlc: MlcParams::default(),
            tol: 1e-4,
            max_iters: 500,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("rho", self.rho),
            ("beta", self.beta),
            ("tol", self.tol),
        ];
        for (name, value) in fields {
            if !(value > 0.0) || !value.is_finite() {
                return Err(CoreError::InvalidConfig(format!(
                    "{name} must be strictly positive and finite, got {value}"
                )));
            }
        }
        if self.max_iters == 0 {
            return Err(CoreError::InvalidConfig("max_iters must be >= 1".into()));
        }
        self.mlc.validate()
    }
}

/// Current primal/dual iterates.
#[derive(Debug, Clone)]
pub struct AdmmState {
    /// N x T row-sparse source matrix.
    pub x: Array2<Complex64>,
    /// M x T outlier matrix.
    pub o: Array2<Complex64>,
    /// M x T Gaussian residual.
    pub w: Array2<Complex64>,
    /// M x T scaled dual variable.
    pub u: Array2<Complex64>,
    pub iter: usize,
}

/// Solver output with per-iteration diagnostics.
#[derive(Debug, Clone)]
pub struct AdmmResult {
    pub x: Array2<Complex64>,
    pub o: Array2<Complex64>,
    pub w: Array2<Complex64>,
    pub iterations: usize,
    pub converged: bool,
    /// `||X^{l+1} - X^l||_F / ||X^l||_F` per iteration.
    pub rel_change_history: Vec<f64>,
    /// `||A X + W + O - Y||_F` per iteration.
    pub feasibility_history: Vec<f64>,
}

fn x_step(
    ax: &Array2<Complex64>,
    state: &AdmmState,
    a: &Array2<Complex64>,
    y: &Array2<Complex64>,
    cfg: &AdmmConfig,
) -> Array2<Complex64> {
    let v = y + &(&state.u / cfg.rho) - &state.w - &state.o;
    let d = conj_t_mul(a, &(ax - &v));
    let stepped = &state.x - &(&d * cfg.beta);
    row_soft_threshold(&stepped, cfg.lambda1 * cfg.beta / cfg.rho)
}

/// X update: gradient step on the linearized data-fit term followed by
/// row-wise soft thresholding at `lambda1 * beta / rho`.
pub fn update_x(
    state: &AdmmState,
    a: &Array2<Complex64>,
    y: &Array2<Complex64>,
    cfg: &AdmmConfig,
) -> Array2<Complex64> {
    let ax = mat_mul(a, &state.x);
    x_step(&ax, state, a, y, cfg)
}

fn o_step(
    ax_new: &Array2<Complex64>,
    state: &AdmmState,
    y: &Array2<Complex64>,
    cfg: &AdmmConfig,
) -> Array2<Complex64> {
    let q = y - ax_new - &state.w + &(&state.u / cfg.rho);
    let mu = cfg.lambda2 / cfg.rho;
    let mut out = q;
    for (o_new, &o_prev) in out.iter_mut().zip(state.o.iter()) {
        *o_new = mlc_prox(&cfg.mlc, mu, *o_new, o_prev);
    }
    out
}

fn w_step(
    ax_new: &Array2<Complex64>,
    o_new: &Array2<Complex64>,
    state: &AdmmState,
    y: &Array2<Complex64>,
    cfg: &AdmmConfig,
) -> Array2<Complex64> {
    let inner = ax_new + o_new - y - &(&state.u / cfg.rho);
    inner * (-cfg.rho / (cfg.rho + 1.0))
}

/// O update: element-wise reweighted log prox of `Q = Y - A X^{l+1} - W + U / rho`,
/// with the variational weight anchored at the previous outlier iterate.
/// Assumes `state.x` already holds X^{l+1}.
pub fn update_o(
    state: &AdmmState,
    a: &Array2<Complex64>,
    y: &Array2<Complex64>,
    cfg: &AdmmConfig,
) -> Array2<Complex64> {
    let ax_new = mat_mul(a, &state.x);
    o_step(&ax_new, state, y, cfg)
}

/// W update: exact minimizer `-rho / (rho + 1) * (A X^{l+1} + O^{l+1} - Y - U / rho)`.
/// Assumes `state.x` and `state.o` already hold the l+1 iterates.
pub fn update_w(
    state: &AdmmState,
    a: &Array2<Complex64>,
    y: &Array2<Complex64>,
    cfg: &AdmmConfig,
) -> Array2<Complex64> {
    let ax_new = mat_mul(a, &state.x);
    w_step(&ax_new, &state.o, state, y, cfg)
}

/// Dual update: `U - rho * (A X^{l+1} + W^{l+1} + O^{l+1} - Y)`.
/// Assumes `state.x`, `state.o`, `state.w` already hold the l+1 iterates.
pub fn update_u(
    state: &AdmmState,
    a: &Array2<Complex64>,
    y: &Array2<Complex64>,
    cfg: &AdmmConfig,
) -> Array2<Complex64> {
    let ax_new = mat_mul(a, &state.x);
    let resid = &ax_new + &state.w + &state.o - y;
    &state.u - &(&resid * cfg.rho)
}

/// Runs the full recursion from the cold start `X = A^H Y`, `O = Y`,
/// `W = U = 0`, stopping on the relative change of X (absolute change when
/// the previous X is exactly zero) or at the iteration cap.
pub fn solve(
    a: &Array2<Complex64>,
    y: &Array2<Complex64>,
    cfg: &AdmmConfig,
) -> Result<AdmmResult> {
    cfg.validate()?;
    let (m, _n) = a.dim();
    let (my, _t) = y.dim();
    if m < 2 {
        return Err(CoreError::ShapeMismatch(format!(
            "dictionary must have at least 2 rows, got {m}"
        )));
    }
    if my != m {
        return Err(CoreError::ShapeMismatch(format!(
            "dictionary has {m} rows but data has {my}"
        )));
    }

    let mut state = AdmmState {
        x: conj_t_mul(a, y),
        o: y.clone(),
        w: Array2::zeros(y.dim()),
        u: Array2::zeros(y.dim()),
        iter: 0,
    };
    let mut rel_history = Vec::new();
    let mut feas_history = Vec::new();
    let mut converged = false;
    // A X is carried across iterations: the product computed for the O/W/U
    // updates of step l is exactly the one the X update of step l+1 needs.
    let mut ax = mat_mul(a, &state.x);

    for l in 0..cfg.max_iters {
        let x_new = x_step(&ax, &state, a, y, cfg);
        let x_prev_norm = fro_norm(&state.x);
        let diff = fro_norm(&(&x_new - &state.x));
        let rel = if x_prev_norm > 0.0 {
            diff / x_prev_norm
        } else {
            diff
        };

        let ax_new = mat_mul(a, &x_new);
        state.x = x_new;
        let o_new = o_step(&ax_new, &state, y, cfg);
        let w_new = w_step(&ax_new, &o_new, &state, y, cfg);
        let resid = &ax_new + &w_new + &o_new - y;
        let feas = fro_norm(&resid);
        state.u = &state.u - &(&resid * cfg.rho);
        state.o = o_new;
        state.w = w_new;
        state.iter = l + 1;
        ax = ax_new;

        if !rel.is_finite() || !feas.is_finite() {
            return Err(CoreError::Divergence(l + 1));
        }
        rel_history.push(rel);
        feas_history.push(feas);

        if rel < cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(AdmmResult {
        x: state.x,
        o: state.o,
        w: state.w,
        iterations: state.iter,
        converged,
        rel_change_history: rel_history,
        feasibility_history: feas_history,
    })
}
