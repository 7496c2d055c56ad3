//! Dense complex linear algebra on the small matrices this crate works with.
//!
//! Everything here is hand-rolled rather than delegated to BLAS/LAPACK: the
//! largest matrix in the pipeline is 91x91, and bit-reproducible results across
//! machines matter more than peak throughput. Loop orders are chosen so the
//! innermost loop runs over contiguous row slices.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{CoreError, Result};

/// `A * B` for row-major complex matrices.
///
/// The k-outer loop order keeps each output element's accumulation in
/// ascending-k order (matching the naive triple loop bit for bit) while
/// letting all-zero rows of `b` drop out up front — the ADMM X iterate is
/// row-sparse after thresholding, and skipping its dead rows is most of the
/// solver's speed.
pub fn mat_mul(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (m, ka) = a.dim();
    let (kb, n) = b.dim();
    assert_eq!(ka, kb, "mat_mul: inner dimensions {ka} vs {kb}");
    let mut out = Array2::zeros((m, n));
    for k in 0..ka {
        let brow = b.row(k);
        let brow = brow.as_slice().expect("standard layout");
        if brow.iter().all(|z| *z == Complex64::ZERO) {
            continue;
        }
        for i in 0..m {
            let aik = a[(i, k)];
            let mut orow = out.row_mut(i);
            let orow = orow.as_slice_mut().expect("standard layout");
            for (o, &bv) in orow.iter_mut().zip(brow) {
                *o += aik * bv;
            }
        }
    }
    out
}

/// `A^H * B` (conjugate transpose of `a` times `b`) without materializing `A^H`.
pub fn conj_t_mul(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (m, n) = a.dim();
    let (mb, t) = b.dim();
    assert_eq!(m, mb, "conj_t_mul: row counts {m} vs {mb}");
    let mut out = Array2::zeros((n, t));
    for i in 0..m {
        let arow = a.row(i);
        let arow = arow.as_slice().expect("standard layout");
        let brow = b.row(i);
        let brow = brow.as_slice().expect("standard layout");
        for (j, &aij) in arow.iter().enumerate() {
            let c = aij.conj();
            let mut orow = out.row_mut(j);
            let orow = orow.as_slice_mut().expect("standard layout");
            for (o, &bv) in orow.iter_mut().zip(brow) {
                *o += c * bv;
            }
        }
    }
    out
}

/// `A * B^H`; each output entry is a contiguous conjugated row dot product.
pub fn mul_conj_t(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (m, ka) = a.dim();
    let (n, kb) = b.dim();
    assert_eq!(ka, kb, "mul_conj_t: inner dimensions {ka} vs {kb}");
    let mut out = Array2::zeros((m, n));
    for i in 0..m {
        let arow = a.row(i);
        let arow = arow.as_slice().expect("standard layout");
        for j in 0..n {
            let brow = b.row(j);
            let brow = brow.as_slice().expect("standard layout");
            let mut acc = Complex64::ZERO;
            for (&av, &bv) in arow.iter().zip(brow) {
                acc += av * bv.conj();
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Frobenius norm.
pub fn fro_norm(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Least-squares solve of `min ||A X - B||_F` via complex Householder QR.
///
/// Requires `A` (m x k) with m >= k and full column rank; returns the k x n
/// solution. Near-collinear columns surface as a tiny diagonal in R and are
/// reported as an error instead of amplifying noise.
pub fn lstsq(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let (m, k) = a.dim();
    let (mb, n) = b.dim();
    if mb != m {
        return Err(CoreError::ShapeMismatch(format!(
            "lstsq: A is {m}x{k} but B has {mb} rows"
        )));
    }
    if m < k {
        return Err(CoreError::ShapeMismatch(format!(
            "lstsq: underdetermined system ({m} rows, {k} columns)"
        )));
    }
    let mut r = a.clone();
    let mut rhs = b.clone();
    let scale = fro_norm(a).max(f64::MIN_POSITIVE);

    for j in 0..k {
        // Householder vector for column j below the diagonal.
        let norm_x: f64 = (j..m).map(|i| r[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x < 1e-14 * scale {
            return Err(CoreError::RefinementFailed(format!(
                "rank-deficient least-squares system (column {j})"
            )));
        }
        let x0 = r[(j, j)];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::ONE
        };
        let alpha = -phase * norm_x;
        // v = x - alpha*e1, chosen so the subtraction never cancels.
        let mut v: Vec<Complex64> = (j..m).map(|i| r[(i, j)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 > 0.0 {
            let tau = 2.0 / vnorm2;
            // Apply H = I - tau v v^H to the trailing columns of R and to RHS.
            for col in j..k {
                let dot: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(i, &vi)| vi.conj() * r[(j + i, col)])
                    .sum();
                let f = tau * dot;
                for (i, &vi) in v.iter().enumerate() {
                    r[(j + i, col)] -= f * vi;
                }
            }
            for col in 0..n {
                let dot: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(i, &vi)| vi.conj() * rhs[(j + i, col)])
                    .sum();
                let f = tau * dot;
                for (i, &vi) in v.iter().enumerate() {
                    rhs[(j + i, col)] -= f * vi;
                }
            }
        }
        r[(j, j)] = alpha;
        for i in (j + 1)..m {
            r[(i, j)] = Complex64::ZERO;
        }
    }

    for j in 0..k {
        if r[(j, j)].norm() < 1e-12 * scale {
            return Err(CoreError::RefinementFailed(format!(
                "rank-deficient least-squares system (pivot {j})"
            )));
        }
    }

    // Back substitution on the k x k triangle.
    let mut x = Array2::zeros((k, n));
    for col in 0..n {
        for row in (0..k).rev() {
            let mut acc = rhs[(row, col)];
            for inner in (row + 1)..k {
                acc -= r[(row, inner)] * x[(inner, col)];
            }
            x[(row, col)] = acc / r[(row, row)];
        }
    }
    Ok(x)
}

/// Gaussian elimination with partial pivoting for small real systems.
///
/// Returns the solution together with a pivot-ratio condition proxy
/// (max |pivot| / min |pivot|), or `None` when a pivot underflows to zero.
pub fn solve_real(a: &Array2<f64>, b: &[f64]) -> Option<(Vec<f64>, f64)> {
    let n = a.nrows();
    assert_eq!(a.ncols(), n, "solve_real: square matrix required");
    assert_eq!(b.len(), n, "solve_real: rhs length");
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let mut max_piv = 0.0f64;
    let mut min_piv = f64::INFINITY;

    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, m[(r, col)].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if pivot_abs == 0.0 || !pivot_abs.is_finite() {
            return None;
        }
        max_piv = max_piv.max(pivot_abs);
        min_piv = min_piv.min(pivot_abs);
        if pivot_row != col {
            for c in 0..n {
                m.swap((col, c), (pivot_row, c));
            }
            rhs.swap(col, pivot_row);
        }
        for r in (col + 1)..n {
            let f = m[(r, col)] / m[(col, col)];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                let v = m[(col, c)];
                m[(r, c)] -= f * v;
            }
            rhs[r] -= f * rhs[col];
        }
    }

    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for col in (row + 1)..n {
            acc -= m[(row, col)] * x[col];
        }
        x[row] = acc / m[(row, row)];
    }
    if x.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some((x, max_piv / min_piv))
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns eigenvalues in ascending order with matching eigenvector columns.
/// Deterministic: fixed sweep order, no randomization.
pub fn eigh_hermitian(a: &Array2<Complex64>) -> (Vec<f64>, Array2<Complex64>) {
    let n = a.nrows();
    assert_eq!(a.ncols(), n, "eigh_hermitian: square matrix required");
    let mut m = a.clone();
    let mut v: Array2<Complex64> = Array2::eye(n);
    let scale = fro_norm(&m).max(f64::MIN_POSITIVE);

    for _sweep in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| m[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let phase = apq / r;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = phase * (c * t);
                // Right-multiply rows/columns p and q by J = [[c, s], [-s*, c]],
                // left-multiply by J^H; zeroes the (p, q) entry exactly.
                for i in 0..n {
                    let aip = m[(i, p)];
                    let aiq = m[(i, q)];
                    m[(i, p)] = c * aip - s.conj() * aiq;
                    m[(i, q)] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = m[(p, j)];
                    let aqj = m[(q, j)];
                    m[(p, j)] = c * apj - s * aqj;
                    m[(q, j)] = s.conj() * apj + c * aqj;
                }
                m[(p, q)] = Complex64::ZERO;
                m[(q, p)] = Complex64::ZERO;
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s.conj() * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, dst)] = v[(i, src)];
        }
    }
    (eigenvalues, vectors)
}
