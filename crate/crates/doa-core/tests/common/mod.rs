//! Shared oracles for the contract tests: brute-force 1-D minimization and a
//! golden-section polisher, both independent of the library's closed forms.
#![allow(dead_code)]

/// Golden-section search for the minimum of `f` on `[lo, hi]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Coarse grid scan over `[lo, hi]` at `step`, polished by golden-section
/// around the best bracket. Returns the approximate minimizer.
pub fn grid_then_golden<F: Fn(f64) -> f64 + Copy>(f: F, lo: f64, hi: f64, step: f64) -> f64 {
    let n = ((hi - lo) / step).ceil() as usize;
    let mut best_x = lo;
    let mut best_f = f(lo);
    for i in 1..=n {
        let x = lo + i as f64 * step;
        let fx = f(x.min(hi));
        if fx < best_f {
            best_f = fx;
            best_x = x.min(hi);
        }
    }
    let bracket_lo = (best_x - step).max(lo);
    let bracket_hi = (best_x + step).min(hi);
    golden_section(f, bracket_lo, bracket_hi, 80)
}
