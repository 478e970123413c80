//! Adaptive Simpson quadrature on finite intervals, with a helper for
//! whole-line integrals of kernels that decay like Gaussians (truncate the
//! tails and split at the origin, where our integrands have a kink).

/// Adaptive Simpson integration of `f` on [a, b] to absolute tolerance
/// `tol` (error estimate based on Richardson comparison of the halves).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Integral of `f` over the whole line for integrands concentrated around
/// `center` with scale `sigma`: truncates at 12σ and splits at 0 (the
/// integrands in this crate are smooth except for a kink at the origin).
pub fn integrate_line<F: Fn(f64) -> f64>(f: &F, center: f64, sigma: f64, tol: f64) -> f64 {
    let lo = (center - 12.0 * sigma).min(-12.0 * sigma);
    let hi = (center + 12.0 * sigma).max(12.0 * sigma);
    if lo < 0.0 && hi > 0.0 {
        adaptive_simpson(f, lo, 0.0, tol / 2.0) + adaptive_simpson(f, 0.0, hi, tol / 2.0)
    } else {
        adaptive_simpson(f, lo, hi, tol)
    }
}
