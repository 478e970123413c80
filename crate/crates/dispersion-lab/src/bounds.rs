//! Second-order rate formulas: the no-feedback baseline, the half-block
//! timid/bold improvement (with its finite-horizon bound and the α search),
//! the matching feedback lower/upper bounds, and curve assembly for the
//! ε-sweep report.

use crate::analyze::{ChannelAnalysis, DispersionClass};
use crate::channel::{third_abs_moment_about, Dmc};
use crate::controllers::r_of_eps;
use crate::error::{Error, Result};
use crate::special::{norm_inv, norm_pdf};
use serde::{Deserialize, Serialize};

/// No-feedback second-order rate √V_ε · Φ⁻¹(ε) in nats per √(channel use);
/// V_ε is V_min below ε = 1/2 and V_max at or above it.
pub fn strassen_rate(eps: f64, analysis: &ChannelAnalysis) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must be in (0,1), got {eps}")));
    }
    let v = analysis.v_eps(eps);
    if !(v > 0.0) {
        return Err(Error::Domain(format!("V_eps must be positive, got {v}")));
    }
    Ok(v.sqrt() * norm_inv(eps)?)
}

/// The α-selection function for the half-block policy:
/// f(α) = ε(α−1) − (1−β)·φ(2√2 Φ⁻¹(αε))·(1/√(2π) − φ(√2 Φ⁻¹(αε))).
/// Any α with f(α) < 0 yields a rate improvement; f(1) < 0 always.
pub fn thm1_f(alpha: f64, eps: f64, beta: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Domain(format!("eps must be in (0, 0.5), got {eps}")));
    }
    if !(alpha >= 1.0 && alpha < 1.0 / (2.0 * eps)) {
        return Err(Error::Domain(format!(
            "alpha must be in [1, {}), got {alpha}",
            1.0 / (2.0 * eps)
        )));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Domain(format!("beta must be in (0,1], got {beta}")));
    }
    let q = norm_inv(alpha * eps)?;
    let sqrt2 = std::f64::consts::SQRT_2;
    let inv_sqrt_2pi = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    Ok(eps * (alpha - 1.0)
        - (1.0 - beta) * norm_pdf(2.0 * sqrt2 * q) * (inv_sqrt_2pi - norm_pdf(sqrt2 * q)))
}

/// Largest α ∈ (1, 1/(2ε)) with f(α) ≤ −tol: coarse grid scan for the last
/// sign change, then bisection. Maximizing α gives the strongest rate.
pub fn find_alpha(eps: f64, beta: f64, tol: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("beta must be in (0,1), got {beta}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    let hi = 1.0 / (2.0 * eps);
    // The feasible region hugs α = 1 (f(1) < 0 but the crossing can sit at
    // α − 1 ~ 1e-4 or closer), so scan α − 1 on a log-spaced grid spanning
    // twelve decades, tracking the last point with f ≤ −tol.
    let grid = 4096usize;
    let mut best: Option<f64> = None;
    let mut prev_ok = false;
    let mut bracket: Option<(f64, f64)> = None;
    let mut prev_a = 1.0;
    for i in 0..grid {
        let frac = i as f64 / (grid - 1) as f64;
        let a = 1.0 + (hi - 1.0) * 10f64.powf(-12.0 * (1.0 - frac));
        if a >= hi {
            break;
        }
        let ok = thm1_f(a, eps, beta)? <= -tol;
        if ok {
            best = Some(a);
        } else if prev_ok {
            bracket = Some((prev_a, a));
        }
        prev_ok = ok;
        prev_a = a;
    }
    if prev_ok {
        // Still feasible at the last grid point; f turns positive before hi
        // (it tends to ε(1/(2ε) − 1) > 0), so bracket against the endpoint.
        bracket = Some((prev_a, hi - (hi - 1.0) * 1e-12));
    }
    let mut best = best.ok_or_else(|| {
        Error::NotFound(format!("no alpha with f <= -{tol} for eps={eps}, beta={beta}"))
    })?;
    // Refine the last crossing to push alpha as high as possible.
    if let Some((mut lo, mut up)) = bracket {
        for _ in 0..80 {
            let mid = 0.5 * (lo + up);
            if thm1_f(mid, eps, beta)? <= -tol {
                lo = mid;
            } else {
                up = mid;
            }
        }
        best = best.max(lo);
    }
    Ok(best)
}

/// Finite-horizon tail bound for the half-block policy, and the horizon at
/// which it first beats the target ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteNBound {
    /// f(α) + ε + (4κ̲ + κ̄)/√(2n).
    pub bound: f64,
    /// Normalized third absolute moment under the timid input (+1).
    pub kappa_min: f64,
    /// Same under the bold input (+1).
    pub kappa_max: f64,
}

/// Evaluates Γ_n ≤ f(α) + ε + (4κ̲ + κ̄)/√(2n), with κ̲ and κ̄ computed
/// exactly from the channel: normalized third absolute central moments of
/// the information density under the timid and bold inputs, plus one.
pub fn thm1_finite_n_gamma_bound(
    alpha: f64,
    eps: f64,
    ch: &Dmc,
    analysis: &ChannelAnalysis,
    n: usize,
) -> Result<FiniteNBound> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::Domain(format!("n must be positive and even, got {n}")));
    }
    if !(analysis.v_min > 0.0) {
        return Err(Error::Domain("finite-n bound needs V_min > 0".into()));
    }
    let f = thm1_f(alpha, eps, analysis.beta)?;
    let m_min = third_abs_moment_about(
        ch,
        &analysis.q_star,
        &analysis.q_min,
        analysis.capacity_nats,
    )?;
    let m_max = third_abs_moment_about(
        ch,
        &analysis.q_star,
        &analysis.q_max,
        analysis.capacity_nats,
    )?;
    let kappa_min = m_min / analysis.v_min.powf(1.5) + 1.0;
    let kappa_max = m_max / analysis.v_max.powf(1.5) + 1.0;
    let bound = f + eps + (4.0 * kappa_min + kappa_max) / (2.0 * n as f64).sqrt();
    Ok(FiniteNBound { bound, kappa_min, kappa_max })
}

/// Smallest even horizon at which the finite-n bound drops below ε (up to
/// the floating-point resolution of the bound), if any exists below `n_cap`.
pub fn thm1_n0(
    alpha: f64,
    eps: f64,
    ch: &Dmc,
    analysis: &ChannelAnalysis,
    n_cap: usize,
) -> Result<Option<usize>> {
    let probe = thm1_finite_n_gamma_bound(alpha, eps, ch, analysis, 2)?;
    let f = probe.bound - eps - (4.0 * probe.kappa_min + probe.kappa_max) / 2.0;
    if f >= 0.0 {
        return Ok(None); // f(α) ≥ 0: the bound can never cross below ε
    }
    // Solve (4κ̲+κ̄)/√(2n) < −f(α) directly, then round up to even.
    let need = (4.0 * probe.kappa_min + probe.kappa_max) / (-f);
    let n_real = need * need / 2.0;
    let mut n = (n_real.ceil() as usize).max(2);
    if n % 2 == 1 {
        n += 1;
    }
    // Confirm (guards rounding at the crossover).
    while thm1_finite_n_gamma_bound(alpha, eps, ch, analysis, n)?.bound >= eps {
        n += 2;
        if n > n_cap {
            return Ok(None);
        }
    }
    Ok(if n <= n_cap { Some(n) } else { None })
}

/// Feedback achievability rate: r(ε) evaluated at the polytope dispersion
/// extremes (V_min, V_max).
pub fn thm2_rate(eps: f64, analysis: &ChannelAnalysis) -> Result<f64> {
    if !(analysis.v_min > 0.0) {
        return Err(Error::Domain("rate needs V_min > 0".into()));
    }
    r_of_eps(eps, analysis.v_min, analysis.v_max)
}

/// Feedback converse for simple-dispersion channels: equals the
/// no-feedback rate. Errors on compound channels.
pub fn thm3_rate(eps: f64, analysis: &ChannelAnalysis) -> Result<f64> {
    if analysis.dispersion_class != DispersionClass::Simple {
        return Err(Error::NotSimpleDispersion {
            v_min: analysis.v_min,
            v_max: analysis.v_max,
        });
    }
    strassen_rate(eps, analysis)
}

/// General feedback converse: r(ε) at the per-symbol variance extremes
/// (ν_min, ν_max) over the whole input alphabet.
pub fn thm4_rate(eps: f64, analysis: &ChannelAnalysis) -> Result<f64> {
    if !(analysis.nu_min > 0.0) {
        return Err(Error::Domain("rate needs nu_min > 0".into()));
    }
    r_of_eps(eps, analysis.nu_min, analysis.nu_max)
}

/// The four second-order rate curves over an ε grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCurve {
    pub eps_grid: Vec<f64>,
    /// √V_ε Φ⁻¹(ε).
    pub no_feedback: Vec<f64>,
    /// Half-block improvement √V_ε Φ⁻¹(αε); NaN where ε ≥ 1/2 (undefined).
    pub thm1_lower: Vec<f64>,
    /// Feedback achievability (V extremes).
    pub fb_lower: Vec<f64>,
    /// Feedback converse (ν extremes).
    pub fb_upper: Vec<f64>,
}

/// Evaluates all four curves on the grid. The half-block curve uses
/// `find_alpha` per point with tolerance 1e-9 and is NaN outside (0, 1/2)
/// or when β = 1 (no improvement exists).
pub fn build_rate_curve(analysis: &ChannelAnalysis, eps_grid: &[f64]) -> Result<RateCurve> {
    if eps_grid.is_empty() || eps_grid.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::Domain("eps grid must be nonempty inside (0,1)".into()));
    }
    if eps_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("eps grid must be strictly increasing".into()));
    }
    let mut no_feedback = Vec::with_capacity(eps_grid.len());
    let mut thm1_lower = Vec::with_capacity(eps_grid.len());
    let mut fb_lower = Vec::with_capacity(eps_grid.len());
    let mut fb_upper = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        no_feedback.push(strassen_rate(eps, analysis)?);
        fb_lower.push(thm2_rate(eps, analysis)?);
        fb_upper.push(thm4_rate(eps, analysis)?);
        let t1 = if eps < 0.5 && analysis.beta < 1.0 {
            match find_alpha(eps, analysis.beta, 1e-9) {
                Ok(alpha) => analysis.v_eps(eps).sqrt() * norm_inv(alpha * eps)?,
                Err(Error::NotFound(_)) => f64::NAN,
                Err(e) => return Err(e),
            }
        } else {
            f64::NAN
        };
        thm1_lower.push(t1);
    }
    Ok(RateCurve { eps_grid: eps_grid.to_vec(), no_feedback, thm1_lower, fb_lower, fb_upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyze::{analyze, Tolerances};
    use crate::channel::{bsc, compound_example_channel};

    fn compound() -> (Dmc, ChannelAnalysis) {
        let ch = compound_example_channel(0.8).unwrap();
        let a = analyze(&ch, Tolerances::default()).unwrap();
        (ch, a)
    }

    #[test]
    fn strassen_values() {
        let ch = bsc(0.1).unwrap();
        let a = analyze(&ch, Tolerances::default()).unwrap();
        let r = strassen_rate(0.1, &a).unwrap();
        assert!((r - 0.4345016258925295f64.sqrt() * norm_inv(0.1).unwrap()).abs() < 1e-12);
        assert!(strassen_rate(0.5, &a).unwrap().abs() < 1e-12);
        let (_, ac) = compound();
        let r9 = strassen_rate(0.9, &ac).unwrap();
        assert!((r9 - ac.v_max.sqrt() * norm_inv(0.9).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn f_is_negative_at_one_and_degenerate_at_beta_one() {
        for (eps, beta) in [(0.1, 0.3), (0.2, 0.7), (0.05, 0.9)] {
            assert!(thm1_f(1.0, eps, beta).unwrap() < 0.0);
        }
        for alpha in [1.0, 1.5, 2.0] {
            let v = thm1_f(alpha, 0.1, 1.0).unwrap();
            assert!((v - 0.1 * (alpha - 1.0)).abs() < 1e-15);
        }
        // The domain is half-open: alpha < 1/(2 eps).
        assert!(thm1_f(4.999, 0.1, 0.5).is_ok());
        assert!(thm1_f(5.0, 0.1, 0.5).is_err());
    }

    #[test]
    fn find_alpha_self_consistency_and_limit() {
        let (_, a) = compound();
        let alpha = find_alpha(0.1, a.beta, 1e-9).unwrap();
        assert!(alpha > 1.0 && alpha < 5.0);
        assert!(thm1_f(alpha, 0.1, a.beta).unwrap() <= -1e-9);
        // Frozen root for this channel's beta at eps = 0.1.
        assert!((alpha - 1.0011147552558954).abs() < 1e-6, "alpha = {alpha}");
        // Rate strictly improves on the baseline.
        assert!(norm_inv(alpha * 0.1).unwrap() > norm_inv(0.1).unwrap());
        // Improvement shrinks as beta -> 1.
        let mut last = f64::INFINITY;
        for beta in [0.9, 0.99, 0.999] {
            let al = find_alpha(0.1, beta, 1e-12).unwrap();
            assert!(al < last);
            last = al;
        }
        assert!(last - 1.0 < 1e-2);
    }

    #[test]
    fn finite_n_bound_and_n0() {
        let (ch, a) = compound();
        // Pick alpha with real margin (f <= -1e-5) so the n -> infinity
        // limit of the bound sits strictly below eps.
        let alpha = find_alpha(0.1, a.beta, 1e-5).unwrap();
        let b_small = thm1_finite_n_gamma_bound(alpha, 0.1, &ch, &a, 2).unwrap();
        let b_large = thm1_finite_n_gamma_bound(alpha, 0.1, &ch, &a, 1 << 40).unwrap();
        assert!(b_small.bound > b_large.bound);
        // n -> infinity limit is f + eps < eps.
        let f = thm1_f(alpha, 0.1, a.beta).unwrap();
        assert!((b_large.bound - (f + 0.1)).abs() < 1e-4);
        assert!(b_large.bound < 0.1);
        let n0 = thm1_n0(alpha, 0.1, &ch, &a, usize::MAX / 4).unwrap().unwrap();
        assert!(n0.is_multiple_of(2));
        assert!(thm1_finite_n_gamma_bound(alpha, 0.1, &ch, &a, n0).unwrap().bound < 0.1);
        // The exact crossing is below float resolution of the bound, so
        // bracket it coarsely: the bound is still above eps at half of n0.
        let half = if (n0 / 2).is_multiple_of(2) { n0 / 2 } else { n0 / 2 + 1 };
        assert!(thm1_finite_n_gamma_bound(alpha, 0.1, &ch, &a, half).unwrap().bound > 0.1);
        assert!(thm1_finite_n_gamma_bound(alpha, 0.1, &ch, &a, 3).is_err());
    }

    #[test]
    fn thm3_guards_class() {
        let ch = bsc(0.1).unwrap();
        let a = analyze(&ch, Tolerances::default()).unwrap();
        let r = thm3_rate(0.3, &a).unwrap();
        assert!((r - strassen_rate(0.3, &a).unwrap()).abs() < 1e-15);
        let (_, ac) = compound();
        assert!(matches!(thm3_rate(0.3, &ac), Err(Error::NotSimpleDispersion { .. })));
    }

    #[test]
    fn thm2_equals_thm4_on_compound_example() {
        // This channel's nu extremes coincide with its polytope extremes.
        let (_, a) = compound();
        for i in 1..20 {
            let eps = i as f64 / 20.0;
            let r2 = thm2_rate(eps, &a).unwrap();
            let r4 = thm4_rate(eps, &a).unwrap();
            assert!((r2 - r4).abs() < 1e-12, "eps={eps}: {r2} vs {r4}");
        }
    }

    #[test]
    fn branch_continuity_and_monotonicity() {
        let (_, a) = compound();
        let bp = a.beta / (1.0 + a.beta);
        for d in [1e-9, 1e-11] {
            assert!(thm2_rate(bp - d, &a).unwrap().abs() < 1e-7);
            assert!(thm2_rate(bp + d, &a).unwrap().abs() < 1e-7);
        }
        let mut last = f64::NEG_INFINITY;
        for i in 1..100 {
            let r = thm2_rate(i as f64 / 100.0, &a).unwrap();
            assert!(r >= last);
            last = r;
        }
    }

    #[test]
    fn curve_invariants() {
        let (_, a) = compound();
        let grid: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
        let curve = build_rate_curve(&a, &grid).unwrap();
        for i in 0..grid.len() {
            // Feedback achievability strictly beats no-feedback when beta < 1.
            assert!(curve.fb_lower[i] > curve.no_feedback[i]);
            // Coincides with the converse on this channel.
            assert!((curve.fb_lower[i] - curve.fb_upper[i]).abs() < 1e-12);
            // Half-block rate sits between baseline and the full bound.
            if grid[i] < 0.5 {
                let t1 = curve.thm1_lower[i];
                assert!(t1.is_finite());
                assert!(t1 > curve.no_feedback[i]);
                assert!(t1 <= curve.fb_lower[i] + 1e-9);
            } else {
                assert!(curve.thm1_lower[i].is_nan());
            }
        }
        // Positivity range is enlarged: fb_lower turns positive earlier.
        let first_pos_fb = grid.iter().zip(&curve.fb_lower).find(|(_, &v)| v > 0.0).unwrap().0;
        let first_pos_nf =
            grid.iter().zip(&curve.no_feedback).find(|(_, &v)| v > 0.0).unwrap().0;
        assert!(first_pos_fb < first_pos_nf);
        // Bad grids rejected.
        assert!(build_rate_curve(&a, &[]).is_err());
        assert!(build_rate_curve(&a, &[0.2, 0.1]).is_err());
        assert!(build_rate_curve(&a, &[0.0, 0.1]).is_err());
    }

    #[test]
    fn beta_one_channel_curves_collapse() {
        let ch = bsc(0.1).unwrap();
        let a = analyze(&ch, Tolerances::default()).unwrap();
        let grid: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
        let curve = build_rate_curve(&a, &grid).unwrap();
        for i in 0..grid.len() {
            assert!((curve.fb_lower[i] - curve.no_feedback[i]).abs() < 1e-6);
            assert!(curve.thm1_lower[i].is_nan());
        }
    }
}
