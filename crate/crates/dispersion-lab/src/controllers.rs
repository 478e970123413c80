//! Feedback input-selection policies and their scalar shape functions.
//!
//! Three policies are provided: a constant input distribution, a coarse
//! half-block timid/bold switch (commit to the low-variance "timid" input
//! for the first half, then go "bold" iff the first half fell behind its
//! threshold), and a refined per-step policy that blends timid and bold
//! through a band of width (1/ℓ)√(n V_max) around the target drift.

use crate::analyze::ChannelAnalysis;
use crate::channel::InputDistribution;
use crate::error::{Error, Result};
use crate::special::norm_inv;
use serde::{Deserialize, Serialize};

/// Starting level s(ε) of the limiting controlled diffusion: the unique
/// initial point from which the bang-bang diffusion ends nonpositive with
/// probability exactly ε.
///
/// Two branches with breakpoint β/(1+β); both give 0 at the breakpoint.
pub fn s_of_eps(eps: f64, beta: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("eps must be in (0,1), got {eps}")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Domain(format!("beta must be in (0,1], got {beta}")));
    }
    let brk = beta / (1.0 + beta);
    if eps <= brk {
        Ok(-beta * norm_inv(eps * (1.0 + beta) / (2.0 * beta))?)
    } else {
        Ok(-norm_inv((eps * (1.0 + beta) + (1.0 - beta)) / 2.0)?)
    }
}

/// Second-order rate target r(a) for dispersion extremes (v_min, v_max):
/// √v_min Φ⁻¹(a(1+β)/(2β)) below the breakpoint β/(1+β), and
/// √v_max Φ⁻¹((a(1+β)+(1−β))/2) above it, with β = √(v_min/v_max).
pub fn r_of_eps(a: f64, v_min: f64, v_max: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain(format!("a must be in (0,1), got {a}")));
    }
    if !(v_min > 0.0 && v_min <= v_max) {
        return Err(Error::Domain(format!(
            "need 0 < v_min <= v_max, got ({v_min}, {v_max})"
        )));
    }
    let beta = (v_min / v_max).sqrt();
    let brk = beta / (1.0 + beta);
    if a <= brk {
        Ok(v_min.sqrt() * norm_inv(a * (1.0 + beta) / (2.0 * beta))?)
    } else {
        Ok(v_max.sqrt() * norm_inv((a * (1.0 + beta) + (1.0 - beta)) / 2.0)?)
    }
}

/// Mixing weight α_δ(x) = ([1 − x(1−β)/δ]² − β²)/(1 − β²) on x ∈ [0, δ]:
/// 1 at the band bottom, 0 at the top, decreasing in between.
pub fn alpha_delta(x: f64, delta: f64, beta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!("delta must be in (0,1], got {delta}")));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("beta must be in (0,1), got {beta}")));
    }
    // Allow a hair of floating slop at the band edges.
    if !(-1e-12..=delta + 1e-12).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside [0, {delta}]")));
    }
    let ramp = 1.0 - x.clamp(0.0, delta) * (1.0 - beta) / delta;
    let a = (ramp * ramp - beta * beta) / (1.0 - beta * beta);
    Ok(a.clamp(0.0, 1.0))
}

/// Diffusion-coefficient ramp σ_δ(x): 1 for x ≤ 0, linear down to β on
/// [0, δ], β for x ≥ δ.
pub fn sigma_delta(x: f64, delta: f64, beta: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x >= delta {
        beta
    } else {
        1.0 - x * (1.0 - beta) / delta
    }
}

/// A feedback input-selection policy.
///
/// The distributions are resolved from a channel analysis (they are the
/// dispersion-extremal members of the capacity polytope), so the spec
/// carries them rather than recomputing per step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ControllerSpec {
    /// Send `q` every step, ignoring feedback.
    Constant { q: InputDistribution },
    /// Half-block timid/bold: timid first half, then switch on the
    /// first-half information-density sum against the threshold
    /// nC/2 + ν√(nV_min/2) with ν = √2 Φ⁻¹(αε).
    Coarse {
        n: usize,
        alpha: f64,
        eps: f64,
        q_min: InputDistribution,
        q_max: InputDistribution,
    },
    /// Per-step policy: bold below the drift band, timid above it, and the
    /// α_δ mixture (δ = 1/ℓ) inside.
    Refined {
        ell: u32,
        eps: f64,
        kappa: f64,
        q_min: InputDistribution,
        q_max: InputDistribution,
    },
}

impl ControllerSpec {
    pub fn constant(q: InputDistribution) -> Self {
        ControllerSpec::Constant { q }
    }

    /// Validates the half-block policy parameters: even horizon and
    /// α ∈ (1, 1/(2ε)).
    pub fn coarse(
        n: usize,
        alpha: f64,
        eps: f64,
        q_min: InputDistribution,
        q_max: InputDistribution,
    ) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::IncompatibleController(format!(
                "half-block policy requires an even horizon, got n = {n}"
            )));
        }
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::Domain(format!("eps must be in (0, 0.5), got {eps}")));
        }
        if !(alpha > 1.0 && alpha < 1.0 / (2.0 * eps)) {
            return Err(Error::Domain(format!(
                "alpha must be in (1, {}), got {alpha}",
                1.0 / (2.0 * eps)
            )));
        }
        Ok(ControllerSpec::Coarse { n, alpha, eps, q_min, q_max })
    }

    /// Validates the per-step policy parameters: κ < ε/2, and when ε sits
    /// above the breakpoint β/(1+β), additionally κ ≤ (ε − β/(1+β))/4.
    pub fn refined(
        ell: u32,
        eps: f64,
        kappa: f64,
        beta: f64,
        q_min: InputDistribution,
        q_max: InputDistribution,
    ) -> Result<Self> {
        if ell == 0 {
            return Err(Error::Domain("ell must be positive".into()));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Domain(format!("eps must be in (0,1), got {eps}")));
        }
        if !(kappa > 0.0 && kappa < eps / 2.0) {
            return Err(Error::Domain(format!(
                "kappa must be in (0, eps/2) = (0, {}), got {kappa}",
                eps / 2.0
            )));
        }
        let brk = beta / (1.0 + beta);
        if eps > brk && kappa > (eps - brk) / 4.0 {
            return Err(Error::Domain(format!(
                "kappa must be at most (eps - {brk})/4 = {}, got {kappa}",
                (eps - brk) / 4.0
            )));
        }
        Ok(ControllerSpec::Refined { ell, eps, kappa, q_min, q_max })
    }

    /// Default κ for a given ε and β: ε/4, tightened to the quarter-margin
    /// rule when ε is above the breakpoint.
    pub fn default_kappa(eps: f64, beta: f64) -> f64 {
        let brk = beta / (1.0 + beta);
        if eps > brk {
            (eps / 4.0).min((eps - brk) / 4.0)
        } else {
            eps / 4.0
        }
    }
}

/// Per-trajectory controller state: how many channel uses have completed
/// and the running centered information-density sum.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControllerState {
    /// Completed channel uses.
    pub step: usize,
    /// Σ_{j≤step} [𝔦*(x_j, y_j) − C] in nats.
    pub drift_sum: f64,
    /// The drift sum frozen at step n/2, for the half-block policy.
    pub half_drift_sum: Option<f64>,
}

impl ControllerState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one channel use; `horizon_half` is the step at which the
    /// half-time statistic freezes (pass 0 to disable).
    pub fn advance(&mut self, centered_increment: f64, horizon_half: usize) {
        self.step += 1;
        self.drift_sum += centered_increment;
        if self.step == horizon_half {
            self.half_drift_sum = Some(self.drift_sum);
        }
    }
}

/// What the policy wants for the next channel use, before materializing an
/// input distribution. `Mix(a)` means a·Q_max + (1−a)·Q_min.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicyChoice {
    QMin,
    QMax,
    Mix(f64),
}

/// Policy decision for the upcoming use `state.step + 1` of a half-block
/// controller.
pub fn coarse_choice(
    n: usize,
    alpha: f64,
    eps: f64,
    v_min: f64,
    state: &ControllerState,
) -> Result<PolicyChoice> {
    let k = state.step + 1;
    if k > n {
        return Err(Error::HorizonExceeded { step: k, n });
    }
    if k <= n / 2 {
        return Ok(PolicyChoice::QMin);
    }
    let half = state.half_drift_sum.ok_or_else(|| {
        Error::IncompatibleController("half-time statistic missing past midpoint".into())
    })?;
    // The raw-sum threshold nC/2 + ν√(nV_min/2) becomes ν√(nV_min/2) after
    // centering by C per step; ν = √2 Φ⁻¹(αε).
    let nu = std::f64::consts::SQRT_2 * norm_inv(alpha * eps)?;
    let threshold = nu * (n as f64 * v_min / 2.0).sqrt();
    if half > threshold {
        Ok(PolicyChoice::QMin) // ahead: play it safe
    } else {
        Ok(PolicyChoice::QMax) // behind (ties included): gamble
    }
}

/// Policy decision for the upcoming use of the per-step band controller.
pub fn refined_choice(
    ell: u32,
    eps: f64,
    kappa: f64,
    analysis: &ChannelAnalysis,
    state: &ControllerState,
    n: usize,
) -> Result<PolicyChoice> {
    let k = state.step + 1;
    if k > n {
        return Err(Error::HorizonExceeded { step: k, n });
    }
    if !(analysis.nu_min > 0.0) {
        return Err(Error::IncompatibleController(
            "per-step policy needs nu_min > 0".into(),
        ));
    }
    let r = r_of_eps(eps - kappa, analysis.v_min, analysis.v_max)?;
    let sqrt_n = (n as f64).sqrt();
    let band_lo = sqrt_n * r;
    let band_width = (n as f64 * analysis.v_max).sqrt() / ell as f64;
    let s = state.drift_sum;
    if s <= band_lo {
        Ok(PolicyChoice::QMax)
    } else if s > band_lo + band_width {
        Ok(PolicyChoice::QMin)
    } else {
        let delta = 1.0 / ell as f64;
        let x = -r / analysis.v_max.sqrt() + s / (sqrt_n * analysis.v_max.sqrt());
        Ok(PolicyChoice::Mix(alpha_delta(x, delta, analysis.beta)?))
    }
}

/// Materializes the half-block policy's next input distribution.
pub fn coarse_next_input<'a>(
    spec: &'a ControllerSpec,
    state: &ControllerState,
    analysis: &ChannelAnalysis,
) -> Result<&'a InputDistribution> {
    let ControllerSpec::Coarse { n, alpha, eps, q_min, q_max } = spec else {
        return Err(Error::IncompatibleController("expected a coarse spec".into()));
    };
    match coarse_choice(*n, *alpha, *eps, analysis.v_min, state)? {
        PolicyChoice::QMin => Ok(q_min),
        PolicyChoice::QMax => Ok(q_max),
        PolicyChoice::Mix(_) => unreachable!("half-block policy never mixes"),
    }
}

/// Materializes the band policy's next input distribution (owned, since the
/// in-band case is a genuine mixture).
pub fn refined_next_input(
    spec: &ControllerSpec,
    state: &ControllerState,
    analysis: &ChannelAnalysis,
    n: usize,
) -> Result<InputDistribution> {
    let ControllerSpec::Refined { ell, eps, kappa, q_min, q_max } = spec else {
        return Err(Error::IncompatibleController("expected a refined spec".into()));
    };
    match refined_choice(*ell, *eps, *kappa, analysis, state, n)? {
        PolicyChoice::QMin => Ok(q_min.clone()),
        PolicyChoice::QMax => Ok(q_max.clone()),
        PolicyChoice::Mix(a) => Ok(q_max.mix(q_min, a)),
    }
}
