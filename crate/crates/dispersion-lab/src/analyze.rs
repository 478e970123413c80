//! One-call channel analysis: capacity, information-density statistics, and
//! dispersion extremes over the capacity-achieving polytope.

use crate::capacity::capacity_with_input;
use crate::channel::{conditional_variance, i_max, Dmc, InputDistribution};
use crate::error::Result;
use crate::polytope::{capacity_achieving_set, dispersion_extremes, repaired_output_law};
use serde::{Deserialize, Serialize};

/// Numeric tolerances used by [`analyze`]; recorded in the result so a
/// report is self-describing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Duality-gap stopping tolerance for the capacity iteration.
    pub capacity_tol: f64,
    /// Slack for membership in the capacity-achieving support set.
    pub support_tol: f64,
    /// Optimality tolerance attributed to the dispersion linear programs.
    pub lp_tol: f64,
    /// |V_max − V_min| threshold for the simple/compound classification.
    pub class_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            capacity_tol: 1e-11,
            support_tol: 1e-9,
            lp_tol: 1e-9,
            class_tol: 1e-9,
        }
    }
}

/// Whether the dispersion is a single number or a genuine interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DispersionClass {
    /// V_min = V_max (within `class_tol`): feedback cannot change the
    /// second-order rate.
    Simple,
    /// V_min < V_max: timid/bold feedback strictly helps.
    Compound,
}

/// Everything derived from a channel that the rest of the crate consumes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelAnalysis {
    /// Capacity C in nats.
    pub capacity_nats: f64,
    /// Capacity-achieving output distribution q*, strictly positive.
    pub q_star: Vec<f64>,
    /// Input symbols eligible for capacity-achieving support.
    pub x_star: Vec<usize>,
    /// Conditional information-density variance ν_x per input symbol.
    pub nu: Vec<f64>,
    /// min / max of ν_x over the whole input alphabet.
    pub nu_min: f64,
    pub nu_max: f64,
    /// Dispersion extremes over the capacity-achieving polytope.
    pub v_min: f64,
    pub v_max: f64,
    /// √(V_min / V_max); 1 when V_max = 0.
    pub beta: f64,
    /// √(ν_min / ν_max); 1 when ν_max = 0.
    pub lambda: f64,
    /// Largest |𝔦*(x, y)| over supported pairs.
    pub i_max: f64,
    pub dispersion_class: DispersionClass,
    /// Minimizing distribution for Σ P(x) ν_x over the polytope (timid).
    pub q_min: InputDistribution,
    /// Maximizing distribution (bold).
    pub q_max: InputDistribution,
    pub tolerances: Tolerances,
}

impl ChannelAnalysis {
    /// The dispersion relevant at error target `eps`: V_min below one half,
    /// V_max at or above it.
    pub fn v_eps(&self, eps: f64) -> f64 {
        if eps < 0.5 {
            self.v_min
        } else {
            self.v_max
        }
    }
}

/// Full analysis pipeline: capacity, q*, ν_x, X*, LP dispersion extremes,
/// shape ratios, and classification.
pub fn analyze(ch: &Dmc, tol: Tolerances) -> Result<ChannelAnalysis> {
    let (c, q_raw, p_iter) = capacity_with_input(ch, tol.capacity_tol)?;
    let mut poly = capacity_achieving_set(ch, c, &q_raw, tol.support_tol)?;
    // Snap the output law into the image of the support columns so the
    // polytope constraints are exactly attainable (the raw iterate keeps
    // vanishing mass outside the support, which can leave the constraints
    // infeasible at the LP's feasibility tolerance).
    let q_star = repaired_output_law(ch, &poly.support, &p_iter).unwrap_or(q_raw);
    for (row, &qy) in poly.b.iter_mut().zip(&q_star) {
        *row = qy;
    }
    let nu: Vec<f64> = (0..ch.input_size())
        .map(|x| conditional_variance(ch, &q_star, x))
        .collect::<Result<_>>()?;
    let nu_min = nu.iter().cloned().fold(f64::INFINITY, f64::min);
    let nu_max = nu.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ext = dispersion_extremes(&poly, &nu)?;
    let class = if (ext.v_max - ext.v_min).abs() <= tol.class_tol {
        DispersionClass::Simple
    } else {
        DispersionClass::Compound
    };
    let beta = if ext.v_max > 0.0 { (ext.v_min / ext.v_max).sqrt() } else { 1.0 };
    let lambda = if nu_max > 0.0 { (nu_min / nu_max).sqrt() } else { 1.0 };
    Ok(ChannelAnalysis {
        capacity_nats: c,
        q_star: q_star.clone(),
        x_star: poly.support.clone(),
        i_max: i_max(ch, &q_star)?,
        nu,
        nu_min,
        nu_max,
        v_min: ext.v_min,
        v_max: ext.v_max,
        beta,
        lambda,
        dispersion_class: class,
        q_min: ext.p_min,
        q_max: ext.p_max,
        tolerances: tol,
    })
}
