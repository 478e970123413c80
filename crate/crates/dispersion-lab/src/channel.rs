//! Channel and input-distribution types plus the pointwise information
//! quantities everything else is built from.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A discrete memoryless channel: a row-stochastic matrix `w[x][y]` giving
/// the probability of output `y` when input `x` is sent.
///
/// Construct through [`validate_channel`]; the invariants (rows sum to 1,
/// entries in [0,1], no all-zero output column) are enforced there and then
/// relied on everywhere else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dmc {
    input_size: usize,
    output_size: usize,
    w: Vec<Vec<f64>>,
}

impl Dmc {
    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    /// W(y|x).
    #[inline]
    pub fn w(&self, x: usize, y: usize) -> f64 {
        self.w[x][y]
    }

    /// The row W(·|x).
    #[inline]
    pub fn row(&self, x: usize) -> &[f64] {
        &self.w[x]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.w
    }
}

/// Checks a raw matrix and wraps it as a [`Dmc`].
///
/// Rows must sum to 1 within 1e-9, entries must be nonnegative, and no
/// output column may be identically zero (such outputs are unreachable and
/// would put a zero in the capacity-achieving output distribution).
pub fn validate_channel(w: Vec<Vec<f64>>) -> Result<Dmc> {
    if w.is_empty() || w[0].is_empty() {
        return Err(Error::Domain("channel matrix must be at least 1x1".into()));
    }
    let output_size = w[0].len();
    for (x, row) in w.iter().enumerate() {
        if row.len() != output_size {
            return Err(Error::Domain(format!(
                "row {x} has {} entries, expected {output_size}",
                row.len()
            )));
        }
        let mut sum = 0.0;
        for (y, &p) in row.iter().enumerate() {
            if !(p >= 0.0) {
                return Err(Error::NegativeEntry { row: x, col: y, value: p });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NonStochasticRow { row: x, sum });
        }
    }
    for y in 0..output_size {
        if w.iter().all(|row| row[y] == 0.0) {
            return Err(Error::AllZeroColumn { col: y });
        }
    }
    Ok(Dmc { input_size: w.len(), output_size, w })
}

/// A probability distribution over the channel input alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDistribution {
    p: Vec<f64>,
}

impl InputDistribution {
    /// Validates nonnegativity and total mass 1 (within 1e-9), then
    /// renormalizes so the stored vector sums to 1 at machine precision.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Domain("empty probability vector".into()));
        }
        let mut sum = 0.0;
        for (i, &v) in p.iter().enumerate() {
            if !(v >= 0.0) {
                return Err(Error::NegativeEntry { row: 0, col: i, value: v });
            }
            sum += v;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("probabilities sum to {sum}, not 1")));
        }
        let p = p.into_iter().map(|v| v / sum).collect();
        Ok(InputDistribution { p })
    }

    pub fn uniform(n: usize) -> Self {
        InputDistribution { p: vec![1.0 / n as f64; n] }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    #[inline]
    pub fn prob(&self, x: usize) -> f64 {
        self.p[x]
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    /// Convex combination `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &InputDistribution, alpha: f64) -> InputDistribution {
        let p = self
            .p
            .iter()
            .zip(&other.p)
            .map(|(&a, &b)| alpha * a + (1.0 - alpha) * b)
            .collect();
        InputDistribution { p }
    }
}

/// Information density 𝔦*(x, y) = log(W(y|x) / q*(y)) in nats.
///
/// Returns `-inf` when W(y|x) = 0 (the pair cannot occur under input x);
/// callers that aggregate must skip unsupported pairs. A nonpositive
/// `q_star[y]` indicates a broken upstream analysis and is an error.
pub fn info_density(ch: &Dmc, q_star: &[f64], x: usize, y: usize) -> Result<f64> {
    let q = q_star[y];
    if !(q > 0.0) {
        return Err(Error::ZeroOutputProbability { y });
    }
    let w = ch.w(x, y);
    if w == 0.0 {
        Ok(f64::NEG_INFINITY)
    } else {
        Ok((w / q).ln())
    }
}

/// max over supported (x, y) of |𝔦*(x, y)|.
pub fn i_max(ch: &Dmc, q_star: &[f64]) -> Result<f64> {
    let mut m: f64 = 0.0;
    for x in 0..ch.input_size() {
        for y in 0..ch.output_size() {
            if ch.w(x, y) > 0.0 {
                m = m.max(info_density(ch, q_star, x, y)?.abs());
            }
        }
    }
    Ok(m)
}

/// Conditional variance ν_x = Var[𝔦*(X, Y) | X = x], over supported outputs.
pub fn conditional_variance(ch: &Dmc, q_star: &[f64], x: usize) -> Result<f64> {
    let mut mean = 0.0;
    let mut second = 0.0;
    for y in 0..ch.output_size() {
        let w = ch.w(x, y);
        if w > 0.0 {
            let i = info_density(ch, q_star, x, y)?;
            mean += w * i;
            second += w * i * i;
        }
    }
    Ok((second - mean * mean).max(0.0))
}

/// Relative entropy D(W(·|x) ‖ q*) — the conditional mean of 𝔦* given x.
pub fn divergence_row(ch: &Dmc, q_star: &[f64], x: usize) -> Result<f64> {
    let mut d = 0.0;
    for y in 0..ch.output_size() {
        let w = ch.w(x, y);
        if w > 0.0 {
            d += w * info_density(ch, q_star, x, y)?;
        }
    }
    Ok(d)
}

/// E_{P∘W} |𝔦*(X, Y) − c|³, the raw third absolute moment used by the
/// finite-horizon Berry–Esseen style bound.
pub fn third_abs_moment_about(
    ch: &Dmc,
    q_star: &[f64],
    p: &InputDistribution,
    c: f64,
) -> Result<f64> {
    let mut m = 0.0;
    for x in 0..ch.input_size() {
        let px = p.prob(x);
        if px == 0.0 {
            continue;
        }
        for y in 0..ch.output_size() {
            let w = ch.w(x, y);
            if w > 0.0 {
                let d = (info_density(ch, q_star, x, y)? - c).abs();
                m += px * w * d * d * d;
            }
        }
    }
    Ok(m)
}

/// The canonical compound-dispersion example channel: six inputs, three
/// outputs. Inputs 0–2 are "noisy repetition" rows hitting output x with
/// probability `p` and splitting the rest evenly; inputs 3–5 are binary-like
/// rows cycling (q, 1−q, 0). The parameter q is chosen to solve
/// h(p) + (1−p) log 2 = h(q) with q ∈ (0, 1/2), which makes every input
/// capacity-achieving: the low-variance optimizer is uniform on {3,4,5},
/// the high-variance one uniform on {0,1,2}.
pub fn compound_example_channel(p: f64) -> Result<Dmc> {
    let q = solve_entropy_balance(p)?;
    let s = 0.5 * (1.0 - p);
    let w = vec![
        vec![p, s, s],
        vec![s, p, s],
        vec![s, s, p],
        vec![q, 1.0 - q, 0.0],
        vec![0.0, q, 1.0 - q],
        vec![1.0 - q, 0.0, q],
    ];
    validate_channel(w)
}

/// Solves h(q) = h(p) + (1−p) log 2 for q ∈ (0, 1/2) by bisection; the
/// binary entropy is increasing on that interval, so the root is unique.
pub fn solve_entropy_balance(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p must be in (0,1), got {p}")));
    }
    let h = |t: f64| -(t * t.ln() + (1.0 - t) * (1.0 - t).ln());
    let target = h(p) + (1.0 - p) * 2f64.ln();
    if target > 2f64.ln() {
        return Err(Error::Domain(format!(
            "entropy balance h(q) = {target} exceeds log 2; no q in (0, 1/2)"
        )));
    }
    let (mut lo, mut hi) = (1e-15, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Binary symmetric channel with crossover probability `p`.
pub fn bsc(p: f64) -> Result<Dmc> {
    validate_channel(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
}
