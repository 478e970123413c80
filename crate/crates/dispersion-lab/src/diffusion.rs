//! The limiting bang-bang diffusion: closed-form transition density and
//! hitting probability, Euler–Maruyama simulation of zero-drift SDEs with
//! state-dependent diffusion coefficient, and the McNamara optimal-control
//! probability formulas.

use crate::controllers::sigma_delta;
use crate::error::{Error, Result};
use crate::quad::integrate_line;
use crate::special::norm_cdf;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Zero-drift diffusion with coefficient 1 at or below zero and β above
/// zero, started at `x0` and run for unit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BangBangDiffusion {
    pub beta: f64,
    pub x0: f64,
}

impl BangBangDiffusion {
    pub fn new(beta: f64, x0: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::Domain(format!("beta must be in (0,1], got {beta}")));
        }
        Ok(BangBangDiffusion { beta, x0 })
    }

    /// Transition density P_t(x, y): four closed-form branches chosen by the
    /// signs of (x, y). Points on an axis use the nonpositive-side branch (a
    /// measure-zero convention; nothing integrable depends on it).
    pub fn transition_density(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::NonpositiveTime(t));
        }
        let b = self.beta;
        let pref = 1.0 / (2.0 * std::f64::consts::PI * t).sqrt();
        let b2t = 2.0 * b * b * t;
        let v = match (x > 0.0, y > 0.0) {
            (true, true) => {
                (1.0 / b) * (-(x - y) * (x - y) / b2t).exp()
                    - ((b - 1.0) / (b * (b + 1.0))) * (-(x + y) * (x + y) / b2t).exp()
            }
            (true, false) => (2.0 * b / (b + 1.0)) * (-(x - b * y) * (x - b * y) / b2t).exp(),
            (false, true) => {
                (2.0 / (b * (b + 1.0))) * (-(b * x - y) * (b * x - y) / b2t).exp()
            }
            (false, false) => {
                (-(x - y) * (x - y) / (2.0 * t)).exp()
                    + ((b - 1.0) / (b + 1.0)) * (-(x + y) * (x + y) / (2.0 * t)).exp()
            }
        };
        Ok(pref * v)
    }

    /// Pr(ξ₁ ≤ 0) in closed form. Must (and does, see tests) agree with
    /// integrating the transition density over the nonpositive half-line.
    pub fn prob_nonpositive_at_1(&self) -> f64 {
        let b = self.beta;
        let x0 = self.x0;
        if x0 > 0.0 {
            (2.0 * b / (b + 1.0)) * (1.0 - norm_cdf(x0 / b))
        } else {
            norm_cdf(-x0) + ((b - 1.0) / (b + 1.0)) * norm_cdf(x0)
        }
    }

    /// Total mass ∫ P_t(x0, y) dy by quadrature (a diagnostic; should be 1).
    pub fn density_mass(&self, t: f64, tol: f64) -> Result<f64> {
        let sigma = t.sqrt(); // widest branch has unit coefficient
        let d = *self;
        let x0 = self.x0;
        let f = move |y: f64| d.transition_density(t, x0, y).unwrap_or(0.0);
        Ok(integrate_line(&f, x0, sigma, tol))
    }
}

/// State-dependent diffusion coefficient fields for the SDE simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SigmaField {
    Constant(f64),
    /// The σ_δ ramp: 1 below zero, linear down to β across [0, δ].
    Ramp { delta: f64, beta: f64 },
    /// `above` at states > 0, `below` at states ≤ 0.
    BangBang { above: f64, below: f64 },
}

impl SigmaField {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            SigmaField::Constant(s) => s,
            SigmaField::Ramp { delta, beta } => sigma_delta(x, delta, beta),
            SigmaField::BangBang { above, below } => {
                if x > 0.0 {
                    above
                } else {
                    below
                }
            }
        }
    }

    fn bounds(&self) -> (f64, f64) {
        match *self {
            SigmaField::Constant(s) => (s, s),
            SigmaField::Ramp { beta, .. } => (beta.min(1.0), beta.max(1.0)),
            SigmaField::BangBang { above, below } => (above.min(below), above.max(below)),
        }
    }
}

/// Euler–Maruyama configuration over the unit time interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdeConfig {
    pub sigma: SigmaField,
    pub x0: f64,
    /// Time steps over [0, 1]; at least 100.
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
}

impl SdeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 100 {
            return Err(Error::Domain(format!("steps must be >= 100, got {}", self.steps)));
        }
        if self.trials == 0 {
            return Err(Error::Domain("trials must be positive".into()));
        }
        let (lo, hi) = self.sigma.bounds();
        if !(lo > 0.0 && hi.is_finite()) {
            return Err(Error::Domain(format!(
                "sigma must be bounded and positive, got range [{lo}, {hi}]"
            )));
        }
        match self.sigma {
            SigmaField::Ramp { delta, beta } if !(delta > 0.0 && beta > 0.0 && beta <= 1.0) => {
                Err(Error::Domain(format!("bad ramp parameters ({delta}, {beta})")))
            }
            _ => Ok(()),
        }
    }
}

/// Simulates `trials` trajectories of dX = σ(X) dB over [0, 1] and returns
/// the terminal values in trial order. Each trial draws from its own
/// (seed, trial) substream, so the output is independent of thread count.
pub fn euler_maruyama(config: &SdeConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let dt_sqrt = (1.0 / config.steps as f64).sqrt();
    let sigma = config.sigma;
    let (x0, steps, seed) = (config.x0, config.steps, config.seed);
    Ok((0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let mut x = x0;
            for _ in 0..steps {
                let g: f64 = StandardNormal.sample(&mut rng);
                x += sigma.eval(x) * dt_sqrt * g;
            }
            x
        })
        .collect())
}

/// Fraction of samples ≤ 0 together with its 95% half-width.
pub fn fraction_nonpositive(samples: &[f64]) -> (f64, f64) {
    let hits = samples.iter().filter(|&&x| x <= 0.0).count();
    let p = hits as f64 / samples.len() as f64;
    (p, 1.96 * (p * (1.0 - p) / samples.len() as f64).sqrt())
}

/// Probability that the optimally controlled diffusion — coefficient
/// √ν_min above zero, √ν_max below — started at −`start_offset` ends
/// nonnegative at time 1.
pub fn mcnamara_opt_prob(nu_min: f64, nu_max: f64, start_offset: f64) -> Result<f64> {
    if !(nu_min > 0.0 && nu_min <= nu_max) {
        return Err(Error::Domain(format!(
            "need 0 < nu_min <= nu_max, got ({nu_min}, {nu_max})"
        )));
    }
    let lambda = (nu_min / nu_max).sqrt();
    if start_offset <= 0.0 {
        Ok(1.0 - (2.0 * lambda / (1.0 + lambda)) * norm_cdf(start_offset / nu_min.sqrt()))
    } else {
        Ok((2.0 / (1.0 + lambda)) * (1.0 - norm_cdf(start_offset / nu_max.sqrt())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controllers::s_of_eps;
    use crate::quad::integrate_line;
    use crate::special::norm_pdf;

    #[test]
    fn beta_one_collapses_to_gaussian_kernel() {
        let d = BangBangDiffusion::new(1.0, 0.0).unwrap();
        for (x, y) in [(-1.5, 0.5), (0.5, 1.5), (0.7, -0.2), (-1.0, -2.0), (0.0, 0.3)] {
            for t in [0.25, 1.0, 4.0] {
                let p = d.transition_density(t, x, y).unwrap();
                let g = norm_pdf((x - y) / t.sqrt()) / t.sqrt();
                assert!((p - g).abs() < 1e-14, "({x},{y},{t}): {p} vs {g}");
            }
        }
    }

    #[test]
    fn density_mass_is_one() {
        for beta in [0.3, 0.5, 0.9, 1.0] {
            for x0 in [-2.0, -0.5, 0.5, 2.0] {
                let d = BangBangDiffusion::new(beta, x0).unwrap();
                let mass = d.density_mass(1.0, 1e-10).unwrap();
                assert!((mass - 1.0).abs() < 1e-8, "beta={beta} x0={x0}: {mass}");
            }
        }
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for beta in [0.4, 0.8] {
            for x0 in [-1.0, 0.3, 1.5] {
                let d = BangBangDiffusion::new(beta, x0).unwrap();
                let f = move |y: f64| {
                    if y <= 0.0 {
                        d.transition_density(1.0, x0, y).unwrap()
                    } else {
                        0.0
                    }
                };
                let quad = integrate_line(&f, x0.min(0.0), 1.0, 1e-10);
                let closed = d.prob_nonpositive_at_1();
                assert!((quad - closed).abs() < 1e-8, "beta={beta} x0={x0}");
            }
        }
    }

    #[test]
    fn hitting_identity_inverts_start_level() {
        // Starting from s(ε)·1 the diffusion ends nonpositive w.p. exactly ε.
        for beta in [0.3, 0.5, 1.0] {
            for eps in [0.05, 0.2, 0.5, 0.8] {
                let x0 = s_of_eps(eps, beta).unwrap();
                let d = BangBangDiffusion::new(beta, x0).unwrap();
                assert!(
                    (d.prob_nonpositive_at_1() - eps).abs() < 1e-12,
                    "beta={beta} eps={eps}"
                );
            }
        }
    }

    #[test]
    fn hitting_probability_limits() {
        let d = BangBangDiffusion::new(0.5, 50.0).unwrap();
        assert!(d.prob_nonpositive_at_1() < 1e-12);
        let d = BangBangDiffusion::new(0.5, -50.0).unwrap();
        assert!(d.prob_nonpositive_at_1() > 1.0 - 1e-12);
        let d = BangBangDiffusion::new(1.0, 0.0).unwrap();
        assert!((d.prob_nonpositive_at_1() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn chapman_kolmogorov_spot_check() {
        let d = BangBangDiffusion::new(0.5, 0.0).unwrap();
        for (x, y) in [(0.5, -0.3), (-0.4, 0.6)] {
            let f = move |z: f64| {
                d.transition_density(0.5, x, z).unwrap() * d.transition_density(0.5, z, y).unwrap()
            };
            let composed = integrate_line(&f, 0.5 * (x + y), 1.0, 1e-9);
            let direct = d.transition_density(1.0, x, y).unwrap();
            assert!((composed - direct).abs() < 1e-6, "({x},{y}): {composed} vs {direct}");
        }
    }

    #[test]
    fn brownian_motion_baseline() {
        let cfg = SdeConfig {
            sigma: SigmaField::Constant(1.0),
            x0: 0.0,
            steps: 128,
            trials: 20_000,
            seed: 1,
        };
        let samples = euler_maruyama(&cfg).unwrap();
        let mean: f64 = samples.iter().sum::<f64>() / samples.len() as f64;
        let var: f64 =
            samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (samples.len() - 1) as f64;
        assert!(mean.abs() < 4.0 / (samples.len() as f64).sqrt());
        assert!((var - 1.0).abs() < 0.05);
        // Determinism: identical reruns.
        assert_eq!(samples, euler_maruyama(&cfg).unwrap());
    }

    #[test]
    fn ramp_sde_approaches_hitting_identity() {
        let (eps, beta) = (0.2, 0.5);
        let x0 = s_of_eps(eps, beta).unwrap();
        let cfg = SdeConfig {
            sigma: SigmaField::Ramp { delta: 0.01, beta },
            x0,
            steps: 512,
            trials: 20_000,
            seed: 4,
        };
        let (p, ci) = fraction_nonpositive(&euler_maruyama(&cfg).unwrap());
        assert!((p - eps).abs() < ci + 0.02, "p={p} ci={ci}");
    }

    #[test]
    fn mcnamara_branches_agree_at_zero_offset() {
        for (nmin, nmax) in [(0.1f64, 0.7f64), (0.25, 0.25), (0.5, 2.0)] {
            let lambda = (nmin / nmax).sqrt();
            let p = mcnamara_opt_prob(nmin, nmax, 0.0).unwrap();
            assert!((p - 1.0 / (1.0 + lambda)).abs() < 1e-14);
            let p_plus = mcnamara_opt_prob(nmin, nmax, 1e-12).unwrap();
            assert!((p - p_plus).abs() < 1e-10);
        }
        assert!(mcnamara_opt_prob(0.0, 1.0, 0.0).is_err());
        assert!(mcnamara_opt_prob(2.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn mcnamara_equal_variances_collapse() {
        // λ = 1 gives the uncontrolled answer 1 − Φ(offset/√V).
        for off in [-0.5, 0.0, 0.8] {
            let p = mcnamara_opt_prob(0.36, 0.36, off).unwrap();
            assert!((p - (1.0 - norm_cdf(off / 0.6))).abs() < 1e-14);
        }
    }

    #[test]
    fn mcnamara_matches_bangbang_simulation() {
        let (nmin, nmax, off): (f64, f64, f64) = (0.1, 0.7, 0.2);
        let cfg = SdeConfig {
            sigma: SigmaField::BangBang { above: nmin.sqrt(), below: nmax.sqrt() },
            x0: -off,
            steps: 1024,
            trials: 20_000,
            seed: 8,
        };
        let samples = euler_maruyama(&cfg).unwrap();
        let hits = samples.iter().filter(|&&x| x >= 0.0).count();
        let p = hits as f64 / samples.len() as f64;
        let ci = 1.96 * (p * (1.0 - p) / samples.len() as f64).sqrt();
        let exact = mcnamara_opt_prob(nmin, nmax, off).unwrap();
        assert!((p - exact).abs() < 3.0 * (ci + 0.005), "p={p} exact={exact}");
    }

    #[test]
    fn sde_config_validation() {
        let mut cfg = SdeConfig {
            sigma: SigmaField::Constant(1.0),
            x0: 0.0,
            steps: 99,
            trials: 10,
            seed: 0,
        };
        assert!(cfg.validate().is_err());
        cfg.steps = 100;
        assert!(cfg.validate().is_ok());
        cfg.sigma = SigmaField::Constant(0.0);
        assert!(cfg.validate().is_err());
        cfg.sigma = SigmaField::Ramp { delta: -1.0, beta: 0.5 };
        assert!(cfg.validate().is_err());
    }
}
