//! Very-noisy-channel family W_ζ(y|x) = Γ(y)(1 + ζλ(x,y)) and empirical
//! verification that capacity and both dispersion extremes follow their
//! predicted ζ-scaling (C_ζ ≈ ζ²𝐂, V_ζ ≈ 2C_ζ, extremes converging).

use crate::analyze::{analyze, ChannelAnalysis, Tolerances};
use crate::channel::{validate_channel, Dmc};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Subtracts the Γ-weighted mean from every row of `raw_lam`, enforcing
/// Σ_y Γ(y)λ(x,y) = 0 exactly (to rounding).
pub fn center_lambda(gamma: &[f64], raw_lam: &[Vec<f64>]) -> Vec<Vec<f64>> {
    raw_lam
        .iter()
        .map(|row| {
            let mean: f64 = row.iter().zip(gamma).map(|(l, g)| l * g).sum();
            row.iter().map(|l| l - mean).collect()
        })
        .collect()
}

/// A perturbation family around the output distribution Γ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VncSpec {
    pub gamma: Vec<f64>,
    pub lam: Vec<Vec<f64>>,
    pub zeta: f64,
}

impl VncSpec {
    /// Validates full support of Γ, exact row centering, and positivity of
    /// every perturbed entry at this ζ.
    pub fn new(gamma: Vec<f64>, lam: Vec<Vec<f64>>, zeta: f64) -> Result<Self> {
        if gamma.is_empty() || lam.is_empty() {
            return Err(Error::Domain("gamma and lam must be nonempty".into()));
        }
        let total: f64 = gamma.iter().sum();
        if (total - 1.0).abs() > 1e-9 || gamma.iter().any(|&g| g <= 0.0) {
            return Err(Error::Domain("gamma must be a full-support distribution".into()));
        }
        if !(zeta > 0.0) {
            return Err(Error::Domain(format!("zeta must be positive, got {zeta}")));
        }
        for (x, row) in lam.iter().enumerate() {
            if row.len() != gamma.len() {
                return Err(Error::Domain(format!("lam row {x} has wrong width")));
            }
            let mean: f64 = row.iter().zip(&gamma).map(|(l, g)| l * g).sum();
            if mean.abs() > 1e-12 {
                return Err(Error::Domain(format!(
                    "lam row {x} is not gamma-centered: mean {mean:e}"
                )));
            }
            for (y, &l) in row.iter().enumerate() {
                if 1.0 + zeta * l <= 0.0 {
                    return Err(Error::NegativeProbability { zeta, x, y });
                }
            }
        }
        Ok(VncSpec { gamma, lam, zeta })
    }

    /// Materializes the channel W_ζ. Rows sum to one automatically because
    /// the perturbation is Γ-centered.
    pub fn realize(&self) -> Result<Dmc> {
        let w = self
            .lam
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.gamma)
                    .map(|(&l, &g)| g * (1.0 + self.zeta * l))
                    .collect()
            })
            .collect();
        validate_channel(w)
    }
}

/// The limiting capacity coefficient
/// 𝐂 = max_P (1/2) Σ_y Γ(y)(Σ_x P(x)λ²(x,y) − (Σ_x P(x)λ(x,y))²),
/// a concave quadratic over the simplex, maximized by exponentiated-gradient
/// ascent with random restarts. Returns (𝐂, argmax P).
pub fn bold_c(gamma: &[f64], lam: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let nx = lam.len();
    if nx == 0 {
        return Err(Error::Domain("lam must be nonempty".into()));
    }
    let objective = |p: &[f64]| -> f64 {
        let mut val = 0.0;
        for (y, &g) in gamma.iter().enumerate() {
            let mut m1 = 0.0;
            let mut m2 = 0.0;
            for (x, row) in lam.iter().enumerate() {
                m1 += p[x] * row[y];
                m2 += p[x] * row[y] * row[y];
            }
            val += g * (m2 - m1 * m1);
        }
        0.5 * val
    };
    let gradient = |p: &[f64], out: &mut [f64]| {
        let bar: Vec<f64> = (0..gamma.len())
            .map(|y| lam.iter().enumerate().map(|(x, row)| p[x] * row[y]).sum())
            .collect();
        for (x, row) in lam.iter().enumerate() {
            out[x] = 0.5
                * gamma
                    .iter()
                    .enumerate()
                    .map(|(y, &g)| g * (row[y] * row[y] - 2.0 * bar[y] * row[y]))
                    .sum::<f64>();
        }
    };
    let scale = lam
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, &l| m.max(l.abs()))
        .max(1e-12);
    let eta = 1.0 / (scale * scale);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b01dc);
    let mut best_val = f64::NEG_INFINITY;
    let mut best_p = vec![1.0 / nx as f64; nx];
    let mut grad = vec![0.0; nx];
    for restart in 0..10 {
        let mut p: Vec<f64> = if restart == 0 {
            vec![1.0 / nx as f64; nx]
        } else {
            let raw: Vec<f64> = (0..nx).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let s: f64 = raw.iter().sum();
            raw.iter().map(|v| v / s).collect()
        };
        let mut val = objective(&p);
        for _ in 0..200_000 {
            gradient(&p, &mut grad);
            let gmax = grad.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut z = 0.0;
            for x in 0..nx {
                p[x] *= (eta * (grad[x] - gmax)).exp();
                z += p[x];
            }
            for v in p.iter_mut() {
                *v /= z;
            }
            let new_val = objective(&p);
            if new_val - val <= 1e-10 * (1.0 + val.abs()) {
                val = new_val;
                break;
            }
            val = new_val;
        }
        if val > best_val {
            best_val = val;
            best_p = p;
        }
    }
    Ok((best_val, best_p))
}

/// One row of the ζ-scaling sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub zeta: f64,
    /// Capacity C_ζ of the realized channel (nats).
    pub c: f64,
    /// The prediction ζ²𝐂.
    pub bold_c_zeta2: f64,
    /// |C_ζ − ζ²𝐂| / ζ³ (bounded across the sweep if the scaling holds).
    pub ratio_c: f64,
    pub v_min: f64,
    pub v_max: f64,
    /// |V_min,ζ − 2C_ζ| / ζ³.
    pub ratio_vmin: f64,
    /// |V_max,ζ − 2C_ζ| / ζ³.
    pub ratio_vmax: f64,
    /// V_min,ζ / V_max,ζ (tends to 1 as ζ → 0).
    pub v_ratio: f64,
}

/// Realizes and analyzes the channel at every ζ in `zeta_list` (which must
/// be decreasing) and reports the third-order scaling ratios.
pub fn scaling_report(
    gamma: &[f64],
    lam: &[Vec<f64>],
    zeta_list: &[f64],
) -> Result<Vec<ScalingRow>> {
    if zeta_list.is_empty() || zeta_list.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::Domain("zeta list must be nonempty and decreasing".into()));
    }
    let (bc, _) = bold_c(gamma, lam)?;
    if !(bc > 0.0) {
        return Err(Error::Domain(format!("limiting coefficient must be positive, got {bc}")));
    }
    let mut rows = Vec::with_capacity(zeta_list.len());
    for &zeta in zeta_list {
        let spec = VncSpec::new(gamma.to_vec(), lam.to_vec(), zeta)?;
        let ch = spec.realize()?;
        // Small-ζ channels have tiny capacities; tighten the duality gap so
        // the third-order ratios are not dominated by solver error.
        let tol = Tolerances { capacity_tol: 1e-13, ..Tolerances::default() };
        let a: ChannelAnalysis = analyze(&ch, tol)?;
        let z2 = zeta * zeta;
        let z3 = z2 * zeta;
        rows.push(ScalingRow {
            zeta,
            c: a.capacity_nats,
            bold_c_zeta2: z2 * bc,
            ratio_c: (a.capacity_nats - z2 * bc).abs() / z3,
            v_min: a.v_min,
            v_max: a.v_max,
            ratio_vmin: (a.v_min - 2.0 * a.capacity_nats).abs() / z3,
            ratio_vmax: (a.v_max - 2.0 * a.capacity_nats).abs() / z3,
            v_ratio: if a.v_max > 0.0 { a.v_min / a.v_max } else { f64::NAN },
        });
    }
    Ok(rows)
}

/// Deterministic random instance for demos and the scaling acceptance run:
/// uniform Γ over `ny` outputs and a centered λ with entries drawn from
/// [−1, 1) under the given seed.
pub fn random_instance(seed: u64, nx: usize, ny: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = vec![1.0 / ny as f64; ny];
    let raw: Vec<Vec<f64>> = (0..nx)
        .map(|_| (0..ny).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect())
        .collect();
    let lam = center_lambda(&gamma, &raw);
    (gamma, lam)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centering_is_exact_and_idempotent() {
        let (gamma, lam) = random_instance(7, 3, 4);
        for row in &lam {
            let mean: f64 = row.iter().zip(&gamma).map(|(l, g)| l * g).sum();
            assert!(mean.abs() < 1e-14);
        }
        let again = center_lambda(&gamma, &lam);
        for (a, b) in lam.iter().zip(&again) {
            for (u, v) in a.iter().zip(b) {
                assert!((u - v).abs() < 1e-15);
            }
        }
        // Constant rows center to zero.
        let z = center_lambda(&[0.5, 0.5], &[vec![3.0, 3.0]]);
        assert!(z[0].iter().all(|&v| v.abs() < 1e-15));
    }

    #[test]
    fn realize_produces_valid_channel_and_guards_positivity() {
        let (gamma, lam) = random_instance(7, 3, 4);
        let lam_max = lam.iter().flat_map(|r| r.iter()).fold(0.0f64, |m, &l| m.max(l.abs()));
        let spec = VncSpec::new(gamma.clone(), lam.clone(), 0.9 / lam_max).unwrap();
        let ch = spec.realize().unwrap();
        assert_eq!(ch.input_size(), 3);
        assert_eq!(ch.output_size(), 4);
        // Too-large zeta violates positivity at the most negative entry.
        assert!(matches!(
            VncSpec::new(gamma.clone(), lam.clone(), 2.0 / lam_max),
            Err(Error::NegativeProbability { .. })
        ));
        // Uncentered lam is rejected.
        let raw = vec![vec![1.0, 0.0, 0.0, 0.0]; 3];
        assert!(VncSpec::new(gamma, raw, 0.1).is_err());
    }

    #[test]
    fn bold_c_degenerate_cases() {
        // Single input: the variance term cancels exactly.
        let gamma = vec![0.25; 4];
        let lam = center_lambda(&gamma, &[vec![0.3, -0.4, 0.9, 0.1]]);
        let (bc, p) = bold_c(&gamma, &lam).unwrap();
        assert!(bc.abs() < 1e-12);
        assert!((p[0] - 1.0).abs() < 1e-12);
        // Antipodal rows v and -v: maximized by the even mixture with value
        // (1/2) sum Gamma v^2.
        let gamma = vec![0.5, 0.3, 0.2];
        let v = center_lambda(&gamma, &[vec![1.0, -0.5, 0.25]])[0].clone();
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        let (bc, p) = bold_c(&gamma, &[v.clone(), neg]).unwrap();
        let expect: f64 = 0.5 * gamma.iter().zip(&v).map(|(g, x)| g * x * x).sum::<f64>();
        assert!((bc - expect).abs() < 1e-9, "{bc} vs {expect}");
        assert!((p[0] - 0.5).abs() < 1e-5);
    }

    #[test]
    fn bold_c_matches_dense_grid() {
        let (gamma, lam) = random_instance(7, 3, 4);
        let (bc, _) = bold_c(&gamma, &lam).unwrap();
        // Dense simplex grid with step 0.01 over 3 inputs.
        let objective = |p: [f64; 3]| -> f64 {
            let mut val = 0.0;
            for (y, &g) in gamma.iter().enumerate() {
                let m1: f64 = (0..3).map(|x| p[x] * lam[x][y]).sum();
                let m2: f64 = (0..3).map(|x| p[x] * lam[x][y] * lam[x][y]).sum();
                val += g * (m2 - m1 * m1);
            }
            0.5 * val
        };
        let mut grid_best = f64::NEG_INFINITY;
        for i in 0..=100 {
            for j in 0..=(100 - i) {
                let k = 100 - i - j;
                let p = [i as f64 / 100.0, j as f64 / 100.0, k as f64 / 100.0];
                grid_best = grid_best.max(objective(p));
            }
        }
        assert!(bc >= grid_best - 1e-9, "ascent below grid: {bc} vs {grid_best}");
        assert!(bc <= grid_best + 1e-4, "ascent above refined grid bound");
    }

    #[test]
    fn scaling_sweep_shows_convergence() {
        let (gamma, lam) = random_instance(7, 3, 4);
        let rows = scaling_report(&gamma, &lam, &[0.2, 0.1, 0.05, 0.025]).unwrap();
        assert_eq!(rows.len(), 4);
        // Capacity shrinks with zeta and the prediction tracks it.
        for w in rows.windows(2) {
            assert!(w[0].c > w[1].c);
        }
        // Third-order ratios stay bounded (max/min <= 10 per sequence).
        for f in [
            |r: &ScalingRow| r.ratio_c,
            |r: &ScalingRow| r.ratio_vmin,
            |r: &ScalingRow| r.ratio_vmax,
        ] {
            let vals: Vec<f64> = rows.iter().map(f).collect();
            let (lo, hi) = vals
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
            assert!(hi / lo.max(1e-300) <= 10.0, "ratio spread too wide: {vals:?}");
        }
        // Dispersion extremes converge together.
        for w in rows.windows(2) {
            assert!(w[1].v_ratio >= w[0].v_ratio - 1e-9);
        }
        assert!(rows.last().unwrap().v_ratio > 0.99, "v_ratio: {}", rows.last().unwrap().v_ratio);
        // Ordering validation.
        assert!(scaling_report(&gamma, &lam, &[0.1, 0.2]).is_err());
    }
}
