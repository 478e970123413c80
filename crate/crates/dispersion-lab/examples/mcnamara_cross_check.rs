//! Optimal bang-bang stochastic control: the closed-form probability that
//! the optimally controlled diffusion ends nonnegative, cross-checked
//! against Euler-Maruyama simulation of the same SDE.
//!
//! Run with: cargo run --release --example mcnamara_cross_check

use dispersion_lab::diffusion::{euler_maruyama, mcnamara_opt_prob, SdeConfig, SigmaField};

fn main() {
    let (nu_min, nu_max): (f64, f64) = (0.102, 0.692);
    let lambda = (nu_min / nu_max).sqrt();
    println!("variance levels ({nu_min}, {nu_max}), lambda = {lambda:.6}");
    println!("offset   closed form   simulated     |diff|");

    for offset in [-0.3f64, -0.1, 0.0, 0.1, 0.3] {
        let exact = mcnamara_opt_prob(nu_min, nu_max, offset).unwrap();
        // Coefficient sqrt(nu_min) above zero, sqrt(nu_max) below; start at
        // minus the offset; success = ending at or above zero.
        let cfg = SdeConfig {
            sigma: SigmaField::BangBang { above: nu_min.sqrt(), below: nu_max.sqrt() },
            x0: -offset,
            steps: 2048,
            trials: 40_000,
            seed: 99,
        };
        let samples = euler_maruyama(&cfg).unwrap();
        let p = samples.iter().filter(|&&x| x >= 0.0).count() as f64 / samples.len() as f64;
        println!("{offset:>6}   {exact:.6}      {p:.6}      {:.4}", (p - exact).abs());
        let ci = 1.96 * (p * (1.0 - p) / samples.len() as f64).sqrt();
        assert!((p - exact).abs() < 3.0 * (ci + 0.005));
    }
    println!("at offset 0 both branches give 1/(1+lambda) = {:.6}", 1.0 / (1.0 + lambda));
}
