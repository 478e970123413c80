//! The refined per-step controller: bold below the drift band, timid above
//! it, and a continuous mixture inside. At the matching threshold
//! n·C + sqrt(n)·r(eps) the tail probability lands at (or below) eps, which
//! the half-block scheme cannot reach.
//!
//! Run with: cargo run --release --example band_controller

use dispersion_lab::channel::compound_example_channel;
use dispersion_lab::controllers::{r_of_eps, ControllerSpec};
use dispersion_lab::walk::{simulate_gamma_n, SimConfig};
use dispersion_lab::{analyze, Tolerances};

fn main() {
    let ch = compound_example_channel(0.8).unwrap();
    let a = analyze(&ch, Tolerances::default()).unwrap();
    let (eps, n, trials, seed) = (0.1, 10_000usize, 20_000usize, 5);

    let kappa = ControllerSpec::default_kappa(eps, a.beta);
    let spec = ControllerSpec::refined(
        20,
        eps,
        kappa,
        a.beta,
        a.q_min.clone(),
        a.q_max.clone(),
    )
    .unwrap();
    println!("band controller with ell = 20, kappa = {kappa}");

    // Threshold at the feedback second-order rate r(eps).
    let r = r_of_eps(eps, a.v_min, a.v_max).unwrap();
    let threshold = n as f64 * a.capacity_nats + (n as f64).sqrt() * r;
    println!("r({eps}) = {r:.6} nats/sqrt(use); threshold = {threshold:.3} nats");

    let config = SimConfig { n, trials, seed, controller: spec, threshold_nats: threshold };
    let result = simulate_gamma_n(&ch, &a, &config).unwrap();
    println!(
        "Pr(sum <= threshold) = {:.5} +- {:.5}   (target eps = {eps})",
        result.estimate, result.ci_radius
    );

    // Without feedback the same threshold is far out of reach: the constant
    // controller's tail at this level is roughly Phi(r/sqrt(V_min)).
    let constant = ControllerSpec::constant(a.q_min.clone());
    let base = SimConfig { controller: constant, ..config };
    let base_result = simulate_gamma_n(&ch, &a, &base).unwrap();
    println!(
        "constant input at the same threshold: {:.5} +- {:.5}",
        base_result.estimate, base_result.ci_radius
    );
    assert!(base_result.estimate > result.estimate);
}
