//! Finite-horizon error-bound machinery: the alpha selection function, the
//! explicit tail bound for the half-block controller, and the achievability
//! and converse evaluators driven by simulated tail probabilities.
//!
//! Run with: cargo run --release --example error_bounds

use dispersion_lab::bounds::{find_alpha, thm1_f, thm1_finite_n_gamma_bound, thm1_n0};
use dispersion_lab::channel::compound_example_channel;
use dispersion_lab::controllers::ControllerSpec;
use dispersion_lab::walk::{
    achievability_error_bound, converse_bound_eval, simulate_gamma_n, SimConfig,
};
use dispersion_lab::{analyze, Tolerances};

fn main() {
    let ch = compound_example_channel(0.8).unwrap();
    let a = analyze(&ch, Tolerances::default()).unwrap();
    let eps = 0.1;

    // Pick alpha with a real margin so the asymptotic bound sits below eps.
    let alpha = find_alpha(eps, a.beta, 1e-5).unwrap();
    println!("alpha = {alpha:.10}, f(alpha) = {:.3e}", thm1_f(alpha, eps, a.beta).unwrap());

    let b = thm1_finite_n_gamma_bound(alpha, eps, &ch, &a, 10_000).unwrap();
    println!(
        "tail bound at n = 10^4: {:.4} (third-moment constants {:.3}, {:.3})",
        b.bound, b.kappa_min, b.kappa_max
    );
    let n0 = thm1_n0(alpha, eps, &ch, &a, usize::MAX / 4).unwrap();
    println!("bound first drops below eps at n0 = {n0:?} (loose: Berry-Esseen constants)");

    // Monte Carlo the tail at a rate slightly below capacity, then turn it
    // into coding bounds.
    let (n, theta) = (2_000usize, (2_000f64).powf(-0.75));
    let rate = a.capacity_nats - 0.02;
    let threshold = n as f64 * (rate + theta);
    let config = SimConfig {
        n,
        trials: 20_000,
        seed: 3,
        controller: ControllerSpec::constant(a.q_min.clone()),
        threshold_nats: threshold,
    };
    let gamma_hat = simulate_gamma_n(&ch, &a, &config).unwrap();
    let ach = achievability_error_bound(&gamma_hat, n, rate, theta);
    println!(
        "achievable error at rate C - 0.02 ({} uses): <= {ach:.4} (tail {:.4} + e^(-n*theta) {:.1e})",
        n,
        gamma_hat.estimate,
        (-(n as f64) * theta).exp()
    );

    // Converse: upper tail at log rho = nC + sqrt(n V_min) gives a cap on
    // the log message count of any eps-code driven by this controller.
    let log_rho = n as f64 * a.capacity_nats + (n as f64 * a.v_min).sqrt();
    let upper = SimConfig { threshold_nats: log_rho, ..config };
    let below = simulate_gamma_n(&ch, &a, &upper).unwrap();
    let tail = dispersion_lab::walk::WalkResult {
        estimate: 1.0 - below.estimate,
        ..below
    };
    let conv = converse_bound_eval(&tail, eps, log_rho).unwrap();
    println!("converse: log M <= {conv:.2} nats (log rho = {log_rho:.2})");
}
