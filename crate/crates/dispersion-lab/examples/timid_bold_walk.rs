//! The channel-coding version of the coin game: the half-block timid/bold
//! controller versus the best constant input, compared on common random
//! numbers at the decoding threshold n·C + sqrt(n·V_min)·Phi^{-1}(alpha*eps).
//!
//! Run with: cargo run --release --example timid_bold_walk

use dispersion_lab::bounds::find_alpha;
use dispersion_lab::channel::compound_example_channel;
use dispersion_lab::controllers::ControllerSpec;
use dispersion_lab::special::norm_inv;
use dispersion_lab::walk::{compare_gamma_n, SimConfig};
use dispersion_lab::{analyze, Tolerances};

fn main() {
    let ch = compound_example_channel(0.8).unwrap();
    let a = analyze(&ch, Tolerances::default()).unwrap();
    let (eps, n, trials, seed) = (0.1, 10_000usize, 20_000usize, 11);

    // Largest alpha passing the selection function: the constant controller
    // tends to alpha*eps at this threshold while the switcher does better.
    let alpha = find_alpha(eps, a.beta, 1e-9).unwrap();
    let threshold = n as f64 * a.capacity_nats
        + (n as f64 * a.v_min).sqrt() * norm_inv(alpha * eps).unwrap();
    println!("alpha = {alpha:.8}, target level alpha*eps = {:.6}", alpha * eps);

    let coarse =
        ControllerSpec::coarse(n, alpha, eps, a.q_min.clone(), a.q_max.clone()).unwrap();
    let constant = ControllerSpec::constant(a.q_min.clone());
    let config = SimConfig { n, trials, seed, controller: coarse, threshold_nats: threshold };
    let cmp = compare_gamma_n(&ch, &a, &config, &constant).unwrap();

    println!(
        "half-block controller : {:.5} +- {:.5}",
        cmp.first.estimate, cmp.first.ci_radius
    );
    println!(
        "constant (timid) input: {:.5} +- {:.5}",
        cmp.second.estimate, cmp.second.ci_radius
    );
    println!(
        "paired difference     : {:+.5} +- {:.5}",
        cmp.diff, cmp.diff_ci_radius
    );
    assert!(cmp.diff + cmp.diff_ci_radius < 0.0);
    println!("switching to the bold input when behind strictly lowers the tail.");
}
