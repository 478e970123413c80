//! The limiting bang-bang diffusion: its four-branch transition density
//! integrates to one, composes under Chapman-Kolmogorov, and starting from
//! s(eps) the probability of ending nonpositive is exactly eps.
//!
//! Run with: cargo run --release --example diffusion_identity

use dispersion_lab::controllers::s_of_eps;
use dispersion_lab::diffusion::BangBangDiffusion;
use dispersion_lab::quad::integrate_line;

fn main() {
    let beta = 0.5;

    println!("density mass by quadrature (beta = {beta}):");
    for x0 in [-2.0, -0.5, 0.5, 2.0] {
        let d = BangBangDiffusion::new(beta, x0).unwrap();
        println!("  x0 = {x0:>4}: mass = {:.12}", d.density_mass(1.0, 1e-10).unwrap());
    }

    println!("hitting identity: start at s(eps), end nonpositive w.p. eps");
    println!("  eps    s(eps)      closed form   quadrature");
    for eps in [0.05, 0.2, 0.5, 0.8, 0.95] {
        let x0 = s_of_eps(eps, beta).unwrap();
        let d = BangBangDiffusion::new(beta, x0).unwrap();
        let closed = d.prob_nonpositive_at_1();
        let f = move |y: f64| {
            if y <= 0.0 {
                d.transition_density(1.0, x0, y).unwrap()
            } else {
                0.0
            }
        };
        let quad = integrate_line(&f, x0.min(0.0), 1.0, 1e-10);
        println!("  {eps:<5}  {x0:>9.6}  {closed:.10}  {quad:.10}");
        assert!((closed - eps).abs() < 1e-12);
        assert!((closed - quad).abs() < 1e-8);
    }

    // Chapman-Kolmogorov: composing two half-time kernels reproduces the
    // unit-time kernel.
    let d = BangBangDiffusion::new(beta, 0.0).unwrap();
    let (x, y) = (0.5, -0.3);
    let f = move |z: f64| {
        d.transition_density(0.5, x, z).unwrap() * d.transition_density(0.5, z, y).unwrap()
    };
    let composed = integrate_line(&f, 0.5 * (x + y), 1.0, 1e-9);
    let direct = d.transition_density(1.0, x, y).unwrap();
    println!("Chapman-Kolmogorov at ({x}, {y}): composed = {composed:.10}, direct = {direct:.10}");
    assert!((composed - direct).abs() < 1e-6);
}
