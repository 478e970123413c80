//! Second-order rate curves with and without feedback, written as CSV.
//!
//! Run with: cargo run --release --example rate_curves

use dispersion_lab::bounds::build_rate_curve;
use dispersion_lab::channel::compound_example_channel;
use dispersion_lab::io::rate_curve_csv;
use dispersion_lab::{analyze, Tolerances};

fn main() {
    let ch = compound_example_channel(0.8).unwrap();
    let a = analyze(&ch, Tolerances::default()).unwrap();
    let grid: Vec<f64> = (1..99).map(|i| i as f64 / 100.0).collect();
    let curve = build_rate_curve(&a, &grid).unwrap();

    let path = "rate_curves.csv";
    std::fs::write(path, rate_curve_csv(&curve)).unwrap();
    println!("wrote {} rows to {path}", grid.len());

    // On this channel the achievability and converse curves coincide, so
    // the feedback second-order rate is fully determined.
    let max_gap = curve
        .fb_lower
        .iter()
        .zip(&curve.fb_upper)
        .map(|(l, u)| (l - u).abs())
        .fold(0.0f64, f64::max)
        .max(0.0);
    println!("max |achievability - converse| = {max_gap:.3e}");

    println!("eps    no-feedback   half-block    feedback");
    for &eps in &[0.05, 0.1, 0.25, 0.45] {
        let i = grid.iter().position(|&e| (e - eps).abs() < 1e-12).unwrap();
        println!(
            "{eps:<6} {:>12.6} {:>12.6} {:>12.6}",
            curve.no_feedback[i], curve.thm1_lower[i], curve.fb_lower[i]
        );
    }
    println!("(rates in nats per sqrt(channel use); feedback > no-feedback everywhere)");
}
