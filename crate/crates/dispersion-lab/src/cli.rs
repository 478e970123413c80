//! Command-line front end: `analyze`, `simulate`, `curve`, and `vnc`
//! subcommands over the library. Every run writes its primary output plus a
//! `<output>.manifest.json` describing how to reproduce it; all randomness
//! comes from the mandatory `--seed`, so outputs are byte-stable across
//! repeats and thread counts.

use crate::analyze::{analyze, Tolerances};
use crate::bounds::build_rate_curve;
use crate::error::{Error, Result};
use crate::io::{
    controller_descriptor, rate_curve_csv, read_channel, read_controller, resolve_controller,
    scaling_csv, sig12, walk_result_csv, RunManifest,
};
use crate::special::norm_inv;
use crate::vnc::{center_lambda, scaling_report};
use crate::walk::{simulate_gamma_n, SimConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Debug, Parser)]
#[command(
    name = "dlab",
    version,
    about = "Channel dispersion analysis and feedback-controller simulation"
)]
pub struct Cli {
    /// Worker threads for internally parallel calls (default: available
    /// parallelism; env fallback DISPERSION_LAB_THREADS). Results never
    /// depend on this value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a channel: capacity, information-density statistics, and
    /// dispersion extremes; writes an analysis JSON report.
    Analyze(AnalyzeArgs),
    /// Monte Carlo tail probability of the controlled information-density
    /// walk; writes a one-row CSV.
    Simulate(SimulateArgs),
    /// Second-order rate curves over an epsilon grid; writes a CSV table.
    Curve(CurveArgs),
    /// Very-noisy-channel scaling sweep; writes a CSV table.
    Vnc(VncArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Channel JSON file ({"input_size","output_size","w"}).
    #[arg(long)]
    pub channel: PathBuf,
    /// Output path for the analysis JSON.
    #[arg(long)]
    pub output: PathBuf,
    /// Duality-gap tolerance for the capacity iteration.
    #[arg(long, default_value_t = 1e-11)]
    pub capacity_tol: f64,
    /// Membership slack for the capacity-achieving support.
    #[arg(long, default_value_t = 1e-9)]
    pub support_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThresholdMode {
    /// Threshold = nC + √(n V_min) Φ⁻¹(αε), the half-block decoding level.
    AlphaEps,
    /// Threshold taken directly from --threshold (nats).
    Absolute,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub channel: PathBuf,
    /// Controller JSON file, e.g. {"variant":"coarse","eps":0.1}.
    #[arg(long)]
    pub controller: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub trials: usize,
    /// Master seed (mandatory: no wall-clock seeding).
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ThresholdMode::AlphaEps)]
    pub threshold_mode: ThresholdMode,
    /// Absolute threshold in nats (required with --threshold-mode absolute).
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub channel: PathBuf,
    /// Grid spec: "start:step:end" or a comma-separated list of points.
    #[arg(long, default_value = "0.01:0.01:0.99")]
    pub eps_grid: String,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct VncArgs {
    /// JSON array with the output distribution Γ.
    #[arg(long)]
    pub gamma: PathBuf,
    /// JSON matrix with the perturbation λ(x,y); centered automatically.
    #[arg(long)]
    pub lambda: PathBuf,
    /// Decreasing comma-separated ζ values.
    #[arg(long, default_value = "0.2,0.1,0.05,0.025")]
    pub zetas: String,
    #[arg(long)]
    pub output: PathBuf,
}

/// Parses "start:step:end" or "a,b,c" into a grid.
pub fn parse_eps_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |m: &str| Error::Domain(format!("bad eps grid '{spec}': {m}"));
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:step:end"));
        }
        let start: f64 = parts[0].parse().map_err(|_| bad("non-numeric start"))?;
        let step: f64 = parts[1].parse().map_err(|_| bad("non-numeric step"))?;
        let end: f64 = parts[2].parse().map_err(|_| bad("non-numeric end"))?;
        if !(step > 0.0) {
            return Err(bad("step must be positive"));
        }
        let mut grid = Vec::new();
        let mut i = 0usize;
        loop {
            let v = start + step * i as f64;
            if v > end + 1e-12 {
                break;
            }
            grid.push(v);
            i += 1;
        }
        if grid.is_empty() {
            return Err(bad("empty grid"));
        }
        Ok(grid)
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad("non-numeric point")))
            .collect()
    }
}

fn parse_zetas(spec: &str) -> Result<Vec<f64>> {
    let zetas: Vec<f64> = spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("bad zeta value '{s}'")))
        })
        .collect::<Result<_>>()?;
    if zetas.iter().any(|&z| !(z > 0.0)) {
        return Err(Error::Domain("zeta values must be strictly positive".into()));
    }
    Ok(zetas)
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<String> {
    let ch = read_channel(&args.channel)?;
    let tol = Tolerances {
        capacity_tol: args.capacity_tol,
        support_tol: args.support_tol,
        ..Tolerances::default()
    };
    let a = analyze(&ch, tol)?;
    crate::io::write_analysis(&args.output, &a)?;
    let class = format!("{:?}", a.dispersion_class).to_uppercase();
    let warn = if a.v_max <= tol.class_tol { " (zero dispersion: rate curves degenerate)" } else { "" };
    Ok(format!(
        "{class}, C={} nats, V_min={}, V_max={}{warn}",
        sig12(a.capacity_nats),
        sig12(a.v_min),
        sig12(a.v_max)
    ))
}

fn cmd_simulate(args: &SimulateArgs) -> Result<String> {
    let ch = read_channel(&args.channel)?;
    let a = analyze(&ch, Tolerances::default())?;
    let file = read_controller(&args.controller)?;
    let spec = resolve_controller(&file, &a, args.n)?;
    let threshold_nats = match args.threshold_mode {
        ThresholdMode::Absolute => args.threshold.ok_or_else(|| {
            Error::Domain("--threshold is required with --threshold-mode absolute".into())
        })?,
        ThresholdMode::AlphaEps => {
            // nC + √(n V_min) Φ⁻¹(αε); (α, ε) come from the controller,
            // with α = 1 for policies that carry no α of their own.
            let (alpha, eps) = match &spec {
                crate::controllers::ControllerSpec::Coarse { alpha, eps, .. } => (*alpha, *eps),
                crate::controllers::ControllerSpec::Refined { eps, .. } => (1.0, *eps),
                crate::controllers::ControllerSpec::Constant { .. } => {
                    return Err(Error::Domain(
                        "alpha-eps threshold needs a coarse or refined controller; \
                         use --threshold-mode absolute with a constant controller"
                            .into(),
                    ))
                }
            };
            args.n as f64 * a.capacity_nats
                + (args.n as f64 * a.v_min).sqrt() * norm_inv(alpha * eps)?
        }
    };
    let config = SimConfig {
        n: args.n,
        trials: args.trials,
        seed: args.seed,
        controller: spec,
        threshold_nats,
    };
    let result = simulate_gamma_n(&ch, &a, &config)?;
    let csv = walk_result_csv(&result, &controller_descriptor(&config.controller));
    std::fs::write(&args.output, csv)?;
    Ok(format!(
        "estimate={} ci={} at threshold {} nats",
        sig12(result.estimate),
        sig12(result.ci_radius),
        sig12(threshold_nats)
    ))
}

fn cmd_curve(args: &CurveArgs) -> Result<String> {
    let ch = read_channel(&args.channel)?;
    let a = analyze(&ch, Tolerances::default())?;
    let grid = parse_eps_grid(&args.eps_grid)?;
    let curve = build_rate_curve(&a, &grid)?;
    std::fs::write(&args.output, rate_curve_csv(&curve))?;
    Ok(format!("{} grid points", grid.len()))
}

fn cmd_vnc(args: &VncArgs) -> Result<String> {
    let gamma: Vec<f64> = serde_json::from_str(&std::fs::read_to_string(&args.gamma)?)?;
    let raw: Vec<Vec<f64>> = serde_json::from_str(&std::fs::read_to_string(&args.lambda)?)?;
    let lam = center_lambda(&gamma, &raw);
    let zetas = parse_zetas(&args.zetas)?;
    let rows = scaling_report(&gamma, &lam, &zetas)?;
    std::fs::write(&args.output, scaling_csv(&rows))?;
    Ok(format!("{} sweep points", rows.len()))
}

/// Maps library errors to process exit codes: 2 for input/validation
/// problems, 3 for numeric non-convergence.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NoConvergence { .. } => 3,
        _ => 2,
    }
}

fn thread_count(cli: &Cli) -> Option<usize> {
    cli.threads.or_else(|| {
        std::env::var("DISPERSION_LAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

/// Runs one parsed invocation; returns the human-readable summary line.
pub fn run(cli: &Cli, raw_args: &[String]) -> Result<String> {
    if let Some(threads) = thread_count(cli) {
        if threads == 0 {
            return Err(Error::Domain("--threads must be positive".into()));
        }
        // Ignore the error if a pool already exists (e.g. repeated calls in
        // tests); determinism never depends on the pool size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let started = Instant::now();
    let (name, summary, output, seed) = match &cli.command {
        Command::Analyze(a) => ("analyze", cmd_analyze(a)?, a.output.clone(), None),
        Command::Simulate(a) => ("simulate", cmd_simulate(a)?, a.output.clone(), Some(a.seed)),
        Command::Curve(a) => ("curve", cmd_curve(a)?, a.output.clone(), None),
        Command::Vnc(a) => ("vnc", cmd_vnc(a)?, a.output.clone(), None),
    };
    let mut manifest = RunManifest::new(name, raw_args.to_vec(), seed);
    manifest.duration_seconds = started.elapsed().as_secs_f64();
    manifest.outputs.push(output.display().to_string());
    manifest.write_beside(&output)?;
    Ok(format!("{summary} ({:.2}s)", started.elapsed().as_secs_f64()))
}

/// Binary entry point: parse, run, report, exit.
pub fn main() {
    let raw: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(&cli, &raw) {
        Ok(summary) => println!("{summary}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_grid_parsing() {
        let g = parse_eps_grid("0.1:0.1:0.3").unwrap();
        assert_eq!(g.len(), 3);
        assert!((g[2] - 0.3).abs() < 1e-12);
        let g = parse_eps_grid("0.5").unwrap();
        assert_eq!(g, vec![0.5]);
        let g = parse_eps_grid("0.1,0.2,0.9").unwrap();
        assert_eq!(g.len(), 3);
        assert!(parse_eps_grid("0.1:0.1").is_err());
        assert!(parse_eps_grid("a,b").is_err());
        assert!(parse_eps_grid("0.5:-0.1:0.1").is_err());
    }

    #[test]
    fn zeta_parsing_rejects_nonpositive() {
        assert!(parse_zetas("0.2,0.1").is_ok());
        assert!(parse_zetas("0.2,0").is_err());
        assert!(parse_zetas("0.2,-0.1").is_err());
        assert!(parse_zetas("x").is_err());
    }

    #[test]
    fn exit_codes_partition_errors() {
        assert_eq!(exit_code(&Error::Domain("x".into())), 2);
        assert_eq!(exit_code(&Error::Io("x".into())), 2);
        assert_eq!(exit_code(&Error::NoConvergence { iters: 1, gap: 1.0 }), 3);
    }
}
