//! File formats: channel/analysis JSON, controller spec files, CSV emission
//! with a fixed 12-significant-digit numeric format, and run manifests.

use crate::analyze::ChannelAnalysis;
use crate::bounds::{find_alpha, RateCurve};
use crate::channel::{validate_channel, Dmc, InputDistribution};
use crate::controllers::ControllerSpec;
use crate::error::{Error, Result};
use crate::vnc::ScalingRow;
use crate::walk::WalkResult;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// On-disk channel description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    pub input_size: usize,
    pub output_size: usize,
    /// Row-major transition probabilities, one row per input symbol.
    pub w: Vec<Vec<f64>>,
}

pub fn read_channel(path: &Path) -> Result<Dmc> {
    let text = std::fs::read_to_string(path)?;
    let file: ChannelFile = serde_json::from_str(&text)?;
    if file.w.len() != file.input_size || file.w.iter().any(|r| r.len() != file.output_size) {
        return Err(Error::Domain(format!(
            "matrix shape disagrees with declared sizes {}x{}",
            file.input_size, file.output_size
        )));
    }
    validate_channel(file.w)
}

pub fn write_channel(path: &Path, ch: &Dmc) -> Result<()> {
    let file = ChannelFile {
        input_size: ch.input_size(),
        output_size: ch.output_size(),
        w: ch.matrix().to_vec(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn write_analysis(path: &Path, analysis: &ChannelAnalysis) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(analysis)?)?;
    Ok(())
}

/// User-facing controller description. The extremal input distributions are
/// resolved from the channel analysis, not stored in the file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum ControllerFile {
    /// Fixed input distribution; defaults to the low-dispersion optimizer.
    Constant {
        #[serde(default)]
        q: Option<Vec<f64>>,
    },
    /// Half-block timid/bold switch; `alpha` defaults to the largest value
    /// passing the selection function at tolerance 1e-9.
    Coarse {
        eps: f64,
        #[serde(default)]
        alpha: Option<f64>,
    },
    /// Per-step band policy with defaults ℓ = 20 and κ chosen from ε and β.
    Refined {
        eps: f64,
        #[serde(default)]
        ell: Option<u32>,
        #[serde(default)]
        kappa: Option<f64>,
    },
}

pub fn read_controller(path: &Path) -> Result<ControllerFile> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Materializes a controller file against a channel analysis and horizon.
pub fn resolve_controller(
    file: &ControllerFile,
    analysis: &ChannelAnalysis,
    n: usize,
) -> Result<ControllerSpec> {
    match file {
        ControllerFile::Constant { q } => {
            let q = match q {
                Some(probs) => InputDistribution::new(probs.clone())?,
                None => analysis.q_min.clone(),
            };
            Ok(ControllerSpec::constant(q))
        }
        ControllerFile::Coarse { eps, alpha } => {
            let alpha = match alpha {
                Some(a) => *a,
                None => find_alpha(*eps, analysis.beta, 1e-9)?,
            };
            ControllerSpec::coarse(n, alpha, *eps, analysis.q_min.clone(), analysis.q_max.clone())
        }
        ControllerFile::Refined { eps, ell, kappa } => {
            let kappa = kappa.unwrap_or_else(|| ControllerSpec::default_kappa(*eps, analysis.beta));
            ControllerSpec::refined(
                ell.unwrap_or(20),
                *eps,
                kappa,
                analysis.beta,
                analysis.q_min.clone(),
                analysis.q_max.clone(),
            )
        }
    }
}

/// One-line descriptor used in CSV output.
pub fn controller_descriptor(spec: &ControllerSpec) -> String {
    match spec {
        ControllerSpec::Constant { .. } => "constant".to_string(),
        ControllerSpec::Coarse { alpha, eps, .. } => {
            format!("coarse(alpha={};eps={})", sig12(*alpha), sig12(*eps))
        }
        ControllerSpec::Refined { ell, eps, kappa, .. } => {
            format!("refined(ell={ell};eps={};kappa={})", sig12(*eps), sig12(*kappa))
        }
    }
}

/// Formats a float with 12 significant digits (scientific), the fixed
/// numeric format of every CSV this crate writes.
pub fn sig12(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:.11e}")
    }
}

pub fn walk_result_csv(result: &WalkResult, descriptor: &str) -> String {
    let mut out = String::from("estimate,ci_radius,trials,seed,n,threshold_nats,controller\n");
    out.push_str(&format!(
        "{},{},{},{},{},{},{}\n",
        sig12(result.estimate),
        sig12(result.ci_radius),
        result.trials,
        result.seed,
        result.n,
        sig12(result.threshold_nats),
        descriptor
    ));
    out
}

pub fn rate_curve_csv(curve: &RateCurve) -> String {
    let mut out = String::from("eps,no_feedback,thm1,thm2_lower,thm4_upper\n");
    for i in 0..curve.eps_grid.len() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            sig12(curve.eps_grid[i]),
            sig12(curve.no_feedback[i]),
            sig12(curve.thm1_lower[i]),
            sig12(curve.fb_lower[i]),
            sig12(curve.fb_upper[i]),
        ));
    }
    out
}

pub fn scaling_csv(rows: &[ScalingRow]) -> String {
    let mut out = String::from("zeta,C,boldC_zeta2,ratio_C,Vmin,Vmax,ratio_Vmin,ratio_Vmax,Vratio\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            sig12(r.zeta),
            sig12(r.c),
            sig12(r.bold_c_zeta2),
            sig12(r.ratio_c),
            sig12(r.v_min),
            sig12(r.v_max),
            sig12(r.ratio_vmin),
            sig12(r.ratio_vmax),
            sig12(r.v_ratio),
        ));
    }
    out
}

/// Record of one CLI run, written beside the primary output so any result
/// can be reproduced exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Full argument list as invoked.
    pub parameters: Vec<String>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub duration_seconds: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: Vec<String>, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            duration_seconds: 0.0,
            outputs: Vec::new(),
        }
    }

    /// Writes the manifest as `<output>.manifest.json`.
    pub fn write_beside(&self, output: &Path) -> Result<()> {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        std::fs::write(Path::new(&name), serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyze::{analyze, Tolerances};
    use crate::channel::compound_example_channel;

    #[test]
    fn channel_round_trip_and_shape_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ch.json");
        let ch = compound_example_channel(0.8).unwrap();
        write_channel(&path, &ch).unwrap();
        let back = read_channel(&path).unwrap();
        assert_eq!(back.matrix(), ch.matrix());
        // Shape mismatch is rejected.
        std::fs::write(&path, r#"{"input_size":2,"output_size":3,"w":[[0.5,0.5]]}"#).unwrap();
        assert!(read_channel(&path).is_err());
        // Malformed JSON is rejected.
        std::fs::write(&path, "not json").unwrap();
        assert!(matches!(read_channel(&path), Err(Error::Io(_))));
    }

    #[test]
    fn controller_files_resolve_with_defaults() {
        let ch = compound_example_channel(0.8).unwrap();
        let a = analyze(&ch, Tolerances::default()).unwrap();
        let f: ControllerFile =
            serde_json::from_str(r#"{"variant":"refined","eps":0.1,"kappa":0.02}"#).unwrap();
        let spec = resolve_controller(&f, &a, 100).unwrap();
        let ControllerSpec::Refined { ell, eps, kappa, .. } = &spec else { panic!() };
        assert_eq!(*ell, 20);
        assert_eq!(*eps, 0.1);
        assert_eq!(*kappa, 0.02);
        let f: ControllerFile = serde_json::from_str(r#"{"variant":"coarse","eps":0.1}"#).unwrap();
        let spec = resolve_controller(&f, &a, 100).unwrap();
        let ControllerSpec::Coarse { alpha, .. } = &spec else { panic!() };
        assert!(*alpha > 1.0);
        let f: ControllerFile = serde_json::from_str(r#"{"variant":"constant"}"#).unwrap();
        let spec = resolve_controller(&f, &a, 100).unwrap();
        let ControllerSpec::Constant { q } = &spec else { panic!() };
        assert_eq!(q, &a.q_min);
        // Unknown fields rejected to catch typos.
        assert!(serde_json::from_str::<ControllerFile>(r#"{"variant":"coarse","epsilon":0.1}"#)
            .is_err());
    }

    #[test]
    fn sig12_formatting() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(f64::NAN), "nan");
        assert_eq!(sig12(0.1), "1.00000000000e-1");
        // Round-trips to 12 significant digits.
        let v = 0.45958042901793283;
        let parsed: f64 = sig12(v).parse().unwrap();
        assert!((parsed - v).abs() < 1e-12);
    }

    #[test]
    fn csv_headers_are_stable() {
        let curve = RateCurve {
            eps_grid: vec![0.5],
            no_feedback: vec![0.0],
            thm1_lower: vec![f64::NAN],
            fb_lower: vec![0.1],
            fb_upper: vec![0.1],
        };
        let text = rate_curve_csv(&curve);
        assert!(text.starts_with("eps,no_feedback,thm1,thm2_lower,thm4_upper\n"));
        assert!(text.contains(",nan,"));
        let row = ScalingRow {
            zeta: 0.1,
            c: 0.01,
            bold_c_zeta2: 0.01,
            ratio_c: 1.0,
            v_min: 0.02,
            v_max: 0.02,
            ratio_vmin: 1.0,
            ratio_vmax: 1.0,
            v_ratio: 1.0,
        };
        assert!(scaling_csv(&[row])
            .starts_with("zeta,C,boldC_zeta2,ratio_C,Vmin,Vmax,ratio_Vmin,ratio_Vmax,Vratio\n"));
    }

    #[test]
    fn manifest_writes_beside_output() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("result.csv");
        let mut m = RunManifest::new("simulate", vec!["--seed".into(), "7".into()], Some(7));
        m.outputs.push(out.display().to_string());
        m.write_beside(&out).unwrap();
        let text = std::fs::read_to_string(dir.path().join("result.csv.manifest.json")).unwrap();
        let back: RunManifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back.command, "simulate");
        assert_eq!(back.seed, Some(7));
    }
}
