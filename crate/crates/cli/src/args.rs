//! Argument definitions and `--config` file merging.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cutsdp::partition::Variant;

#[derive(Debug, Parser)]
#[command(name = "cutsdp", version, about = "Spectral clustering, cut SDPs and exact-recovery certificates")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory for output files; results go to stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// File of `key=value` lines supplying defaults for any long flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic data set with planted clusters.
    Gen(GenArgs),
    /// Spectral clustering (k-means on the Laplacian embedding).
    Spectral(SpectralArgs),
    /// Solve the RatioCut or NCut SDP and round the solution.
    Sdp(SdpArgs),
    /// Check the proximity condition and optionally build the dual certificate.
    Certify(CertifyArgs),
    /// Run a phase-diagram grid and write heatmaps.
    Phase(PhaseArgs),
    /// Compare model parameters with the closed-form recovery thresholds.
    Thresholds(ThresholdArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenModel {
    Circles,
    CirclesRandom,
    Lines,
    LinesRandom,
    Balls,
    Sbm,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub model: GenModel,
    /// Points on the inner circle, or per cluster for the other models.
    #[arg(long)]
    pub n: usize,
    /// Inner radius for circles.
    #[arg(long, default_value_t = 1.0)]
    pub r1: f64,
    /// Outer-to-inner radius ratio for deterministic circles.
    #[arg(long, default_value_t = 1.5)]
    pub kappa: f64,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Heat,
    Threshold,
}

/// Where the graph comes from: points plus a kernel, or a weight matrix.
#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Point CSV, one row per point.
    #[arg(long, conflicts_with = "weights", required_unless_present = "weights")]
    pub points: Option<PathBuf>,
    /// Dense symmetric weight-matrix CSV.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Kernel bandwidth; required with `--points`.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, value_enum, default_value_t = KernelArg::Heat)]
    pub kernel: KernelArg,
    /// Input CSV files start with a header row.
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Args)]
pub struct SpectralArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value = "ratiocut", value_parser = parse_variant)]
    pub variant: Variant,
    #[arg(long, default_value_t = cutsdp::spectral::DEFAULT_RESTARTS)]
    pub restarts: usize,
    /// Ground-truth labels CSV for scoring.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SdpArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value = "ratiocut", value_parser = parse_variant)]
    pub variant: Variant,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Also write the solution matrix `Z` (needs `--out`).
    #[arg(long)]
    pub write_z: bool,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Candidate partition, one label per row.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, default_value = "ratiocut", value_parser = parse_variant)]
    pub variant: Variant,
    /// Build and verify the dual certificate `(B, Q)`.
    #[arg(long)]
    pub full_certificate: bool,
    /// Multiplier for the certificate; defaults to the interval midpoint.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SigmaRuleArg {
    OverN,
    OverTwoN,
    OverFiveSqrtN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    ConditionCheck,
    FullSdp,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[arg(long, value_parser = ["circles", "lines", "balls"])]
    pub model: String,
    #[arg(long)]
    pub n: usize,
    /// Separations: comma list `0.1,0.2` or range `start:step:end`.
    #[arg(long)]
    pub deltas: String,
    /// Bandwidth parameters, same syntax as `--deltas`.
    #[arg(long)]
    pub ps: String,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::ConditionCheck)]
    pub mode: ModeArg,
    /// Defaults to the customary rule for the model.
    #[arg(long, value_enum)]
    pub sigma_rule: Option<SigmaRuleArg>,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, value_parser = ["circles", "lines", "sbm", "balls"])]
    pub model: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: cutsdp::Error| e.to_string())
}

/// Parses `a,b,c` or `start:step:end` (inclusive, tolerant of rounding).
pub fn parse_axis(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, step, end] => {
            let (start, step, end) = (num(start)?, num(step)?, num(end)?);
            if step.is_nan() || step <= 0.0 || end < start {
                return Err(format!("range '{s}' needs step > 0 and end >= start"));
            }
            let count = ((end - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + step * i as f64).collect())
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(format!("axis '{s}' must be a comma list or start:step:end")),
    }
}

/// Injects `--key value` pairs from the config file right after the
/// subcommand token. Keys already given on the command line are skipped,
/// so explicit flags always win.
pub fn merge_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = find_flag_value(&args, "--config") else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let mut injected = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", lineno + 1))?;
        let flag = format!("--{}", key.trim().replace('_', "-"));
        if flag == "--config" || has_flag(&args, &flag) {
            continue;
        }
        match value.trim() {
            "true" => injected.push(flag),
            "false" => {}
            v => {
                injected.push(flag);
                injected.push(v.to_string());
            }
        }
    }
    let subcommands = ["gen", "spectral", "sdp", "certify", "phase", "thresholds"];
    let pos = args
        .iter()
        .skip(1)
        .position(|a| subcommands.contains(&a.as_str()))
        .map(|p| p + 2)
        .unwrap_or(args.len());
    let mut out = args;
    out.splice(pos..pos, injected);
    Ok(out)
}

fn has_flag(args: &[String], flag: &str) -> bool {
    args.iter().any(|a| a == flag || a.starts_with(&format!("{flag}=")))
}

fn find_flag_value(args: &[String], flag: &str) -> Option<String> {
    let prefix = format!("{flag}=");
    args.iter().enumerate().find_map(|(i, a)| {
        if a == flag {
            args.get(i + 1).cloned()
        } else {
            a.strip_prefix(&prefix).map(str::to_string)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn axis_forms() {
        assert_eq!(parse_axis("0.1,0.2").unwrap(), vec![0.1, 0.2]);
        assert_eq!(parse_axis("1:1:5").unwrap(), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(parse_axis("0.1:0.1:0.3").unwrap().len(), 3);
        assert!(parse_axis("1:0:5").is_err());
        assert!(parse_axis("x").is_err());
    }

    #[test]
    fn config_injects_after_subcommand_and_cli_wins() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.conf");
        std::fs::write(&cfg, "# defaults\nk=3\nseed=9\nmax_iters = 10\nheader=true\nwrite-z=false\n").unwrap();
        let cfg = cfg.to_str().unwrap();
        let args = strings(&["cutsdp", "--config", cfg, "sdp", "--k", "2"]);
        let merged = merge_config(args).unwrap();
        assert_eq!(
            merged,
            strings(&["cutsdp", "--config", cfg, "sdp", "--seed", "9", "--max-iters", "10", "--header", "--k", "2"])
        );
    }
}
