use std::path::PathBuf;

use arsdet::evalkit::Interpolation;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "arsdet",
    version,
    about = "Oriented-detection numerics: SkewIoU curves, angle labels, matching, noise, gradient checks and DOTA evaluation"
)]
pub struct Cli {
    /// Worker threads, a positive integer. Defaults to one per core.
    #[arg(long, global = true, env = "ARSDET_JOBS", value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,

    /// TOML file with default values; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate DOTA Task-1 predictions against DOTA annotations.
    Eval(EvalArgs),
    /// Write SkewIoU-vs-deviation curves and angle-label matrices as CSV.
    Curve(CurveArgs),
    /// Print one 180-bin angle label as a CSV row.
    Encode(EncodeArgs),
    /// Angle-perturbation study: fixed shifts or seeded random noise.
    Perturb(PerturbArgs),
    /// Finite-difference check of rotated deformable sampling gradients.
    GradCheck(GradCheckArgs),
    /// Build a matching cost matrix from JSON and solve the assignment.
    MatchDemo(MatchDemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InterpArg {
    /// PASCAL VOC 2007 11-point interpolation.
    Voc07,
    /// Area under the monotone precision envelope at every recall step.
    AllPoints,
}

impl From<InterpArg> for Interpolation {
    fn from(a: InterpArg) -> Self {
        match a {
            InterpArg::Voc07 => Interpolation::Voc07,
            InterpArg::AllPoints => Interpolation::AllPoints,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Directory of `<image_id>.txt` annotation files.
    #[arg(long, value_name = "DIR")]
    pub gt: PathBuf,
    /// Directory of `Task1_<category>.txt` prediction files.
    #[arg(long, value_name = "DIR")]
    pub preds: PathBuf,
    /// JSON report path; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// AP interpolation [default: voc07].
    #[arg(long, value_enum)]
    pub interp: Option<InterpArg>,
    /// Keep only the N highest-scoring detections per image, N >= 1 [default: unlimited].
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub max_dets: Option<u32>,
    /// Also write per-category precision-recall CSVs at IoU 0.5 into DIR.
    #[arg(long, value_name = "DIR")]
    pub pr_dir: Option<PathBuf>,
    /// Fail when more than N input lines are rejected, N >= 0 [default: unlimited].
    #[arg(long, value_name = "N")]
    pub max_warnings: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LabelKind {
    Csl,
    Arcsl,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Comma-separated aspect ratios, each >= 1 [default: 1,1.2,1.5,2,3,5,8].
    #[arg(long, value_name = "K,...", value_delimiter = ',')]
    pub k: Option<Vec<f64>>,
    /// Angle step in degrees, in (0, 5] [default: 1].
    #[arg(long, value_name = "DEG")]
    pub step: Option<f64>,
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    /// Also write 180x180 label matrices (one row per ground-truth angle).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub labels: Vec<LabelKind>,
    /// CSL window radius in bins, > 0 [default: 6].
    #[arg(long, value_name = "R")]
    pub radius: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Label kind.
    #[arg(value_enum)]
    pub kind: LabelKind,
    /// Ground-truth angle in degrees, any finite value (wrapped into [0, 180)).
    #[arg(long, value_name = "DEG", allow_hyphen_values = true)]
    pub theta: f64,
    /// Aspect ratio for arcsl, >= 1.
    #[arg(long)]
    pub k: Option<f64>,
    /// CSL window radius in bins, > 0 [default: 6].
    #[arg(long, value_name = "R")]
    pub radius: Option<f64>,
    /// CSV output path; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PerturbMode {
    /// Shift every angle by each of the given deviations.
    Fixed,
    /// Add seeded uniform angle noise bounded by lambda * 180 degrees.
    Random,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    /// Annotation directory (exclusive with --synthetic).
    #[arg(long, value_name = "DIR", conflicts_with = "synthetic", required_unless_present = "synthetic")]
    pub gt: Option<PathBuf>,
    /// Generate N synthetic objects instead of reading annotations, N >= 1.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub synthetic: Option<u32>,
    /// Aspect-ratio range of synthetic objects, 1 <= MIN <= MAX <= 16 [default: 1,8].
    #[arg(long, value_name = "MIN,MAX", value_delimiter = ',')]
    pub k_range: Option<Vec<f64>>,
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "fixed")]
    pub mode: PerturbMode,
    /// Fixed-mode deviations in degrees, finite [default: 0,5,10,15,20].
    #[arg(long, value_name = "DEG,...", value_delimiter = ',', allow_hyphen_values = true)]
    pub deltas: Option<Vec<f64>>,
    /// Random-mode noise scale, in (0, 1] [default: 0.1].
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Seed for synthetic data and noise, any u64 [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// AP interpolation [default: voc07].
    #[arg(long, value_enum)]
    pub interp: Option<InterpArg>,
}

#[derive(Debug, Args)]
pub struct GradCheckArgs {
    /// Number of random instances, >= 1 [default: 100].
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub instances: Option<u32>,
    /// Finite-difference step, in (0, 1e-2] [default: 1e-4].
    #[arg(long)]
    pub step: Option<f64>,
    /// Largest accepted relative error, > 0 [default: 1e-4].
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Any u64 [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON report path; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatchDemoArgs {
    /// JSON file with `predictions` and `ground_truths`.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Class-cost weight, finite and >= 0 [default: 2].
    #[arg(long)]
    pub class_weight: Option<f64>,
    /// Box L1 weight, finite and >= 0 [default: 5].
    #[arg(long)]
    pub bbox_weight: Option<f64>,
    /// Angle-cost weight, finite and >= 0 [default: 1].
    #[arg(long)]
    pub angle_weight: Option<f64>,
    /// Weight of the optional 1 - SkewIoU term, finite and >= 0 [default: 0].
    #[arg(long)]
    pub skewiou_weight: Option<f64>,
    /// Image width and height normalizing the L1 term, each > 0 [default: 1024,1024].
    #[arg(long, value_name = "W,H", value_delimiter = ',')]
    pub image_size: Option<Vec<f64>>,
    /// Also write `cost.csv` and `assignment.csv` into DIR.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}
