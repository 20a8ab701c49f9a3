use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use arsdet::anglecode::{arcsl_encode, AngleLabelVector};
use arsdet::arsmatch::{build_cost_matrix, hungarian, CostWeights, GroundTruth, Prediction};
use arsdet::RBox;
use serde::{Deserialize, Serialize};

use super::{ensure_dir, to_json, write_file, Status};
use crate::args::MatchDemoArgs;
use crate::config::MatchDemoConfig;

/// `[cx, cy, w, h, theta_degrees]`.
type BoxSpec = [f64; 5];

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PredSpec {
    class_scores: Vec<f64>,
    #[serde(rename = "box")]
    rbox: BoxSpec,
    /// Explicit 180-bin label.
    label: Option<Vec<f64>>,
    /// Or an angle, encoded with the prediction's own aspect ratio.
    angle: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GtSpec {
    class_id: usize,
    #[serde(rename = "box")]
    rbox: BoxSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Input {
    predictions: Vec<PredSpec>,
    ground_truths: Vec<GtSpec>,
}

#[derive(Serialize)]
struct Pair {
    prediction: usize,
    ground_truth: usize,
    cost: f64,
}

#[derive(Serialize)]
struct Output {
    cost_matrix: Vec<Vec<f64>>,
    assignment: Vec<Pair>,
    total_cost: f64,
}

fn to_box(b: &BoxSpec) -> arsdet::Result<RBox> {
    RBox::new(b[0], b[1], b[2], b[3], b[4])
}

fn weight(name: &str, v: f64) -> Result<f64> {
    if !(v.is_finite() && v >= 0.0) {
        bail!("{name} must be finite and >= 0, got {v}");
    }
    Ok(v)
}

fn weights(a: &MatchDemoArgs, cfg: &MatchDemoConfig) -> Result<CostWeights> {
    let d = CostWeights::default();
    let image_size = match (&a.image_size, cfg.image_size) {
        (Some(s), _) if s.len() == 2 => (s[0], s[1]),
        (Some(s), _) => bail!("--image-size takes W,H, got {} values", s.len()),
        (None, Some([w, h])) => (w, h),
        (None, None) => d.image_size,
    };
    Ok(CostWeights {
        class: weight("class weight", a.class_weight.or(cfg.class_weight).unwrap_or(d.class))?,
        bbox: weight("bbox weight", a.bbox_weight.or(cfg.bbox_weight).unwrap_or(d.bbox))?,
        angle: weight("angle weight", a.angle_weight.or(cfg.angle_weight).unwrap_or(d.angle))?,
        skewiou: weight("skewiou weight", a.skewiou_weight.or(cfg.skewiou_weight).unwrap_or(d.skewiou))?,
        image_size,
    })
}

pub fn run(a: &MatchDemoArgs, cfg: &MatchDemoConfig) -> Result<Status> {
    let weights = weights(a, cfg)?;
    let text = std::fs::read_to_string(&a.input).with_context(|| format!("cannot read {}", a.input.display()))?;
    let input: Input =
        serde_json::from_str(&text).with_context(|| format!("invalid match input {}", a.input.display()))?;

    let preds = input
        .predictions
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let rbox = to_box(&p.rbox).with_context(|| format!("prediction {i}"))?;
            let angle_label = match (&p.label, p.angle) {
                (Some(bins), None) => AngleLabelVector::from_bins(bins)?,
                (None, Some(t)) => arcsl_encode(t, rbox.aspect_ratio())?,
                _ => bail!("prediction {i}: give exactly one of `label` or `angle`"),
            };
            if let Some(s) = p.class_scores.iter().find(|s| !(0.0..=1.0).contains(*s)) {
                bail!("prediction {i}: class score {s} outside [0, 1]");
            }
            Ok(Prediction { class_scores: p.class_scores.clone(), rbox, angle_label })
        })
        .collect::<Result<Vec<_>>>()?;
    let gts = input
        .ground_truths
        .iter()
        .enumerate()
        .map(|(j, g)| {
            Ok(GroundTruth {
                class_id: g.class_id,
                rbox: to_box(&g.rbox).with_context(|| format!("ground truth {j}"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let matrix = build_cost_matrix(&preds, &gts, &weights)?;
    let assignment = hungarian(&matrix);
    let out = Output {
        cost_matrix: (0..matrix.rows()).map(|i| (0..matrix.cols()).map(|j| matrix.get(i, j)).collect()).collect(),
        assignment: assignment
            .pairs
            .iter()
            .map(|&(i, j)| Pair { prediction: i, ground_truth: j, cost: matrix.get(i, j) })
            .collect(),
        total_cost: assignment.total_cost,
    };
    if let Some(dir) = &a.out_dir {
        ensure_dir(dir)?;
        write_file(&dir.join("cost.csv"), &matrix.to_csv())?;
        let mut csv = String::from("prediction,ground_truth,cost\n");
        for p in &out.assignment {
            let _ = writeln!(csv, "{},{},{}", p.prediction, p.ground_truth, p.cost);
        }
        write_file(&dir.join("assignment.csv"), &csv)?;
    }
    print!("{}", to_json(&out)?);
    Ok(Status::Ok)
}
